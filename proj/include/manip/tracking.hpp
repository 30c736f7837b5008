#pragma once

#include <optional>

#include "manip/manipulability.hpp"

namespace manip {

/// Gain over Mandel coordinates: a nonnegative scalar, a diagonal, or a full
/// PSD matrix. Scalar gains are applied as a final scaling so the control law
/// is exactly homogeneous in them.
class Gain {
public:
    static Gain scalar(double k);
    static Gain diagonal(const Vector& d);
    static Gain full(const Matrix& m);

    bool is_scalar() const { return scalar_.has_value(); }
    double scalar_value() const { return *scalar_; }

    /// K e for vector e; scalar gains scale elementwise.
    Vector apply(const Vector& e) const;

    /// Dense matrix form of the gain for a given error dimension.
    Matrix dense(Eigen::Index dim) const;

private:
    Gain() = default;
    std::optional<double> scalar_;
    Matrix matrix_;
};

struct GainSpec {
    Gain km = Gain::scalar(1.0);   // manipulability gain (Mandel space)
    double kx = 1.0;               // positional gain, 1/s
    Gain kp = Gain::scalar(1.0);   // acceleration controller stiffness
    Gain kd = Gain::scalar(1.0);   // acceleration controller damping
};

struct TrackingDiagnostics {
    double distance = 0.0;     // geodesic distance d(M, Mhat)
    double error_norm = 0.0;   // Mandel norm of the tangent error
    int jacobian_rank = 0;     // rank of the mode-3 manipulability Jacobian
};

struct TrackingCommand {
    Vector command;  // qdot (velocity controllers) or qddot (acceleration)
    TrackingDiagnostics diag;
};

/// SVD pseudoinverse. Singular values below rel_tol * sigma_max are dropped;
/// damping > 0 replaces 1/sigma with sigma / (sigma^2 + damping^2).
Matrix damped_pinv(const Matrix& a, double rel_tol = 1e-8, double damping = 0.0);

/// Mode-3 Mandel matricization of the manipulability Jacobian (n x Dtilde):
/// row k is the Mandel vector of the k-th frontal slice.
Matrix manipulability_jacobian_mandel(const PlanarChain& chain, const Vector& q,
                                      const ManipKind& kind);

/// qdot = (J3 dag)' K_M vec(Log_M(Mhat)); manipulability tracking as the
/// main task. Zero command exactly when M(q) equals the target.
TrackingCommand velocity_track_main(const PlanarChain& chain, const Vector& q,
                                    const SpdMatrix& target, const GainSpec& gains,
                                    const ManipKind& kind, double damping = 0.0);

/// Positional main task plus manipulability tracking projected into the
/// task-Jacobian nullspace.
TrackingCommand velocity_track_redundant(const PlanarChain& chain, const Vector& q,
                                         const Eigen::Vector2d& x_target, const SpdMatrix& m_target,
                                         const GainSpec& gains, const ManipKind& kind,
                                         double damping = 0.0);

/// Acceleration-level tracking: qddot = (J3 dag)' (vec(Mddot_ref) - J3dot' qdot)
/// with a proportional-derivative reference in the tangent space.
/// nullspace_damping > 0 adds -k (I - (J3 dag)' J3') qdot, which dissipates
/// internal joint motion without changing the ellipsoid dynamics (the added
/// term lies in the kernel of J3'); the bare law leaves that motion undamped
/// and a step response then stalls short of the target.
TrackingCommand accel_track(const PlanarChain& chain, const Vector& q, const Vector& qdot,
                            const SpdMatrix& m_target, const Matrix& mdot_target,
                            const GainSpec& gains, const ManipKind& kind, double damping = 0.0,
                            double nullspace_damping = 0.0);

/// Manipulability tracking as main task plus a secondary joint velocity
/// projected into the nullspace of the manipulability Jacobian.
TrackingCommand nullspace_secondary(const PlanarChain& chain, const Vector& q,
                                    const SpdMatrix& m_target, const GainSpec& gains,
                                    const Vector& qdot_secondary, const ManipKind& kind,
                                    double damping = 0.0);

/// K_M from a precision tensor: invert the Mandel unfolding of the covariance,
/// normalize the trace to kappa * Dtilde, keep the full matrix or its diagonal.
enum class GainMode { Diagonal, Full };
Matrix gain_from_precision(const DenseTensor4& cov, double kappa, GainMode mode,
                           double regularization = 1e-8);

enum class BaselineMethod { Euclidean, Cholesky, CholeskyJacobian, SteinGradient };

/// Comparison controllers that ignore (fully or partly) the manifold
/// structure. SteinGradient returns the negative-gradient joint velocity
/// scaled by alpha, intended for nullspace use.
TrackingCommand baseline_track(BaselineMethod method, const PlanarChain& chain, const Vector& q,
                               const SpdMatrix& m_target, const GainSpec& gains, double alpha = 1.0,
                               double damping = 0.0);

enum class IndexObjective { Volume, Compatibility };

/// Joint-space gradient of the manipulability volume sqrt(det(J J')) or of
/// the velocity compatibility index (u' (J J')^-1 u)^-1 along direction u.
Vector index_gradient(IndexObjective objective, const PlanarChain& chain, const Vector& q,
                      const std::optional<Eigen::Vector2d>& direction = std::nullopt);

/// Stein divergence cost log det((A+B)/2) - 0.5 log det(A B).
double stein_divergence(const Matrix& a, const Matrix& b);

}  // namespace manip
