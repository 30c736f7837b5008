#include "manip/tracking.hpp"

#include <cmath>

namespace manip {

namespace {

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Lower-triangle stacking for Cholesky-space vectors: diagonal first, then
// the subdiagonal entries column by column (no scaling).
Vector vec_lower(const Matrix& l) {
    const Eigen::Index d = l.rows();
    Vector v(mandel_dim(d));
    for (Eigen::Index i = 0; i < d; ++i) v(i) = l(i, i);
    Eigen::Index r = d;
    for (Eigen::Index j = 0; j < d - 1; ++j)
        for (Eigen::Index i = j + 1; i < d; ++i) v(r++) = l(i, j);
    return v;
}

// Forward-mode derivative of the Cholesky factor: given M = L L' and a
// symmetric direction Mdot, returns Ldot = L Phi(L^-1 Mdot L^-T) where Phi
// keeps the lower triangle and halves the diagonal.
Matrix chol_forward(const Matrix& l, const Matrix& mdot) {
    const Matrix linv = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(l.rows(), l.cols()));
    const Matrix a = linv * mdot * linv.transpose();
    Matrix phi = a.triangularView<Eigen::StrictlyLower>();
    phi += (0.5 * a.diagonal()).asDiagonal();
    return l * phi;
}

int rank_of(const Matrix& a, double rel_tol) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

TrackingDiagnostics make_diag(const SpdMatrix& current, const SpdMatrix& target,
                              const Vector& err, const Matrix& j3) {
    TrackingDiagnostics d;
    d.distance = distance(current.matrix() == target.matrix() ? target : current, target);
    d.error_norm = err.norm();
    d.jacobian_rank = rank_of(j3, 1e-8);
    return d;
}

// Mandel tangent error vec(Log_M(Mhat)); exact zero on exact coincidence.
Vector tangent_error(const SpdMatrix& current, const SpdMatrix& target) {
    if (current.matrix() == target.matrix()) return Vector::Zero(mandel_dim(current.dim()));
    return mandel_vec(log_map(current, target));
}

Vector gained_pinv_apply(const Matrix& pinv_t, const Gain& gain, const Vector& err) {
    if (gain.is_scalar()) return gain.scalar_value() * (pinv_t * err);
    return pinv_t * gain.apply(err);
}

}  // namespace

Gain Gain::scalar(double k) {
    if (k < 0.0) throw DomainError("Gain: scalar gain must be nonnegative");
    Gain g;
    g.scalar_ = k;
    return g;
}

Gain Gain::diagonal(const Vector& d) {
    if (d.minCoeff() < 0.0) throw DomainError("Gain: diagonal gain must be nonnegative");
    Gain g;
    g.matrix_ = d.asDiagonal();
    return g;
}

Gain Gain::full(const Matrix& m) {
    require_symmetric(m, 1e-10, "gain matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(m), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()))
        throw DomainError("Gain: matrix gain must be PSD");
    Gain g;
    g.matrix_ = sym(m);
    return g;
}

Vector Gain::apply(const Vector& e) const {
    if (scalar_) return *scalar_ * e;
    if (matrix_.rows() != e.size()) throw ShapeError("Gain: dimension mismatch");
    return matrix_ * e;
}

Matrix Gain::dense(Eigen::Index dim) const {
    if (scalar_) return *scalar_ * Matrix::Identity(dim, dim);
    if (matrix_.rows() != dim) throw ShapeError("Gain: dimension mismatch");
    return matrix_;
}

Matrix damped_pinv(const Matrix& a, double rel_tol, double damping) {
    if (!a.allFinite()) throw DomainError("damped_pinv: non-finite matrix");
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    Vector inv = Vector::Zero(s.size());
    const double cutoff = s.size() > 0 ? rel_tol * s(0) : 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) <= cutoff) continue;
        inv(i) = damping > 0.0 ? s(i) / (s(i) * s(i) + damping * damping) : 1.0 / s(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix manipulability_jacobian_mandel(const PlanarChain& chain, const Vector& q,
                                      const ManipKind& kind) {
    return mandel_matricize3(manipulability_jacobian(chain, q, kind));
}

TrackingCommand velocity_track_main(const PlanarChain& chain, const Vector& q,
                                    const SpdMatrix& target, const GainSpec& gains,
                                    const ManipKind& kind, double damping) {
    const Ellipsoid current = manipulability(chain, q, kind);
    const Matrix j3 = manipulability_jacobian_mandel(chain, q, kind);
    const Vector err = tangent_error(current.matrix, target);
    const Matrix pinv_t = damped_pinv(j3, 1e-8, damping).transpose();

    TrackingCommand cmd;
    cmd.command = gained_pinv_apply(pinv_t, gains.km, err);
    cmd.diag = make_diag(current.matrix, target, err, j3);
    return cmd;
}

TrackingCommand velocity_track_redundant(const PlanarChain& chain, const Vector& q,
                                         const Eigen::Vector2d& x_target, const SpdMatrix& m_target,
                                         const GainSpec& gains, const ManipKind& kind,
                                         double damping) {
    const int n = chain.dof();
    const Matrix jp = planar_jacobian(chain, q);
    const Matrix jp_pinv = damped_pinv(jp, 1e-8, damping);
    const PlanarPose pose = fk(chain, q);

    const Ellipsoid current = manipulability(chain, q, kind);
    const Matrix j3 = manipulability_jacobian_mandel(chain, q, kind);
    const Vector err = tangent_error(current.matrix, m_target);
    const Matrix pinv_t = damped_pinv(j3, 1e-8, damping).transpose();

    const Eigen::Vector2d dx(x_target(0) - pose.x1, x_target(1) - pose.x2);
    const Matrix null_proj = Matrix::Identity(n, n) - jp_pinv * jp;

    TrackingCommand cmd;
    cmd.command = jp_pinv * (gains.kx * dx) + null_proj * gained_pinv_apply(pinv_t, gains.km, err);
    cmd.diag = make_diag(current.matrix, m_target, err, j3);
    return cmd;
}

TrackingCommand accel_track(const PlanarChain& chain, const Vector& q, const Vector& qdot,
                            const SpdMatrix& m_target, const Matrix& mdot_target,
                            const GainSpec& gains, const ManipKind& kind, double damping,
                            double nullspace_damping) {
    require_symmetric(mdot_target, 1e-10, "target ellipsoid rate");
    const Ellipsoid current = manipulability(chain, q, kind);
    const Matrix j3 = manipulability_jacobian_mandel(chain, q, kind);
    const Matrix j3dot = mandel_matricize3(manipulability_jacobian_dt(chain, q, qdot, kind));

    const Vector err = tangent_error(current.matrix, m_target);
    const Matrix mdot = manipulability_rate(chain, q, qdot, kind);
    const Vector rate_err = mandel_vec(mdot_target - mdot);

    const Vector ref = gains.kp.apply(err) + gains.kd.apply(rate_err);
    const Matrix pinv_t = damped_pinv(j3, 1e-8, damping).transpose();

    TrackingCommand cmd;
    cmd.command = pinv_t * (ref - j3dot.transpose() * qdot);
    if (nullspace_damping > 0.0) {
        const int n = chain.dof();
        cmd.command -=
            nullspace_damping * ((Matrix::Identity(n, n) - pinv_t * j3.transpose()) * qdot);
    }
    cmd.diag = make_diag(current.matrix, m_target, err, j3);
    return cmd;
}

TrackingCommand nullspace_secondary(const PlanarChain& chain, const Vector& q,
                                    const SpdMatrix& m_target, const GainSpec& gains,
                                    const Vector& qdot_secondary, const ManipKind& kind,
                                    double damping) {
    const int n = chain.dof();
    if (qdot_secondary.size() != n) throw ShapeError("nullspace_secondary: qdot_N length mismatch");
    const Ellipsoid current = manipulability(chain, q, kind);
    const Matrix j3 = manipulability_jacobian_mandel(chain, q, kind);
    const Vector err = tangent_error(current.matrix, m_target);
    const Matrix pinv_t = damped_pinv(j3, 1e-8, damping).transpose();
    const Matrix null_proj = Matrix::Identity(n, n) - pinv_t * j3.transpose();

    TrackingCommand cmd;
    cmd.command = gained_pinv_apply(pinv_t, gains.km, err) + null_proj * qdot_secondary;
    cmd.diag = make_diag(current.matrix, m_target, err, j3);
    return cmd;
}

Matrix gain_from_precision(const DenseTensor4& cov, double kappa, GainMode mode,
                           double regularization) {
    if (!is_covariance_tensor(cov)) throw DomainError("gain_from_precision: invalid covariance tensor");
    Matrix u = mandel_unfold(cov);
    u = sym(u) + regularization * Matrix::Identity(u.rows(), u.cols());
    Eigen::SelfAdjointEigenSolver<Matrix> es(u);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw DomainError("gain_from_precision: precision is singular after regularization");
    Matrix precision = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
    precision = sym(precision);
    if (mode == GainMode::Diagonal) precision = Matrix(precision.diagonal().asDiagonal());
    const double tr = precision.trace();
    if (tr <= 0.0) throw DomainError("gain_from_precision: nonpositive trace");
    return precision * (kappa * static_cast<double>(u.rows()) / tr);
}

double stein_divergence(const Matrix& a, const Matrix& b) {
    const Matrix mid = 0.5 * (a + b);
    return std::log(mid.determinant()) - 0.5 * std::log(a.determinant() * b.determinant());
}

TrackingCommand baseline_track(BaselineMethod method, const PlanarChain& chain, const Vector& q,
                               const SpdMatrix& m_target, const GainSpec& gains, double alpha,
                               double damping) {
    const Ellipsoid current = manipulability(chain, q, {ManipType::Velocity, false});
    const Matrix m = current.matrix.matrix();
    const Matrix mhat = m_target.matrix();
    const DenseTensor3 mj = manipulability_jacobian(chain, q, {ManipType::Velocity, false});
    const Matrix j3 = mandel_matricize3(mj);

    TrackingCommand cmd;
    switch (method) {
        case BaselineMethod::Euclidean: {
            const Vector err = mandel_vec(mhat - m);
            cmd.command = gained_pinv_apply(damped_pinv(j3, 1e-8, damping).transpose(), gains.km, err);
            cmd.diag = make_diag(current.matrix, m_target, err, j3);
            return cmd;
        }
        case BaselineMethod::Cholesky: {
            const Matrix l = m.llt().matrixL();
            const Matrix lhat = mhat.llt().matrixL();
            const Matrix dl = lhat - l;
            const Vector err = mandel_vec(sym(dl * dl.transpose()));
            cmd.command = gained_pinv_apply(damped_pinv(j3, 1e-8, damping).transpose(), gains.km, err);
            cmd.diag = make_diag(current.matrix, m_target, err, j3);
            return cmd;
        }
        case BaselineMethod::CholeskyJacobian: {
            const Matrix l = m.llt().matrixL();
            const Matrix lhat = mhat.llt().matrixL();
            const int n = chain.dof();
            Matrix jchol3(n, mandel_dim(2));
            for (int k = 0; k < n; ++k)
                jchol3.row(k) = vec_lower(chol_forward(l, mj.slice(k))).transpose();
            const Vector err = vec_lower(lhat - l);
            cmd.command =
                gained_pinv_apply(damped_pinv(jchol3, 1e-8, damping).transpose(), gains.km, err);
            cmd.diag = make_diag(current.matrix, m_target, err, jchol3);
            return cmd;
        }
        case BaselineMethod::SteinGradient: {
            const int n = chain.dof();
            Vector grad = Vector::Zero(n);
            if (m != mhat) {
                const Matrix mid_inv = sym(Matrix(0.5 * (m + mhat)).inverse());
                const Matrix m_inv = current.matrix.inverse();
                for (int k = 0; k < n; ++k)
                    grad(k) =
                        0.5 * (mid_inv * mj.slice(k)).trace() - 0.5 * (m_inv * mj.slice(k)).trace();
            }
            cmd.command = -alpha * grad;
            cmd.diag = make_diag(current.matrix, m_target, mandel_vec(log_map(current.matrix, m_target)), j3);
            return cmd;
        }
    }
    throw DomainError("baseline_track: unknown method");
}

Vector index_gradient(IndexObjective objective, const PlanarChain& chain, const Vector& q,
                      const std::optional<Eigen::Vector2d>& direction) {
    const int n = chain.dof();
    const Matrix jp = planar_jacobian(chain, q);
    const Matrix m = sym(jp * jp.transpose());
    const DenseTensor3 mj = manipulability_jacobian(chain, q, {ManipType::Velocity, false});

    Vector grad(n);
    if (objective == IndexObjective::Volume) {
        const double det = m.determinant();
        if (det <= 0.0) throw SingularConfigError("index_gradient: singular configuration");
        const double w = std::sqrt(det);
        const Matrix m_inv = m.inverse();
        for (int k = 0; k < n; ++k) grad(k) = w * 0.5 * (m_inv * mj.slice(k)).trace();
        return grad;
    }

    if (!direction) throw DomainError("index_gradient: compatibility needs a direction");
    Eigen::Vector2d u = *direction;
    const double un = u.norm();
    if (un == 0.0) throw DomainError("index_gradient: zero direction");
    u /= un;

    Eigen::JacobiSVD<Matrix> svd(jp);
    if (svd.singularValues()(1) < kSingularTol * svd.singularValues()(0))
        throw SingularConfigError("index_gradient: singular configuration");

    const Matrix m_inv = m.inverse();
    const double denom = u.dot(m_inv * u);
    const double c = 1.0 / denom;
    for (int k = 0; k < n; ++k) grad(k) = c * c * u.dot(m_inv * mj.slice(k) * m_inv * u);
    return grad;
}

}  // namespace manip
