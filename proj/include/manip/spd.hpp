#pragma once

#include <vector>

#include "manip/tensor.hpp"

namespace manip {

/// Symmetric positive definite matrix with the affine-invariant metric.
///
/// Construction validates symmetry (to 1e-12 relative) and positive
/// definiteness: the smallest eigenvalue must exceed 1e-12 times the largest.
/// Use nearest_spd() to ingest noisy data that may sit on the boundary.
class SpdMatrix {
public:
    explicit SpdMatrix(const Matrix& m);

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    /// Principal matrix square root.
    Matrix sqrt() const;
    /// Inverse of the principal square root.
    Matrix inv_sqrt() const;
    Matrix inverse() const;
    /// Principal matrix logarithm.
    Matrix log() const;

    static SpdMatrix identity(Eigen::Index d) { return SpdMatrix(Matrix::Identity(d, d)); }

private:
    Matrix m_;
};

/// Relative eigenvalue floor below which a matrix is rejected as non-SPD.
inline constexpr double kSpdEigFloor = 1e-12;

/// Clamps eigenvalues up to the SPD floor; for ingesting noisy ellipsoids.
SpdMatrix nearest_spd(const Matrix& m);

/// Throws DomainError unless m is symmetric within tol (relative).
void require_symmetric(const Matrix& m, double tol = 1e-12, const char* what = "matrix");

/// Exp_base(L) = base^1/2 exp(base^-1/2 L base^-1/2) base^1/2.
SpdMatrix exp_map(const SpdMatrix& base, const Matrix& tangent);

/// Log_base(target) = base^1/2 log(base^-1/2 target base^-1/2) base^1/2.
Matrix log_map(const SpdMatrix& base, const SpdMatrix& target);

/// Affine-invariant distance || log(base^-1/2 a base^-1/2) ||_F.
double distance(const SpdMatrix& a, const SpdMatrix& b);

/// Riemannian inner product tr(S^-1/2 T1 S^-1 T2 S^-1/2) at base S.
double inner_product(const SpdMatrix& base, const Matrix& t1, const Matrix& t2);

/// Parallel transport of a symmetric tangent matrix: A T A' with
/// A = to^1/2 from^-1/2.
Matrix transport_sym(const SpdMatrix& from, const SpdMatrix& to, const Matrix& tangent);

/// Parallel transport of a 4th-order covariance tensor via its eigentensors:
/// the Mandel unfolding is eigendecomposed, each eigentensor transported with
/// transport_sym, and the tensor reassembled as sum_k lambda_k Vt_k o Vt_k.
DenseTensor4 transport_cov4(const SpdMatrix& from, const SpdMatrix& to, const DenseTensor4& cov);

/// Dtilde x Dtilde matrix of the transport congruence in Mandel coordinates,
/// i.e. the linear map vec(T) -> vec(A T A') with A = to^1/2 from^-1/2.
Matrix transport_mandel_matrix(const SpdMatrix& from, const SpdMatrix& to);

struct KarcherOptions {
    double tol = 1e-8;
    int max_iters = 100;
};

/// Weighted Karcher (Frechet) mean: fixed point of
/// mu <- Exp_mu(sum_i w_i Log_mu(X_i)). Weights must be nonnegative and sum
/// to 1. Throws ConvergenceError with the residual if the cap is hit.
SpdMatrix karcher_mean(const std::vector<SpdMatrix>& points, const Vector& weights,
                       const KarcherOptions& opts = {});

/// Equal-weight convenience overload.
SpdMatrix karcher_mean(const std::vector<SpdMatrix>& points, const KarcherOptions& opts = {});

}  // namespace manip
