#include "manip/spd.hpp"

#include <cmath>

namespace manip {

namespace {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Applies a scalar function to the eigenvalues of a symmetric matrix.
Matrix eig_apply(const Matrix& sym, double (*fn)(double)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    Vector d = es.eigenvalues();
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = fn(d(i));
    return symmetrize(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
}

Matrix sym_exp(const Matrix& sym) { return eig_apply(sym, [](double x) { return std::exp(x); }); }

}  // namespace

void require_symmetric(const Matrix& m, double tol, const char* what) {
    if (m.rows() != m.cols()) throw ShapeError(std::string(what) + " must be square");
    if (!m.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale)
        throw DomainError(std::string(what) + " is not symmetric");
}

SpdMatrix::SpdMatrix(const Matrix& m) {
    require_symmetric(m, 1e-12, "SPD matrix");
    m_ = symmetrize(m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > kSpdEigFloor * std::max(hi, 0.0)) || hi <= 0.0)
        throw DomainError("matrix is not positive definite (min eig " + std::to_string(lo) + ")");
}

Matrix SpdMatrix::sqrt() const { return eig_apply(m_, [](double x) { return std::sqrt(x); }); }

Matrix SpdMatrix::inv_sqrt() const {
    return eig_apply(m_, [](double x) { return 1.0 / std::sqrt(x); });
}

Matrix SpdMatrix::inverse() const { return eig_apply(m_, [](double x) { return 1.0 / x; }); }

Matrix SpdMatrix::log() const { return eig_apply(m_, [](double x) { return std::log(x); }); }

SpdMatrix nearest_spd(const Matrix& m) {
    if (m.rows() != m.cols()) throw ShapeError("nearest_spd: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
    Vector d = es.eigenvalues();
    const double hi = std::max(d.maxCoeff(), 0.0);
    const double floor = std::max(hi * kSpdEigFloor * 10.0, 1e-300);
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = std::max(d(i), floor);
    return SpdMatrix(symmetrize(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose()));
}

SpdMatrix exp_map(const SpdMatrix& base, const Matrix& tangent) {
    require_symmetric(tangent, 1e-12, "tangent matrix");
    const Matrix s = base.sqrt();
    const Matrix si = base.inv_sqrt();
    return SpdMatrix(symmetrize(s * sym_exp(symmetrize(si * tangent * si)) * s));
}

Matrix log_map(const SpdMatrix& base, const SpdMatrix& target) {
    if (base.dim() != target.dim()) throw ShapeError("log_map: dimension mismatch");
    if (base.matrix() == target.matrix()) return Matrix::Zero(base.dim(), base.dim());
    const Matrix s = base.sqrt();
    const Matrix si = base.inv_sqrt();
    const SpdMatrix inner(symmetrize(si * target.matrix() * si));
    return symmetrize(s * inner.log() * s);
}

double distance(const SpdMatrix& a, const SpdMatrix& b) {
    if (a.dim() != b.dim()) throw ShapeError("distance: dimension mismatch");
    if (a.matrix() == b.matrix()) return 0.0;
    const Matrix si = b.inv_sqrt();
    const SpdMatrix inner(symmetrize(si * a.matrix() * si));
    return inner.log().norm();
}

double inner_product(const SpdMatrix& base, const Matrix& t1, const Matrix& t2) {
    if (t1.rows() != base.dim() || t2.rows() != base.dim() || t1.cols() != base.dim() ||
        t2.cols() != base.dim())
        throw ShapeError("inner_product: dimension mismatch");
    const Matrix inv = base.inverse();
    return (inv * t1 * inv * t2).trace();
}

namespace {

// Parallel transport along the connecting geodesic: A = (to from^-1)^1/2,
// computed as from^1/2 (from^-1/2 to from^-1/2)^1/2 from^-1/2. Any congruence
// mapping `from` to `to` is an isometry, but only this one also carries the
// geodesic's own tangent, which Gaussian conditioning on the manifold relies
// on when extrapolating.
Matrix transport_factor(const SpdMatrix& from, const SpdMatrix& to) {
    const Matrix s = from.sqrt();
    const Matrix si = from.inv_sqrt();
    const SpdMatrix inner(symmetrize(si * to.matrix() * si));
    return s * inner.sqrt() * si;
}

}  // namespace

Matrix transport_sym(const SpdMatrix& from, const SpdMatrix& to, const Matrix& tangent) {
    if (from.dim() != to.dim()) throw ShapeError("transport_sym: dimension mismatch");
    require_symmetric(tangent, 1e-12, "tangent matrix");
    const Matrix a = transport_factor(from, to);
    return symmetrize(a * tangent * a.transpose());
}

Matrix transport_mandel_matrix(const SpdMatrix& from, const SpdMatrix& to) {
    const Matrix a = transport_factor(from, to);
    const Eigen::Index d = from.dim();
    const Eigen::Index dt = mandel_dim(d);
    Matrix g(dt, dt);
    for (Eigen::Index k = 0; k < dt; ++k) {
        const Matrix e = mandel_basis(d, k);
        g.col(k) = mandel_vec(symmetrize(a * e * a.transpose()));
    }
    return g;
}

DenseTensor4 transport_cov4(const SpdMatrix& from, const SpdMatrix& to, const DenseTensor4& cov) {
    const Eigen::Index d = from.dim();
    if (cov.dim(0) != d) throw ShapeError("transport_cov4: dimension mismatch");
    const Matrix u = mandel_unfold(cov);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (u + u.transpose()));
    const Vector lambda = es.eigenvalues();
    const double hi = std::max(lambda.cwiseAbs().maxCoeff(), 1.0);
    if (lambda.minCoeff() < -1e-10 * hi)
        throw DomainError("transport_cov4: covariance unfolding is not PSD");

    DenseTensor4 out(d, d, d, d);
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        const double lk = std::max(lambda(k), 0.0);
        if (lk == 0.0) continue;
        const Matrix vk = mandel_fold(es.eigenvectors().col(k));
        const Matrix tvk = transport_sym(from, to, vk);
        DenseTensor4 term = outer(tvk, tvk);
        term *= lk;
        out += term;
    }
    return out;
}

SpdMatrix karcher_mean(const std::vector<SpdMatrix>& points, const Vector& weights,
                       const KarcherOptions& opts) {
    if (points.empty()) throw DataError("karcher_mean: no points");
    if (weights.size() != static_cast<Eigen::Index>(points.size()))
        throw ShapeError("karcher_mean: weight count mismatch");
    if (std::abs(weights.sum() - 1.0) > 1e-8 || weights.minCoeff() < -1e-12)
        throw DomainError("karcher_mean: weights must be nonnegative and sum to 1");

    Eigen::Index start = 0;
    weights.maxCoeff(&start);
    SpdMatrix mu = points[static_cast<std::size_t>(start)];

    double residual = 0.0;
    for (int it = 0; it < opts.max_iters; ++it) {
        Matrix step = Matrix::Zero(mu.dim(), mu.dim());
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double w = weights(static_cast<Eigen::Index>(i));
            if (w == 0.0) continue;
            step += w * log_map(mu, points[i]);
        }
        residual = step.norm();
        if (residual < opts.tol) return mu;
        mu = exp_map(mu, step);
    }
    throw ConvergenceError("karcher_mean: no convergence after max iterations", residual);
}

SpdMatrix karcher_mean(const std::vector<SpdMatrix>& points, const KarcherOptions& opts) {
    const Eigen::Index n = static_cast<Eigen::Index>(points.size());
    return karcher_mean(points, Vector::Constant(n, 1.0 / static_cast<double>(n)), opts);
}

}  // namespace manip
