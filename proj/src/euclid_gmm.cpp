#include "manip/euclid_gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "manip/errors.hpp"

namespace manip {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

double gauss_log_pdf(const Vector& x, const Vector& mean, const Matrix& cov) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw DomainError("EuclideanGmm: singular covariance");
    double log_det = 0.0;
    const Matrix l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    const Vector d = x - mean;
    return -0.5 * (static_cast<double>(d.size()) * kLogTwoPi + log_det + d.dot(llt.solve(d)));
}

}  // namespace

EuclideanGmm EuclideanGmm::fit(const Matrix& rows, int k, double regularization, int max_iters,
                               double tol) {
    const Eigen::Index n = rows.rows();
    const Eigen::Index dim = rows.cols();
    if (k < 1) throw DomainError("EuclideanGmm: k must be at least 1");
    if (n < 2 * k) throw DataError("EuclideanGmm: need at least 2K rows");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return rows(a, 0) < rows(b, 0); });

    EuclideanGmm gmm;
    const Matrix reg = regularization * Matrix::Identity(dim, dim);
    for (int b = 0; b < k; ++b) {
        const Eigen::Index lo = n * b / k;
        const Eigen::Index hi = n * (b + 1) / k;
        Vector mean = Vector::Zero(dim);
        for (Eigen::Index i = lo; i < hi; ++i) mean += rows.row(order[static_cast<std::size_t>(i)]).transpose();
        mean /= static_cast<double>(hi - lo);
        Matrix cov = Matrix::Zero(dim, dim);
        for (Eigen::Index i = lo; i < hi; ++i) {
            const Vector d = rows.row(order[static_cast<std::size_t>(i)]).transpose() - mean;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(hi - lo);
        gmm.priors.push_back(static_cast<double>(hi - lo) / static_cast<double>(n));
        gmm.means.push_back(mean);
        gmm.covs.push_back(cov + reg);
    }

    double prev_ll = -std::numeric_limits<double>::infinity();
    Matrix resp(n, k);
    for (int iter = 0; iter < max_iters; ++iter) {
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Vector lp(k);
            for (int c = 0; c < k; ++c)
                lp(c) = std::log(gmm.priors[static_cast<std::size_t>(c)]) +
                        gauss_log_pdf(rows.row(i).transpose(), gmm.means[static_cast<std::size_t>(c)],
                                      gmm.covs[static_cast<std::size_t>(c)]);
            const double m = lp.maxCoeff();
            double acc = 0.0;
            for (int c = 0; c < k; ++c) acc += std::exp(lp(c) - m);
            const double lse = m + std::log(acc);
            ll += lse;
            for (int c = 0; c < k; ++c) resp(i, c) = std::exp(lp(c) - lse);
        }
        if (ll - prev_ll < tol && iter > 0) break;
        prev_ll = ll;

        for (int c = 0; c < k; ++c) {
            const double nk = resp.col(c).sum();
            if (nk < 1e-12) continue;
            Vector mean = Vector::Zero(dim);
            for (Eigen::Index i = 0; i < n; ++i) mean += resp(i, c) * rows.row(i).transpose();
            mean /= nk;
            Matrix cov = Matrix::Zero(dim, dim);
            for (Eigen::Index i = 0; i < n; ++i) {
                const Vector d = rows.row(i).transpose() - mean;
                cov += resp(i, c) * (d * d.transpose());
            }
            cov /= nk;
            gmm.priors[static_cast<std::size_t>(c)] = nk / static_cast<double>(n);
            gmm.means[static_cast<std::size_t>(c)] = mean;
            gmm.covs[static_cast<std::size_t>(c)] = cov + reg;
        }
    }
    return gmm;
}

std::pair<Vector, Matrix> EuclideanGmm::condition(const Vector& input, Eigen::Index d_in) const {
    const Eigen::Index dim_total = dim();
    const Eigen::Index d_out = dim_total - d_in;
    const int kk = k();

    Vector log_h(kk);
    for (int c = 0; c < kk; ++c) {
        const auto idx = static_cast<std::size_t>(c);
        log_h(c) = std::log(priors[idx]) +
                   gauss_log_pdf(input, means[idx].head(d_in), covs[idx].topLeftCorner(d_in, d_in));
    }
    const double m = log_h.maxCoeff();
    double acc = 0.0;
    for (int c = 0; c < kk; ++c) acc += std::exp(log_h(c) - m);
    const double lse = m + std::log(acc);

    Vector mean = Vector::Zero(d_out);
    Matrix cov = Matrix::Zero(d_out, d_out);
    std::vector<Vector> cond_means(static_cast<std::size_t>(kk));
    Vector h(kk);
    for (int c = 0; c < kk; ++c) {
        const auto idx = static_cast<std::size_t>(c);
        h(c) = std::exp(log_h(c) - lse);
        const Matrix cii = covs[idx].topLeftCorner(d_in, d_in);
        const Matrix coi = covs[idx].bottomLeftCorner(d_out, d_in);
        cond_means[idx] = means[idx].tail(d_out) + coi * cii.ldlt().solve(input - means[idx].head(d_in));
        mean += h(c) * cond_means[idx];
    }
    for (int c = 0; c < kk; ++c) {
        const auto idx = static_cast<std::size_t>(c);
        const Matrix cii = covs[idx].topLeftCorner(d_in, d_in);
        const Matrix coi = covs[idx].bottomLeftCorner(d_out, d_in);
        const Matrix coo = covs[idx].bottomRightCorner(d_out, d_out);
        const Matrix schur = coo - coi * cii.ldlt().solve(coi.transpose());
        const Vector d = cond_means[idx] - mean;
        cov += h(c) * (schur + d * d.transpose());
    }
    return {mean, cov};
}

}  // namespace manip
