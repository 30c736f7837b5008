#include "manip/batch.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace manip::batch {

namespace {

template <typename Fn>
void for_each_index(Eigen::Index n, Exec exec, Fn&& fn) {
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (Eigen::Index i = 0; i < n; ++i) fn(i);
    } else {
        for (Eigen::Index i = 0; i < n; ++i) fn(i);
    }
}

}  // namespace

Matrix tangent_coordinates(const SpdMatrix& base, const std::vector<SpdMatrix>& points, Exec exec) {
    const Eigen::Index n = static_cast<Eigen::Index>(points.size());
    Matrix out(n, mandel_dim(base.dim()));
    for_each_index(n, exec, [&](Eigen::Index i) {
        out.row(i) = mandel_vec(log_map(base, points[static_cast<std::size_t>(i)])).transpose();
    });
    return out;
}

Vector distances_to(const SpdMatrix& ref, const std::vector<SpdMatrix>& points, Exec exec) {
    const Eigen::Index n = static_cast<Eigen::Index>(points.size());
    Vector out(n);
    for_each_index(n, exec, [&](Eigen::Index i) {
        out(i) = distance(ref, points[static_cast<std::size_t>(i)]);
    });
    return out;
}

SpdMatrix karcher_mean(const std::vector<SpdMatrix>& points, const Vector& weights,
                       const KarcherOptions& opts, Exec exec) {
    if (points.empty()) throw DataError("karcher_mean: no points");
    if (weights.size() != static_cast<Eigen::Index>(points.size()))
        throw ShapeError("karcher_mean: weight count mismatch");

    Eigen::Index start = 0;
    weights.maxCoeff(&start);
    SpdMatrix mu = points[static_cast<std::size_t>(start)];

    double residual = 0.0;
    for (int it = 0; it < opts.max_iters; ++it) {
        const Matrix coords = tangent_coordinates(mu, points, exec);
        Vector step_vec = Vector::Zero(coords.cols());
        for (Eigen::Index i = 0; i < coords.rows(); ++i) step_vec += weights(i) * coords.row(i).transpose();
        residual = step_vec.norm();
        if (residual < opts.tol) return mu;
        mu = exp_map(mu, mandel_fold(step_vec));
    }
    throw ConvergenceError("karcher_mean: no convergence after max iterations", residual);
}

}  // namespace manip::batch
