#pragma once

#include <vector>

#include "manip/tensor.hpp"

namespace manip {

/// Plain Euclidean Gaussian mixture over row vectors, used internally for
/// time-driven Cartesian references. Deterministic k-bins initialization
/// followed by EM, mirroring the SPD mixture.
struct EuclideanGmm {
    std::vector<double> priors;
    std::vector<Vector> means;
    std::vector<Matrix> covs;

    int k() const { return static_cast<int>(priors.size()); }
    Eigen::Index dim() const { return means.empty() ? 0 : means.front().size(); }

    static EuclideanGmm fit(const Matrix& rows, int k, double regularization = 1e-8,
                            int max_iters = 100, double tol = 1e-8);

    /// Conditional mean and covariance of the trailing block given the first
    /// d_in coordinates.
    std::pair<Vector, Matrix> condition(const Vector& input, Eigen::Index d_in) const;
};

}  // namespace manip
