#pragma once

#include <string>
#include <vector>

#include "manip/batch.hpp"
#include "manip/spd.hpp"

namespace manip {

/// One observation: a Euclidean input (typically time, seconds) paired with
/// an SPD output (an ellipsoid, task units squared).
struct SpdDatapoint {
    Vector input;
    SpdMatrix output;
};

/// One mixture component. The joint covariance is stored over the
/// concatenated (input, Mandel-output) coordinates as a symmetric PSD matrix
/// of size d_in + Dtilde; the 4th-order tensor form is only materialized at
/// the regression output boundary.
struct GmmSpdComponent {
    double prior = 0.0;
    Vector mean_in;
    SpdMatrix mean_out;
    Matrix cov;

    Eigen::Index d_in() const { return mean_in.size(); }
    Eigen::Index d_out() const { return mean_out.dim(); }
    Eigen::Index joint_dim() const { return d_in() + mandel_dim(d_out()); }

    Matrix cov_ii() const { return cov.topLeftCorner(d_in(), d_in()); }
    Matrix cov_io() const { return cov.topRightCorner(d_in(), cov.rows() - d_in()); }
    Matrix cov_oi() const { return cov.bottomLeftCorner(cov.rows() - d_in(), d_in()); }
    Matrix cov_oo() const { return cov.bottomRightCorner(cov.rows() - d_in(), cov.rows() - d_in()); }
};

/// Mixture of tangent-space normal distributions over (input, SPD output)
/// pairs. Immutable after fitting.
struct GmmSpdModel {
    int d_in = 1;
    int d_out = 2;
    std::vector<GmmSpdComponent> components;
    std::vector<double> loglik_history;

    int k() const { return static_cast<int>(components.size()); }
    void validate() const;
};

/// Log density of a datapoint under one component: the exponent lives in the
/// tangent space of the component output mean, the input block is Euclidean.
double log_pdf(const SpdDatapoint& point, const GmmSpdComponent& comp);

struct EmOptions {
    int max_iters = 200;
    double tol = 1e-6;            // stop when the log-likelihood gain drops below
    double regularization = 1e-6; // added to the joint covariance diagonal each M-step
    batch::Exec exec = batch::Exec::Serial;
    KarcherOptions karcher;
};

struct EmDiagnostics {
    std::vector<std::string> events;  // component re-seeds and similar
};

/// Expectation-maximization fit. Initialization sorts the data by input and
/// splits it into K contiguous equal-count bins, which makes the fit a
/// deterministic function of (data order, K, seed).
GmmSpdModel em_fit(const std::vector<SpdDatapoint>& data, int k, unsigned seed,
                   const EmOptions& opts = {}, EmDiagnostics* diagnostics = nullptr);

struct GmrOptions {
    double tol = 1e-8;
    int max_iters = 100;
    /// The conditional-covariance reading that subtracts the outer product of
    /// the conditional mean; off by default (the tangent residuals are
    /// already centered).
    bool subtract_mean_outer = false;
};

struct GmrResult {
    SpdMatrix mean;
    DenseTensor4 cov;
    Vector responsibilities;
};

/// Gaussian conditioning on the input: responsibilities from Euclidean
/// Gaussians on the input block, the output mean iterated in its tangent
/// space with covariance blocks parallel-transported to the current estimate
/// each sweep, and the conditional covariance assembled at the converged mean.
GmrResult gmr_condition(const GmmSpdModel& model, const Vector& input, const GmrOptions& opts = {});

}  // namespace manip
