#pragma once

#include "manip/scenario.hpp"

namespace manip {

struct FitOptions {
    int k = 5;
    unsigned seed = 0;
    EmOptions em;
};

/// Fits the SPD mixture over (t, ellipsoid) and the Euclidean mixture over
/// (t, tip position); records the training time range.
ModelDocument fit_model(const DemoDataset& dataset, const FitOptions& opts);

struct ReproduceOptions {
    double dt = 0.01;
    double kx = 50.0;
    double km = 5.0;  // scalar manipulability gain, or the trace scale in precision mode
    enum class Gains { Scalar, Precision } gains = Gains::Scalar;
    ManipKind kind{ManipType::Velocity, false};
    double damping = 0.0;
};

struct ReproduceResult {
    TrackingTrace trace;
    double tip_rms = 0.0;    // m, against the Cartesian reference
    double mean_dist = 0.0;  // time-averaged d(M, Mhat)
    std::vector<Vector> km_diag;   // gain-matrix diagonal per step (precision mode)
};

/// Runs the student along the learned Cartesian reference with the
/// manipulability profile tracked in the nullspace. Precision mode rebuilds
/// the gain from the regression covariance at every step.
ReproduceResult reproduce(const ModelDocument& model, const PlanarChain& student, const Vector& q0,
                          const ReproduceOptions& opts);

struct CompareMethodResult {
    std::string name;
    std::vector<double> distances;
    double initial_distance = 0.0;
    double final_distance = 0.0;
    bool monotone = true;       // distance non-increasing along the run
    int steps_to_tenth = -1;    // first step with d <= 0.1 * d0, -1 if never
};

/// Runs the geometry-aware controller and the requested baselines on one
/// scenario. Known method names: geometry, euclidean, cholesky,
/// cholesky_jacobian, stein_gradient.
std::vector<CompareMethodResult> run_comparison(const ScenarioConfig& scenario,
                                                const std::vector<std::string>& methods,
                                                batch::Exec exec = batch::Exec::Serial);

}  // namespace manip
