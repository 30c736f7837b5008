#pragma once

#include "manip/batch.hpp"
#include "manip/config.hpp"
#include "manip/model_io.hpp"

namespace manip {

struct TraceRow {
    double t = 0.0;
    Vector q;
    Vector qdot;
    Vector m_vec;       // Mandel vector of the current ellipsoid
    Vector target_vec;  // Mandel vector of the target ellipsoid
    double dist = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
};

struct TrackingTrace {
    std::vector<TraceRow> rows;
    int dof = 0;
    // Worst nullspace-projector residuals observed across all steps:
    // |J (I - Jdag J)| for the task Jacobian and |J3' (I - (J3dag)' J3')|
    // for the manipulability Jacobian, max-abs entrywise.
    double max_task_projector_residual = 0.0;
    double max_manip_projector_residual = 0.0;

    std::vector<double> distances() const;
    double final_distance() const { return rows.empty() ? 0.0 : rows.back().dist; }
    double initial_distance() const { return rows.empty() ? 0.0 : rows.front().dist; }
};

/// Closed-loop simulation of one scenario: explicit Euler for the velocity
/// controllers, semi-implicit Euler for the acceleration controller.
/// Deterministic given the config.
TrackingTrace run_scenario(const ScenarioConfig& config);

/// Variant with a preloaded model document (avoids re-reading model files).
TrackingTrace run_scenario(const ScenarioConfig& config, const ModelDocument* model);

/// Independent scenarios executed with the chosen policy; results are in
/// input order regardless of the policy.
std::vector<TrackingTrace> run_scenarios(const std::vector<ScenarioConfig>& configs,
                                         batch::Exec exec);

}  // namespace manip
