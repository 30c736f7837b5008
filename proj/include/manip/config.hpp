#pragma once

#include <optional>
#include <string>

#include "manip/demo.hpp"
#include "manip/tracking.hpp"

namespace manip {

struct ControllerConfig {
    enum class Type { VelocityMain, VelocityRedundant, Acceleration, NullspaceSecondary, Baseline };
    Type type = Type::VelocityMain;
    ManipKind kind{ManipType::Velocity, false};
    GainSpec gains;
    BaselineMethod method = BaselineMethod::Euclidean;
    double alpha = 1.0;
    double damping = 0.0;
    double nullspace_damping = 0.0;  // acceleration controller only
    // Joint-posture secondary objective for NullspaceSecondary:
    // qdot_N = secondary_gain .* (secondary_q_ref - q); empty means zero.
    Vector secondary_q_ref;
    Vector secondary_gain;
};

struct TargetConfig {
    std::optional<Matrix> fixed;        // explicit SPD matrix
    std::optional<Vector> from_config;  // ellipsoid of the chain at this q
    std::string model_path;             // regression reference over [t_start, t_end]
    double t_start = 0.0;
    double t_end = 1.0;
    std::optional<Eigen::Vector2d> x_fixed;  // tip target for the redundant controller
};

struct ScenarioConfig {
    PlanarChain robot;
    Vector initial_q;
    Vector initial_qdot;  // zero when absent
    ControllerConfig controller;
    TargetConfig target;
    double dt = 0.01;
    int steps = 100;
    unsigned seed = 0;
    std::string trace_filename = "trace.csv";
    std::string plot_filename = "trace.svg";

    void validate() const;
};

/// Strict parser: unknown keys anywhere in the document are errors.
ScenarioConfig scenario_from_json_text(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/// Robot-only document used by the reproduce workflow: robot, initial_q and
/// optional integration/gain settings.
struct RobotConfig {
    PlanarChain robot;
    Vector initial_q;
    double dt = 0.01;
    double kx = 50.0;
    double km = 5.0;
    double damping = 0.0;
};

RobotConfig robot_config_from_json_text(const std::string& text);
RobotConfig load_robot_config(const std::string& path);

/// Demonstration-generation document: teacher robot, shape and recording
/// options.
struct DemoConfig {
    PlanarChain teacher;
    CShape shape;
    DemoOptions options;
};

DemoConfig demo_config_from_json_text(const std::string& text);
DemoConfig load_demo_config(const std::string& path);

}  // namespace manip
