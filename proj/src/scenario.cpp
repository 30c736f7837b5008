#include "manip/scenario.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace manip {

namespace {

struct TargetProvider {
    const ScenarioConfig& config;
    const ModelDocument* model = nullptr;
    std::optional<SpdMatrix> fixed;

    TargetProvider(const ScenarioConfig& cfg, const ModelDocument* doc) : config(cfg), model(doc) {
        if (cfg.target.fixed) {
            fixed = SpdMatrix(*cfg.target.fixed);
        } else if (cfg.target.from_config) {
            fixed = manipulability(cfg.robot, *cfg.target.from_config, cfg.controller.kind).matrix;
        } else if (!cfg.target.model_path.empty() && model == nullptr) {
            throw ConfigError("run_scenario: model target requires a loaded model document");
        }
    }

    double t_offset() const { return fixed ? 0.0 : config.target.t_start; }

    SpdMatrix at(double t) const {
        if (fixed) return *fixed;
        Vector input(1);
        input(0) = t;
        return gmr_condition(model->spd, input).mean;
    }
};

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

std::vector<double> TrackingTrace::distances() const {
    std::vector<double> d;
    d.reserve(rows.size());
    for (const TraceRow& r : rows) d.push_back(r.dist);
    return d;
}

TrackingTrace run_scenario(const ScenarioConfig& config) {
    if (!config.target.model_path.empty()) {
        const ModelDocument doc = load_model(config.target.model_path);
        return run_scenario(config, &doc);
    }
    return run_scenario(config, nullptr);
}

TrackingTrace run_scenario(const ScenarioConfig& config, const ModelDocument* model) {
    config.validate();
    const int n = config.robot.dof();
    const ControllerConfig& ctl = config.controller;
    const TargetProvider targets(config, model);

    Vector q = config.initial_q;
    Vector qdot = config.initial_qdot.size() == n ? config.initial_qdot : Vector(Vector::Zero(n));

    Eigen::Vector2d x_hold = Eigen::Vector2d::Zero();
    if (ctl.type == ControllerConfig::Type::VelocityRedundant) {
        if (config.target.x_fixed) {
            x_hold = *config.target.x_fixed;
        } else {
            const PlanarPose pose = fk(config.robot, q);
            x_hold = Eigen::Vector2d(pose.x1, pose.x2);
        }
    }

    TrackingTrace trace;
    trace.dof = n;
    trace.rows.reserve(static_cast<std::size_t>(config.steps) + 1);

    for (int step = 0; step <= config.steps; ++step) {
        const double t = targets.t_offset() + step * config.dt;
        try {
            const SpdMatrix target = targets.at(t);
            TrackingCommand cmd;
            switch (ctl.type) {
                case ControllerConfig::Type::VelocityMain:
                    cmd = velocity_track_main(config.robot, q, target, ctl.gains, ctl.kind, ctl.damping);
                    break;
                case ControllerConfig::Type::VelocityRedundant:
                    cmd = velocity_track_redundant(config.robot, q, x_hold, target, ctl.gains,
                                                   ctl.kind, ctl.damping);
                    break;
                case ControllerConfig::Type::Acceleration:
                    cmd = accel_track(config.robot, q, qdot, target, Matrix::Zero(2, 2), ctl.gains,
                                      ctl.kind, ctl.damping, ctl.nullspace_damping);
                    break;
                case ControllerConfig::Type::NullspaceSecondary: {
                    Vector qdot_n = Vector::Zero(n);
                    if (ctl.secondary_q_ref.size() == n && ctl.secondary_gain.size() == n)
                        qdot_n = ctl.secondary_gain.cwiseProduct(ctl.secondary_q_ref - q);
                    cmd = nullspace_secondary(config.robot, q, target, ctl.gains, qdot_n, ctl.kind,
                                              ctl.damping);
                    break;
                }
                case ControllerConfig::Type::Baseline:
                    cmd = baseline_track(ctl.method, config.robot, q, target, ctl.gains, ctl.alpha,
                                         ctl.damping);
                    break;
            }

            // Nullspace-projector audits for this step; the identities are
            // properties of the exact pseudoinverse, so no damping here.
            {
                const Matrix j3 = manipulability_jacobian_mandel(config.robot, q, ctl.kind);
                const Matrix pinv_t = damped_pinv(j3).transpose();
                const Matrix residual =
                    j3.transpose() * (Matrix::Identity(n, n) - pinv_t * j3.transpose());
                trace.max_manip_projector_residual =
                    std::max(trace.max_manip_projector_residual, max_abs(residual));
                if (ctl.type == ControllerConfig::Type::VelocityRedundant) {
                    const Matrix jp = planar_jacobian(config.robot, q);
                    const Matrix task_res =
                        jp * (Matrix::Identity(n, n) - damped_pinv(jp) * jp);
                    trace.max_task_projector_residual =
                        std::max(trace.max_task_projector_residual, max_abs(task_res));
                }
            }

            const Ellipsoid current = manipulability(config.robot, q, ctl.kind);
            const PlanarPose pose = fk(config.robot, q);
            TraceRow row;
            row.t = t;
            row.q = q;
            row.qdot = qdot;
            row.m_vec = mandel_vec(current.matrix.matrix());
            row.target_vec = mandel_vec(target.matrix());
            row.dist = distance(current.matrix, target);
            row.x1 = pose.x1;
            row.x2 = pose.x2;
            trace.rows.push_back(std::move(row));

            if (step == config.steps) break;
            if (ctl.type == ControllerConfig::Type::Acceleration) {
                // Semi-implicit Euler on (q, qdot).
                qdot += config.dt * cmd.command;
                q += config.dt * qdot;
            } else {
                qdot = cmd.command;
                q += config.dt * qdot;
            }
        } catch (const Error& e) {
            throw Error("scenario step " + std::to_string(step) + ": " + e.what());
        }
    }
    return trace;
}

std::vector<TrackingTrace> run_scenarios(const std::vector<ScenarioConfig>& configs,
                                         batch::Exec exec) {
    const Eigen::Index n = static_cast<Eigen::Index>(configs.size());
    std::vector<TrackingTrace> traces(configs.size());
    std::vector<std::string> failures(configs.size());
    const auto body = [&](Eigen::Index i) {
        try {
            traces[static_cast<std::size_t>(i)] = run_scenario(configs[static_cast<std::size_t>(i)]);
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(i)] = e.what();
        }
    };
    if (exec == batch::Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (Eigen::Index i = 0; i < n; ++i) body(i);
    } else {
        for (Eigen::Index i = 0; i < n; ++i) body(i);
    }
    for (std::size_t i = 0; i < failures.size(); ++i)
        if (!failures[i].empty())
            throw Error("scenario " + std::to_string(i) + ": " + failures[i]);
    return traces;
}

}  // namespace manip
