#include "manip/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "manip/tracking.hpp"

namespace manip {

ModelDocument fit_model(const DemoDataset& dataset, const FitOptions& opts) {
    if (dataset.size() == 0) throw DataError("fit_model: empty dataset");
    ModelDocument doc;
    doc.spd = em_fit(dataset.datapoints(), opts.k, opts.seed, opts.em);

    Matrix rows(static_cast<Eigen::Index>(dataset.size()), 3);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        rows(static_cast<Eigen::Index>(i), 0) = dataset.t[i];
        rows(static_cast<Eigen::Index>(i), 1) = dataset.tips[i](0);
        rows(static_cast<Eigen::Index>(i), 2) = dataset.tips[i](1);
    }
    doc.cartesian = EuclideanGmm::fit(rows, opts.k);
    doc.has_cartesian = true;

    doc.t_start = *std::min_element(dataset.t.begin(), dataset.t.end());
    doc.t_end = *std::max_element(dataset.t.begin(), dataset.t.end());
    return doc;
}

ReproduceResult reproduce(const ModelDocument& model, const PlanarChain& student, const Vector& q0,
                          const ReproduceOptions& opts) {
    if (!model.has_cartesian) throw ConfigError("reproduce: model lacks the Cartesian reference");
    if (q0.size() != student.dof()) throw ConfigError("reproduce: initial_q length must equal dof");

    const int n = student.dof();
    const int steps = static_cast<int>(std::llround((model.t_end - model.t_start) / opts.dt));
    Vector q = q0;

    ReproduceResult result;
    result.trace.dof = n;
    double sq_err = 0.0, dist_acc = 0.0;

    for (int step = 0; step <= steps; ++step) {
        const double t = model.t_start + step * opts.dt;
        Vector input(1);
        input(0) = t;

        const auto [x_ref, x_cov] = model.cartesian.condition(input, 1);
        const GmrResult gmr = gmr_condition(model.spd, input);

        GainSpec gains;
        gains.kx = opts.kx;
        if (opts.gains == ReproduceOptions::Gains::Precision) {
            const Matrix km = gain_from_precision(gmr.cov, opts.km, GainMode::Diagonal);
            gains.km = Gain::full(km);
            result.km_diag.push_back(km.diagonal());
        } else {
            gains.km = Gain::scalar(opts.km);
        }

        const Eigen::Vector2d x_target(x_ref(0), x_ref(1));
        const TrackingCommand cmd = velocity_track_redundant(student, q, x_target, gmr.mean, gains,
                                                             opts.kind, opts.damping);

        const Ellipsoid current = manipulability(student, q, opts.kind);
        const PlanarPose pose = fk(student, q);
        TraceRow row;
        row.t = t;
        row.q = q;
        row.qdot = cmd.command;
        row.m_vec = mandel_vec(current.matrix.matrix());
        row.target_vec = mandel_vec(gmr.mean.matrix());
        row.dist = cmd.diag.distance;
        row.x1 = pose.x1;
        row.x2 = pose.x2;
        result.trace.rows.push_back(std::move(row));

        sq_err += (Eigen::Vector2d(pose.x1, pose.x2) - x_target).squaredNorm();
        dist_acc += cmd.diag.distance;

        // Projector audits with the exact pseudoinverse, as in run_scenario.
        {
            const Matrix j3 = manipulability_jacobian_mandel(student, q, opts.kind);
            const Matrix pinv_t = damped_pinv(j3).transpose();
            const Matrix res = j3.transpose() * (Matrix::Identity(n, n) - pinv_t * j3.transpose());
            result.trace.max_manip_projector_residual =
                std::max(result.trace.max_manip_projector_residual, res.cwiseAbs().maxCoeff());
            const Matrix jp = planar_jacobian(student, q);
            const Matrix task_res = jp * (Matrix::Identity(n, n) - damped_pinv(jp) * jp);
            result.trace.max_task_projector_residual =
                std::max(result.trace.max_task_projector_residual, task_res.cwiseAbs().maxCoeff());
        }

        if (step == steps) break;
        q += opts.dt * cmd.command;
    }

    result.tip_rms = std::sqrt(sq_err / static_cast<double>(steps + 1));
    result.mean_dist = dist_acc / static_cast<double>(steps + 1);
    return result;
}

std::vector<CompareMethodResult> run_comparison(const ScenarioConfig& scenario,
                                                const std::vector<std::string>& methods,
                                                batch::Exec exec) {
    std::vector<ScenarioConfig> configs;
    for (const std::string& name : methods) {
        ScenarioConfig cfg = scenario;
        if (name == "geometry") {
            cfg.controller.type = ControllerConfig::Type::VelocityMain;
        } else {
            cfg.controller.type = ControllerConfig::Type::Baseline;
            if (name == "euclidean")
                cfg.controller.method = BaselineMethod::Euclidean;
            else if (name == "cholesky")
                cfg.controller.method = BaselineMethod::Cholesky;
            else if (name == "cholesky_jacobian")
                cfg.controller.method = BaselineMethod::CholeskyJacobian;
            else if (name == "stein_gradient")
                cfg.controller.method = BaselineMethod::SteinGradient;
            else
                throw ConfigError("run_comparison: unknown method '" + name + "'");
        }
        configs.push_back(std::move(cfg));
    }

    const std::vector<TrackingTrace> traces = run_scenarios(configs, exec);

    std::vector<CompareMethodResult> results;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        CompareMethodResult r;
        r.name = methods[i];
        r.distances = traces[i].distances();
        r.initial_distance = traces[i].initial_distance();
        r.final_distance = traces[i].final_distance();
        const double threshold = 0.1 * r.initial_distance;
        for (std::size_t s = 0; s < r.distances.size(); ++s) {
            if (s > 0 && r.distances[s] > r.distances[s - 1] + 1e-9) r.monotone = false;
            if (r.steps_to_tenth < 0 && r.distances[s] <= threshold)
                r.steps_to_tenth = static_cast<int>(s);
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace manip
