#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "manip/export.hpp"
#include "manip/pipeline.hpp"
#include "manip/selftest.hpp"

namespace fs = std::filesystem;
using namespace manip;

namespace {

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const ScenarioConfig config = load_scenario(config_path);
    const TrackingTrace trace = run_scenario(config);
    fs::create_directories(out_dir);
    write_trace_csv(trace, (fs::path(out_dir) / config.trace_filename).string());
    write_trace_svg(trace, (fs::path(out_dir) / config.plot_filename).string());
    std::cout << "steps: " << trace.rows.size() - 1 << "\n"
              << "initial distance: " << trace.initial_distance() << "\n"
              << "final distance: " << trace.final_distance() << "\n";
    return 0;
}

int cmd_demo_gen(const std::string& config_path, const std::string& out_path) {
    const DemoConfig dc = load_demo_config(config_path);
    const DemoDataset ds = generate_demonstrations(dc.teacher, dc.shape, dc.options);
    save_dataset(ds, out_path);
    std::cout << "recorded " << ds.size() << " samples over " << dc.options.repetitions
              << " repetitions\n";
    return 0;
}

int cmd_fit(const std::string& data_path, int k, unsigned seed, const std::string& out_path) {
    const DemoDataset ds = load_dataset(data_path);
    FitOptions opts;
    opts.k = k;
    opts.seed = seed;
    const ModelDocument doc = fit_model(ds, opts);
    save_model(doc, out_path);
    std::cout << "fitted K=" << k << " on " << ds.size() << " samples; final log-likelihood "
              << doc.spd.loglik_history.back() << "\n";
    return 0;
}

int cmd_reproduce(const std::string& model_path, const std::string& robot_path,
                  const std::string& gains_mode, const std::string& out_dir) {
    const ModelDocument doc = load_model(model_path);
    const RobotConfig rc = load_robot_config(robot_path);

    ReproduceOptions opts;
    opts.dt = rc.dt;
    opts.kx = rc.kx;
    opts.km = rc.km;
    opts.damping = rc.damping;
    if (gains_mode == "scalar")
        opts.gains = ReproduceOptions::Gains::Scalar;
    else if (gains_mode == "precision")
        opts.gains = ReproduceOptions::Gains::Precision;
    else
        throw ConfigError("reproduce: gains mode must be scalar or precision");

    const ReproduceResult result = reproduce(doc, rc.robot, rc.initial_q, opts);
    fs::create_directories(out_dir);
    write_trace_csv(result.trace, (fs::path(out_dir) / "trace.csv").string());
    write_trace_svg(result.trace, (fs::path(out_dir) / "trace.svg").string());

    nlohmann::json summary;
    summary["schema_version"] = 1;
    summary["tip_rms"] = result.tip_rms;
    summary["mean_distance"] = result.mean_dist;
    std::ofstream js((fs::path(out_dir) / "summary.json").string());
    js << summary.dump(2) << "\n";

    std::cout << "tip rms: " << result.tip_rms << " m\n"
              << "mean manipulability distance: " << result.mean_dist << "\n";
    return 0;
}

int cmd_compare(const std::string& scenario_path, const std::string& methods_csv,
                const std::string& out_dir) {
    const ScenarioConfig scenario = load_scenario(scenario_path);
    std::vector<std::string> methods;
    std::stringstream ss(methods_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) methods.push_back(item);
    }
    if (methods.empty())
        methods = {"geometry", "euclidean", "cholesky", "cholesky_jacobian", "stein_gradient"};

    const auto results = run_comparison(scenario, methods, batch::Exec::Parallel);
    fs::create_directories(out_dir);
    write_compare_report(results, (fs::path(out_dir) / "distances.csv").string(),
                         (fs::path(out_dir) / "report.json").string());
    for (const CompareMethodResult& r : results)
        std::cout << r.name << ": initial " << r.initial_distance << ", final " << r.final_distance
                  << (r.monotone ? ", monotone" : ", non-monotone") << "\n";
    return 0;
}

int cmd_validate() {
    int failures = 0;
    const auto report = [&](const std::vector<selftest::CheckResult>& results) {
        for (const auto& r : results) {
            std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (worst " << r.worst
                      << ", tol " << r.tol << ")\n";
            if (!r.pass) ++failures;
        }
    };
    std::cout << "manifold identities:\n";
    report(selftest::manifold_suite(100, 12345));
    std::cout << "derivative oracles:\n";
    report(selftest::derivative_suite(5, {1, 2, 3, 4, 5, 8}, 54321));
    if (failures > 0) {
        std::cout << failures << " checks failed\n";
        return 1;
    }
    std::cout << "all checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar manipulability learning and tracking simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, out_path, data_path, model_path, robot_path;
    std::string gains_mode = "scalar", methods;
    int k = 5;
    unsigned seed = 0;
    bool self_test = false;

    auto* simulate = app.add_subcommand("simulate", "run one scenario and export its trace");
    simulate->add_option("--config", config_path, "scenario config")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();

    auto* demo = app.add_subcommand("demo-gen", "generate scripted teacher demonstrations");
    demo->add_option("--config", config_path, "demo config")->required();
    demo->add_option("--out", out_path, "dataset output path")->required();

    auto* fit = app.add_subcommand("fit", "fit a mixture model to a dataset");
    fit->add_option("--data", data_path, "dataset path")->required();
    fit->add_option("-K,--components", k, "mixture size")->required();
    fit->add_option("--seed", seed, "fit seed");
    fit->add_option("--out", out_path, "model output path")->required();

    auto* repro = app.add_subcommand("reproduce", "run a student robot against a learned model");
    repro->add_option("--model", model_path, "model path")->required();
    repro->add_option("--robot", robot_path, "robot config")->required();
    repro->add_option("--gains", gains_mode, "scalar or precision");
    repro->add_option("--out", out_dir, "output directory")->required();

    auto* compare = app.add_subcommand("compare", "run tracking formulations on one scenario");
    compare->add_option("--scenario", config_path, "scenario config")->required();
    compare->add_option("--methods", methods, "comma-separated method list");
    compare->add_option("--out", out_dir, "output directory")->required();

    auto* validate = app.add_subcommand("validate", "run the built-in verification suites");
    validate->add_flag("--self-test", self_test, "run the property and derivative suites");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir);
        if (demo->parsed()) return cmd_demo_gen(config_path, out_path);
        if (fit->parsed()) return cmd_fit(data_path, k, seed, out_path);
        if (repro->parsed()) return cmd_reproduce(model_path, robot_path, gains_mode, out_dir);
        if (compare->parsed()) return cmd_compare(config_path, methods, out_dir);
        if (validate->parsed()) {
            if (!self_test) {
                std::cerr << "error: nothing selected; run validate --self-test\n";
                return 1;
            }
            return cmd_validate();
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
