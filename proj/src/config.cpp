#include "manip/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace manip {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ctx) {
    if (!obj.is_object()) throw ConfigError(ctx + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
}

Vector vector_from(const json& a, const std::string& ctx) {
    if (!a.is_array()) throw ConfigError(ctx + ": expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = a.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

Matrix matrix_from(const json& rows, const std::string& ctx) {
    if (!rows.is_array() || rows.empty()) throw ConfigError(ctx + ": expected a matrix");
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows.at(0).size());
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const json& row = rows.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != c) throw ConfigError(ctx + ": ragged matrix");
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
    }
    return m;
}

std::vector<double> doubles_from(const json& a, const std::string& ctx) {
    const Vector v = vector_from(a, ctx);
    return std::vector<double>(v.data(), v.data() + v.size());
}

PlanarChain robot_from(const json& jr) {
    check_keys(jr, {"lengths", "masses", "qdot_max", "tau_max"}, "robot");
    if (!jr.contains("lengths")) throw ConfigError("robot: missing lengths");
    PlanarChain chain;
    chain.lengths = doubles_from(jr.at("lengths"), "robot.lengths");
    const std::size_t n = chain.lengths.size();
    chain.masses = jr.contains("masses") ? doubles_from(jr.at("masses"), "robot.masses")
                                         : std::vector<double>(n, 1.0);
    chain.qdot_max = jr.contains("qdot_max") ? doubles_from(jr.at("qdot_max"), "robot.qdot_max")
                                             : std::vector<double>(n, 1.0);
    chain.tau_max = jr.contains("tau_max") ? doubles_from(jr.at("tau_max"), "robot.tau_max")
                                           : std::vector<double>(n, 1.0);
    chain.validate();
    return chain;
}

Gain gain_from(const json& jg, const std::string& key_scalar, const std::string& key_diag,
               const std::string& key_full, double fallback) {
    const bool s = jg.contains(key_scalar), d = jg.contains(key_diag), f = jg.contains(key_full);
    if (s + d + f > 1) throw ConfigError("gains: give at most one of " + key_scalar + "/" + key_diag + "/" + key_full);
    if (s) return Gain::scalar(jg.at(key_scalar).get<double>());
    if (d) return Gain::diagonal(vector_from(jg.at(key_diag), "gains." + key_diag));
    if (f) return Gain::full(matrix_from(jg.at(key_full), "gains." + key_full));
    return Gain::scalar(fallback);
}

ManipKind kind_from(const json& jc) {
    ManipKind kind;
    if (jc.contains("kind")) {
        const std::string s = jc.at("kind").get<std::string>();
        static const std::map<std::string, ManipType> kinds{{"velocity", ManipType::Velocity},
                                                            {"force", ManipType::Force},
                                                            {"dynamic", ManipType::Dynamic}};
        const auto it = kinds.find(s);
        if (it == kinds.end()) throw ConfigError("controller: unknown kind '" + s + "'");
        kind.type = it->second;
    }
    if (jc.contains("weighted")) kind.weighted = jc.at("weighted").get<bool>();
    return kind;
}

ControllerConfig controller_from(const json& jc) {
    check_keys(jc,
               {"type", "kind", "weighted", "gains", "method", "alpha", "damping",
                "nullspace_damping", "secondary"},
               "controller");
    ControllerConfig cc;
    static const std::map<std::string, ControllerConfig::Type> types{
        {"velocity_main", ControllerConfig::Type::VelocityMain},
        {"velocity_redundant", ControllerConfig::Type::VelocityRedundant},
        {"acceleration", ControllerConfig::Type::Acceleration},
        {"nullspace_secondary", ControllerConfig::Type::NullspaceSecondary},
        {"baseline", ControllerConfig::Type::Baseline}};
    if (jc.contains("type")) {
        const std::string s = jc.at("type").get<std::string>();
        const auto it = types.find(s);
        if (it == types.end()) throw ConfigError("controller: unknown type '" + s + "'");
        cc.type = it->second;
    }
    cc.kind = kind_from(jc);
    if (jc.contains("gains")) {
        const json& jg = jc.at("gains");
        check_keys(jg, {"km", "km_diag", "km_full", "kx", "kp", "kd"}, "gains");
        cc.gains.km = gain_from(jg, "km", "km_diag", "km_full", 1.0);
        if (jg.contains("kx")) cc.gains.kx = jg.at("kx").get<double>();
        if (jg.contains("kp")) cc.gains.kp = Gain::scalar(jg.at("kp").get<double>());
        if (jg.contains("kd")) cc.gains.kd = Gain::scalar(jg.at("kd").get<double>());
    }
    if (jc.contains("method")) {
        static const std::map<std::string, BaselineMethod> methods{
            {"euclidean", BaselineMethod::Euclidean},
            {"cholesky", BaselineMethod::Cholesky},
            {"cholesky_jacobian", BaselineMethod::CholeskyJacobian},
            {"stein_gradient", BaselineMethod::SteinGradient}};
        const std::string s = jc.at("method").get<std::string>();
        const auto it = methods.find(s);
        if (it == methods.end()) throw ConfigError("controller: unknown method '" + s + "'");
        cc.method = it->second;
    }
    if (jc.contains("alpha")) cc.alpha = jc.at("alpha").get<double>();
    if (jc.contains("damping")) cc.damping = jc.at("damping").get<double>();
    if (jc.contains("nullspace_damping"))
        cc.nullspace_damping = jc.at("nullspace_damping").get<double>();
    if (jc.contains("secondary")) {
        const json& js = jc.at("secondary");
        check_keys(js, {"q_ref", "gain"}, "controller.secondary");
        cc.secondary_q_ref = vector_from(js.at("q_ref"), "secondary.q_ref");
        cc.secondary_gain = vector_from(js.at("gain"), "secondary.gain");
    }
    return cc;
}

TargetConfig target_from(const json& jt) {
    check_keys(jt, {"matrix", "config", "model", "t_start", "t_end", "x_fixed"}, "target");
    TargetConfig tc;
    int sources = 0;
    if (jt.contains("matrix")) {
        tc.fixed = matrix_from(jt.at("matrix"), "target.matrix");
        ++sources;
    }
    if (jt.contains("config")) {
        tc.from_config = vector_from(jt.at("config"), "target.config");
        ++sources;
    }
    if (jt.contains("model")) {
        tc.model_path = jt.at("model").get<std::string>();
        ++sources;
    }
    if (sources != 1) throw ConfigError("target: give exactly one of matrix/config/model");
    if (jt.contains("t_start")) tc.t_start = jt.at("t_start").get<double>();
    if (jt.contains("t_end")) tc.t_end = jt.at("t_end").get<double>();
    if (jt.contains("x_fixed")) {
        const Vector x = vector_from(jt.at("x_fixed"), "target.x_fixed");
        if (x.size() != 2) throw ConfigError("target.x_fixed must have two entries");
        tc.x_fixed = Eigen::Vector2d(x(0), x(1));
    }
    return tc;
}

}  // namespace

void ScenarioConfig::validate() const {
    robot.validate();
    if (initial_q.size() != robot.dof()) throw ConfigError("initial_q length must equal dof");
    if (initial_qdot.size() != 0 && initial_qdot.size() != robot.dof())
        throw ConfigError("initial_qdot length must equal dof");
    if (!(dt > 0.0)) throw ConfigError("integration.dt must be positive");
    if (steps < 1) throw ConfigError("integration.steps must be at least 1");
    if (target.fixed) SpdMatrix check(*target.fixed);  // fixed targets must be valid ellipsoids
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario config: ") + e.what());
    }
    check_keys(j,
               {"schema_version", "robot", "initial_q", "initial_qdot", "controller", "target",
                "integration", "seed", "outputs"},
               "scenario config");
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
        throw ConfigError("scenario config: missing or unsupported schema_version");

    ScenarioConfig sc;
    sc.robot = robot_from(j.at("robot"));
    sc.initial_q = vector_from(j.at("initial_q"), "initial_q");
    if (j.contains("initial_qdot")) sc.initial_qdot = vector_from(j.at("initial_qdot"), "initial_qdot");
    if (j.contains("controller")) sc.controller = controller_from(j.at("controller"));
    sc.target = target_from(j.at("target"));
    if (j.contains("integration")) {
        const json& ji = j.at("integration");
        check_keys(ji, {"dt", "steps"}, "integration");
        if (ji.contains("dt")) sc.dt = ji.at("dt").get<double>();
        if (ji.contains("steps")) sc.steps = ji.at("steps").get<int>();
    }
    if (j.contains("seed")) sc.seed = j.at("seed").get<unsigned>();
    if (j.contains("outputs")) {
        const json& jo = j.at("outputs");
        check_keys(jo, {"trace", "plot"}, "outputs");
        if (jo.contains("trace")) sc.trace_filename = jo.at("trace").get<std::string>();
        if (jo.contains("plot")) sc.plot_filename = jo.at("plot").get<std::string>();
    }
    sc.validate();
    return sc;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open", path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json_text(ss.str());
}

RobotConfig robot_config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("robot config: ") + e.what());
    }
    check_keys(j, {"schema_version", "robot", "initial_q", "dt", "kx", "km", "damping"},
               "robot config");
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
        throw ConfigError("robot config: missing or unsupported schema_version");
    RobotConfig rc;
    rc.robot = robot_from(j.at("robot"));
    rc.initial_q = vector_from(j.at("initial_q"), "initial_q");
    if (rc.initial_q.size() != rc.robot.dof()) throw ConfigError("initial_q length must equal dof");
    if (j.contains("dt")) rc.dt = j.at("dt").get<double>();
    if (j.contains("kx")) rc.kx = j.at("kx").get<double>();
    if (j.contains("km")) rc.km = j.at("km").get<double>();
    if (j.contains("damping")) rc.damping = j.at("damping").get<double>();
    return rc;
}

RobotConfig load_robot_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open", path);
    std::stringstream ss;
    ss << in.rdbuf();
    return robot_config_from_json_text(ss.str());
}

DemoConfig demo_config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("demo config: ") + e.what());
    }
    check_keys(j,
               {"schema_version", "robot", "shape", "repetitions", "duration", "control_dt",
                "sample_dt", "noise_std", "seed", "ik_gain", "initial_guess"},
               "demo config");
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
        throw ConfigError("demo config: missing or unsupported schema_version");

    DemoConfig dc;
    dc.teacher = robot_from(j.at("robot"));
    if (j.contains("shape")) {
        const json& js = j.at("shape");
        check_keys(js, {"center", "radius", "start_angle_deg", "arc_fraction", "clockwise"},
                   "demo shape");
        if (js.contains("center")) {
            const Vector c = vector_from(js.at("center"), "shape.center");
            if (c.size() != 2) throw ConfigError("shape.center must have two entries");
            dc.shape.center = Eigen::Vector2d(c(0), c(1));
        }
        if (js.contains("radius")) dc.shape.radius = js.at("radius").get<double>();
        if (js.contains("start_angle_deg"))
            dc.shape.start_angle = js.at("start_angle_deg").get<double>() * M_PI / 180.0;
        if (js.contains("arc_fraction")) dc.shape.arc_fraction = js.at("arc_fraction").get<double>();
        if (js.contains("clockwise")) dc.shape.clockwise = js.at("clockwise").get<bool>();
    }
    if (j.contains("repetitions")) dc.options.repetitions = j.at("repetitions").get<int>();
    if (j.contains("duration")) dc.options.duration = j.at("duration").get<double>();
    if (j.contains("control_dt")) dc.options.control_dt = j.at("control_dt").get<double>();
    if (j.contains("sample_dt")) dc.options.sample_dt = j.at("sample_dt").get<double>();
    if (j.contains("noise_std")) dc.options.noise_std = j.at("noise_std").get<double>();
    if (j.contains("seed")) dc.options.seed = j.at("seed").get<unsigned>();
    if (j.contains("ik_gain")) dc.options.ik_gain = j.at("ik_gain").get<double>();
    if (j.contains("initial_guess"))
        dc.options.initial_guess = vector_from(j.at("initial_guess"), "initial_guess");
    return dc;
}

DemoConfig load_demo_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open", path);
    std::stringstream ss;
    ss << in.rdbuf();
    return demo_config_from_json_text(ss.str());
}

}  // namespace manip
