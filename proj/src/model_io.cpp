#include "manip/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace manip {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ctx) {
    if (!obj.is_object()) throw ConfigError(ctx + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
}

void check_version(const json& obj, const std::string& ctx) {
    if (!obj.contains("schema_version")) throw ConfigError(ctx + ": missing schema_version");
    if (obj.at("schema_version").get<int>() != kSchemaVersion)
        throw ConfigError(ctx + ": unsupported schema_version");
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from_json(const json& rows, const std::string& ctx) {
    if (!rows.is_array() || rows.empty()) throw ConfigError(ctx + ": expected a matrix");
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows.at(0).size());
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const json& row = rows.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
            throw ConfigError(ctx + ": ragged matrix");
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vector vector_from_json(const json& a, const std::string& ctx) {
    if (!a.is_array()) throw ConfigError(ctx + ": expected an array");
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = a.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

}  // namespace

std::string serialize_model(const ModelDocument& doc) {
    doc.spd.validate();
    json j;
    j["schema_version"] = kSchemaVersion;
    j["type"] = "manipulability_model";

    json spd;
    spd["K"] = doc.spd.k();
    spd["D"] = doc.spd.d_out;
    spd["d_in"] = doc.spd.d_in;
    json comps = json::array();
    for (const GmmSpdComponent& c : doc.spd.components) {
        json jc;
        jc["prior"] = c.prior;
        jc["mean_in"] = vector_to_json(c.mean_in);
        jc["mean_out"] = matrix_to_json(c.mean_out.matrix());
        jc["cov"] = matrix_to_json(c.cov);
        comps.push_back(jc);
    }
    spd["components"] = comps;
    spd["loglik_history"] = doc.spd.loglik_history;
    j["spd_gmm"] = spd;

    if (doc.has_cartesian) {
        json cg;
        cg["priors"] = doc.cartesian.priors;
        json means = json::array(), covs = json::array();
        for (const Vector& m : doc.cartesian.means) means.push_back(vector_to_json(m));
        for (const Matrix& c : doc.cartesian.covs) covs.push_back(matrix_to_json(c));
        cg["means"] = means;
        cg["covs"] = covs;
        j["cartesian_gmm"] = cg;
    }
    j["t_range"] = {doc.t_start, doc.t_end};
    return j.dump(2) + "\n";
}

ModelDocument deserialize_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model document: ") + e.what());
    }
    check_keys(j, {"schema_version", "type", "spd_gmm", "cartesian_gmm", "t_range"}, "model document");
    check_version(j, "model document");
    if (j.at("type").get<std::string>() != "manipulability_model")
        throw ConfigError("model document: wrong type tag");

    ModelDocument doc;
    const json& spd = j.at("spd_gmm");
    check_keys(spd, {"K", "D", "d_in", "components", "loglik_history"}, "spd_gmm");
    doc.spd.d_in = spd.at("d_in").get<int>();
    doc.spd.d_out = spd.at("D").get<int>();
    const int k = spd.at("K").get<int>();
    if (k < 1) throw ConfigError("spd_gmm: K must be at least 1");
    for (const json& jc : spd.at("components")) {
        check_keys(jc, {"prior", "mean_in", "mean_out", "cov"}, "spd_gmm component");
        GmmSpdComponent c{jc.at("prior").get<double>(),
                          vector_from_json(jc.at("mean_in"), "mean_in"),
                          SpdMatrix(matrix_from_json(jc.at("mean_out"), "mean_out")),
                          matrix_from_json(jc.at("cov"), "cov")};
        doc.spd.components.push_back(std::move(c));
    }
    if (doc.spd.k() != k) throw ConfigError("spd_gmm: K disagrees with component count");
    if (spd.contains("loglik_history"))
        doc.spd.loglik_history = spd.at("loglik_history").get<std::vector<double>>();
    doc.spd.validate();

    if (j.contains("cartesian_gmm")) {
        const json& cg = j.at("cartesian_gmm");
        check_keys(cg, {"priors", "means", "covs"}, "cartesian_gmm");
        doc.has_cartesian = true;
        doc.cartesian.priors = cg.at("priors").get<std::vector<double>>();
        for (const json& m : cg.at("means")) doc.cartesian.means.push_back(vector_from_json(m, "cartesian mean"));
        for (const json& c : cg.at("covs")) doc.cartesian.covs.push_back(matrix_from_json(c, "cartesian cov"));
        if (doc.cartesian.means.size() != doc.cartesian.priors.size() ||
            doc.cartesian.covs.size() != doc.cartesian.priors.size())
            throw ConfigError("cartesian_gmm: component count mismatch");
    }
    if (j.contains("t_range")) {
        const auto range = j.at("t_range").get<std::vector<double>>();
        if (range.size() != 2) throw ConfigError("model document: t_range must have two entries");
        doc.t_start = range[0];
        doc.t_end = range[1];
    }
    return doc;
}

void save_model(const ModelDocument& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing", path);
    out << serialize_model(doc);
    if (!out) throw IoError("write failed", path);
}

ModelDocument load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open", path);
    std::stringstream ss;
    ss << in.rdbuf();
    return deserialize_model(ss.str());
}

std::vector<SpdDatapoint> DemoDataset::datapoints() const {
    std::vector<SpdDatapoint> pts;
    pts.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        Vector input(1);
        input(0) = t[i];
        pts.push_back(SpdDatapoint{input, SpdMatrix(ellipsoids[i])});
    }
    return pts;
}

std::string serialize_dataset(const DemoDataset& ds) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["type"] = "demonstration_dataset";
    json points = json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        json p;
        p["t"] = ds.t[i];
        p["m"] = matrix_to_json(ds.ellipsoids[i]);
        p["x"] = {ds.tips[i](0), ds.tips[i](1)};
        points.push_back(p);
    }
    j["points"] = points;
    return j.dump(2) + "\n";
}

DemoDataset deserialize_dataset(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("dataset document: ") + e.what());
    }
    check_keys(j, {"schema_version", "type", "points"}, "dataset document");
    check_version(j, "dataset document");
    if (j.at("type").get<std::string>() != "demonstration_dataset")
        throw ConfigError("dataset document: wrong type tag");
    DemoDataset ds;
    for (const json& p : j.at("points")) {
        check_keys(p, {"t", "m", "x"}, "dataset point");
        ds.t.push_back(p.at("t").get<double>());
        const Matrix m = matrix_from_json(p.at("m"), "dataset ellipsoid");
        SpdMatrix check(m);  // reject invalid ellipsoids on load
        ds.ellipsoids.push_back(m);
        const auto x = p.at("x").get<std::vector<double>>();
        if (x.size() != 2) throw ConfigError("dataset point: x must have two entries");
        ds.tips.emplace_back(x[0], x[1]);
    }
    return ds;
}

void save_dataset(const DemoDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing", path);
    out << serialize_dataset(ds);
    if (!out) throw IoError("write failed", path);
}

DemoDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open", path);
    std::stringstream ss;
    ss << in.rdbuf();
    return deserialize_dataset(ss.str());
}

}  // namespace manip
