#include "manip/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace manip {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string trace_csv_string(const TrackingTrace& trace) {
    const int n = trace.dof;
    std::ostringstream out;
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",q" << i;
    for (int i = 1; i <= n; ++i) out << ",dq" << i;
    out << ",m11,m22,m12_sqrt2,mt11,mt22,mt12_sqrt2,dist,x1,x2\n";
    for (const TraceRow& r : trace.rows) {
        out << fmt(r.t);
        for (int i = 0; i < n; ++i) out << ',' << fmt(r.q(i));
        for (int i = 0; i < n; ++i) out << ',' << fmt(r.qdot(i));
        for (int i = 0; i < 3; ++i) out << ',' << fmt(r.m_vec(i));
        for (int i = 0; i < 3; ++i) out << ',' << fmt(r.target_vec(i));
        out << ',' << fmt(r.dist) << ',' << fmt(r.x1) << ',' << fmt(r.x2) << '\n';
    }
    return out.str();
}

void write_trace_csv(const TrackingTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing", path);
    out << trace_csv_string(trace);
    if (!out) throw IoError("write failed", path);
}

std::string svg_ellipse_points(const Eigen::Vector2d& center, const Matrix& m, double unit_scale,
                               double cx, double cy) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    const Vector lambda = es.eigenvalues().cwiseMax(0.0);
    const Matrix v = es.eigenvectors();
    std::ostringstream pts;
    const int segments = 40;
    for (int s = 0; s <= segments; ++s) {
        const double a = 2.0 * M_PI * s / segments;
        const Eigen::Vector2d unit(std::cos(a), std::sin(a));
        const Eigen::Vector2d p =
            center + v * (lambda.cwiseSqrt().asDiagonal() * unit);
        if (s > 0) pts << ' ';
        pts << fmt(cx + unit_scale * p(0)) << ',' << fmt(cy - unit_scale * p(1));
    }
    return pts.str();
}

void write_trace_svg(const TrackingTrace& trace, const std::string& path, const SvgOptions& opts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing", path);
    const double cx = opts.width / 2.0;
    const double cy = opts.height / 2.0;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
        << opts.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (!trace.rows.empty()) {
        std::ostringstream pathpts;
        for (std::size_t i = 0; i < trace.rows.size(); ++i) {
            if (i > 0) pathpts << ' ';
            pathpts << fmt(cx + opts.unit_scale * trace.rows[i].x1) << ','
                    << fmt(cy - opts.unit_scale * trace.rows[i].x2);
        }
        out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\""
            << pathpts.str() << "\"/>\n";

        for (std::size_t i = 0; i < trace.rows.size();
             i += static_cast<std::size_t>(std::max(1, opts.ellipse_stride))) {
            const TraceRow& r = trace.rows[i];
            const Eigen::Vector2d c(r.x1, r.x2);
            out << "<polyline fill=\"none\" stroke=\"green\" stroke-width=\"1\" points=\""
                << svg_ellipse_points(c, mandel_fold(r.target_vec), opts.unit_scale, cx, cy)
                << "\"/>\n";
            out << "<polyline fill=\"none\" stroke=\"purple\" stroke-width=\"1\" points=\""
                << svg_ellipse_points(c, mandel_fold(r.m_vec), opts.unit_scale, cx, cy) << "\"/>\n";
        }
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed", path);
}

void write_compare_report(const std::vector<CompareMethodResult>& results,
                          const std::string& csv_path, const std::string& json_path) {
    std::size_t rows = 0;
    for (const CompareMethodResult& r : results) rows = std::max(rows, r.distances.size());

    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot open for writing", csv_path);
    csv << "step";
    for (const CompareMethodResult& r : results) csv << ",dist_" << r.name;
    csv << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        csv << i;
        for (const CompareMethodResult& r : results) {
            csv << ',';
            if (i < r.distances.size()) csv << fmt(r.distances[i]);
        }
        csv << '\n';
    }
    if (!csv) throw IoError("write failed", csv_path);

    nlohmann::json j;
    j["schema_version"] = 1;
    for (const CompareMethodResult& r : results) {
        nlohmann::json jm;
        jm["initial_distance"] = r.initial_distance;
        jm["final_distance"] = r.final_distance;
        jm["monotone"] = r.monotone;
        jm["steps_to_tenth"] = r.steps_to_tenth;
        j["methods"][r.name] = jm;
    }
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw IoError("cannot open for writing", json_path);
    js << j.dump(2) << '\n';
    if (!js) throw IoError("write failed", json_path);
}

}  // namespace manip
