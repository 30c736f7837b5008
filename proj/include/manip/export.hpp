#pragma once

#include <string>
#include <vector>

#include "manip/pipeline.hpp"

namespace manip {

/// Fixed-schema CSV: t, q1..qn, dq1..dqn, the Mandel entries of the current
/// and target ellipsoids, the geodesic distance, and the tip position.
/// Numbers are printed with 17 significant digits so re-parsing is lossless.
void write_trace_csv(const TrackingTrace& trace, const std::string& path);
std::string trace_csv_string(const TrackingTrace& trace);

struct SvgOptions {
    double unit_scale = 100.0;  // pixels per meter
    int ellipse_stride = 25;    // draw every k-th row's ellipsoids
    int width = 640;
    int height = 480;
};

/// Tip path plus current/target ellipsoids drawn as 40-segment polylines
/// from the eigendecomposition of each matrix.
void write_trace_svg(const TrackingTrace& trace, const std::string& path,
                     const SvgOptions& opts = {});

/// One ellipse outline as the SVG "points" attribute content (41 vertices).
std::string svg_ellipse_points(const Eigen::Vector2d& center, const Matrix& m, double unit_scale,
                               double cx, double cy);

/// Per-method distance curves (one CSV) and a JSON summary with final
/// distances, monotonicity and steps-to-threshold per method.
void write_compare_report(const std::vector<CompareMethodResult>& results,
                          const std::string& csv_path, const std::string& json_path);

}  // namespace manip
