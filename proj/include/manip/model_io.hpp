#pragma once

#include <string>

#include "manip/euclid_gmm.hpp"
#include "manip/mixture.hpp"

namespace manip {

/// On-disk model document: the SPD mixture plus an optional Euclidean
/// mixture for the time-driven Cartesian reference, and the time range the
/// model was trained on.
struct ModelDocument {
    GmmSpdModel spd;
    bool has_cartesian = false;
    EuclideanGmm cartesian;
    double t_start = 0.0;
    double t_end = 1.0;
};

std::string serialize_model(const ModelDocument& doc);
ModelDocument deserialize_model(const std::string& text);
void save_model(const ModelDocument& doc, const std::string& path);
ModelDocument load_model(const std::string& path);

/// Demonstration dataset: time-stamped ellipsoids with the tip positions
/// they were recorded at.
struct DemoDataset {
    std::vector<double> t;
    std::vector<Matrix> ellipsoids;
    std::vector<Eigen::Vector2d> tips;

    std::size_t size() const { return t.size(); }
    std::vector<SpdDatapoint> datapoints() const;
};

std::string serialize_dataset(const DemoDataset& ds);
DemoDataset deserialize_dataset(const std::string& text);
void save_dataset(const DemoDataset& ds, const std::string& path);
DemoDataset load_dataset(const std::string& path);

}  // namespace manip
