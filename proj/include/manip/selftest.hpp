#pragma once

#include <string>
#include <vector>

#include "manip/tensor.hpp"

namespace manip::selftest {

struct CheckResult {
    std::string name;
    double worst = 0.0;  // largest error observed
    double tol = 0.0;
    bool pass = false;
};

/// Randomized identities of the SPD geometry: exp/log inversion, distance
/// symmetry and affine invariance, transport isometry, covariance-tensor
/// transport validity, geodesic midpoint equidistance.
std::vector<CheckResult> manifold_suite(int cases, unsigned seed);

/// Central-difference verification of every analytic derivative: the chain
/// Jacobian and its first and second joint derivatives, the inertia
/// derivative, the three manipulability Jacobians, the time derivative of
/// the velocity manipulability Jacobian, and the Stein/volume/compatibility
/// gradients.
std::vector<CheckResult> derivative_suite(int configs_per_size, const std::vector<int>& sizes,
                                          unsigned seed);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace manip::selftest
