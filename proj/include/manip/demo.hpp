#pragma once

#include "manip/manipulability.hpp"
#include "manip/model_io.hpp"

namespace manip {

/// Parametric arc traced by the teacher: a fraction of a circle, walked from
/// start_angle, counterclockwise unless clockwise is set. The default covers
/// three quarters of the circle, which draws a C.
struct CShape {
    Eigen::Vector2d center{0.45, 0.10};
    double radius = 0.35;
    double start_angle = 1.5707963267948966;  // rad
    double arc_fraction = 0.75;
    bool clockwise = false;

    Eigen::Vector2d at(double s) const;  // s in [0, 1]
};

struct DemoOptions {
    int repetitions = 4;
    double duration = 10.0;     // s, per repetition; samples are stamped in [0, duration]
    double control_dt = 0.01;   // s, inner tracking loop
    double sample_dt = 0.05;    // s, dataset sampling period
    double noise_std = 0.05;    // rad, seeded start-posture perturbation
    unsigned seed = 7;
    double ik_gain = 20.0;      // 1/s
    Vector initial_guess;       // starting posture for the inverse kinematics; defaults inside
};

/// Scripted teacher demonstrations: the chain follows the shape under
/// damped-pseudoinverse inverse kinematics from a seeded perturbed start
/// posture, recording time-stamped velocity manipulability ellipsoids and
/// tip positions. Deterministic given the options.
DemoDataset generate_demonstrations(const PlanarChain& teacher, const CShape& shape,
                                    const DemoOptions& opts);

/// Inverse kinematics to a point: damped-pseudoinverse iteration from the
/// given guess. Throws ConvergenceError if the point cannot be reached.
Vector solve_ik(const PlanarChain& chain, const Eigen::Vector2d& point, const Vector& guess,
                double tol = 1e-10, int max_iters = 2000);

}  // namespace manip
