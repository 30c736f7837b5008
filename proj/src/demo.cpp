#include "manip/demo.hpp"

#include <cmath>
#include <random>

#include "manip/tracking.hpp"

namespace manip {

Eigen::Vector2d CShape::at(double s) const {
    const double dir = clockwise ? -1.0 : 1.0;
    const double angle = start_angle + dir * s * arc_fraction * 2.0 * M_PI;
    return center + radius * Eigen::Vector2d(std::cos(angle), std::sin(angle));
}

Vector solve_ik(const PlanarChain& chain, const Eigen::Vector2d& point, const Vector& guess,
                double tol, int max_iters) {
    double reach = 0.0;
    for (double l : chain.lengths) reach += l;
    if (point.norm() > reach)
        throw ConvergenceError("solve_ik: point outside the reachable workspace", point.norm() - reach);

    Vector q = guess;
    double err = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        const PlanarPose pose = fk(chain, q);
        const Eigen::Vector2d dx = point - Eigen::Vector2d(pose.x1, pose.x2);
        err = dx.norm();
        if (err < tol) return q;
        const Matrix jp = planar_jacobian(chain, q);
        q += damped_pinv(jp, 1e-8, 1e-4) * dx;
    }
    throw ConvergenceError("solve_ik: no convergence", err);
}

DemoDataset generate_demonstrations(const PlanarChain& teacher, const CShape& shape,
                                    const DemoOptions& opts) {
    const int n = teacher.dof();
    if (opts.repetitions < 1) throw DomainError("generate_demonstrations: repetitions must be >= 1");
    if (!(opts.duration > 0.0 && opts.control_dt > 0.0 && opts.sample_dt > 0.0))
        throw DomainError("generate_demonstrations: durations must be positive");

    // Reachability of the whole shape, reported with the offending waypoint.
    double reach = 0.0;
    for (double l : teacher.lengths) reach += l;
    const int waypoints = 64;
    for (int w = 0; w <= waypoints; ++w) {
        const Eigen::Vector2d p = shape.at(static_cast<double>(w) / waypoints);
        if (p.norm() > reach)
            throw DomainError("generate_demonstrations: waypoint " + std::to_string(w) + " at (" +
                              std::to_string(p(0)) + ", " + std::to_string(p(1)) +
                              ") is outside the reachable workspace");
    }

    Vector guess = opts.initial_guess;
    if (guess.size() != n) {
        // Gently folded posture; keeps the start solve away from the stretched singularity.
        guess = Vector::Constant(n, 0.5);
        guess(0) = 0.8;
    }
    const Vector q_nominal = solve_ik(teacher, shape.at(0.0), guess);

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    DemoDataset ds;
    const int steps = static_cast<int>(std::llround(opts.duration / opts.control_dt));
    const int sample_every = std::max(1, static_cast<int>(std::llround(opts.sample_dt / opts.control_dt)));

    for (int rep = 0; rep < opts.repetitions; ++rep) {
        Vector q = q_nominal;
        if (opts.noise_std > 0.0) {
            for (int i = 0; i < n; ++i) q(i) += opts.noise_std * gauss(rng);
            // Back onto the start point; the perturbation survives in the nullspace.
            q = solve_ik(teacher, shape.at(0.0), q);
        }
        for (int step = 0; step <= steps; ++step) {
            const double t = step * opts.control_dt;
            if (step % sample_every == 0) {
                const Ellipsoid ell = manipulability(teacher, q, {ManipType::Velocity, false});
                const PlanarPose pose = fk(teacher, q);
                ds.t.push_back(t);
                ds.ellipsoids.push_back(ell.matrix.matrix());
                ds.tips.emplace_back(pose.x1, pose.x2);
            }
            if (step == steps) break;
            const Eigen::Vector2d x_ref = shape.at(t / opts.duration);
            const PlanarPose pose = fk(teacher, q);
            const Eigen::Vector2d dx = x_ref - Eigen::Vector2d(pose.x1, pose.x2);
            const Matrix jp = planar_jacobian(teacher, q);
            const Vector qdot = damped_pinv(jp, 1e-8, 1e-4) * (opts.ik_gain * dx);
            q += opts.control_dt * qdot;
        }
    }
    return ds;
}

}  // namespace manip
