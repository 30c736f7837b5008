#include <doctest.h>

#include <cmath>
#include <random>

#include "manip/demo.hpp"
#include "manip/numdiff.hpp"
#include "manip/tracking.hpp"

using namespace manip;

namespace {

std::mt19937_64 rng(99331);

Vector random_q(int n, double lim = M_PI) {
    std::uniform_real_distribution<double> u(-lim, lim);
    while (true) {
        Vector q(n);
        for (int i = 0; i < n; ++i) q(i) = u(rng);
        Eigen::JacobiSVD<Matrix> svd(planar_jacobian(PlanarChain::uniform(n), q));
        if (svd.singularValues()(1) > 1e-2 * svd.singularValues()(0)) return q;
    }
}

Matrix random_mat(int r, int c) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
}

const ManipKind kVel{ManipType::Velocity, false};

}  // namespace

TEST_CASE("pseudoinverse of the identity is the identity") {
    const Matrix p = damped_pinv(Matrix::Identity(3, 3));
    CHECK((p - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pseudoinverse satisfies the Moore-Penrose identity") {
    for (int it = 0; it < 20; ++it) {
        const Matrix a = random_mat(3, 5);
        const Matrix p = damped_pinv(a);
        CHECK((a * p * a - a).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("pseudoinverse annihilates directions outside the row space") {
    Matrix a(2, 3);
    a << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;  // row space excludes e3
    Matrix deficient(3, 3);
    deficient.setZero();
    deficient.topRows(2) = a;
    const Matrix p = damped_pinv(deficient);
    Vector v(3);
    v << 0.0, 0.0, 1.0;
    CHECK((p * v).norm() < 1e-10);
}

TEST_CASE("damping shrinks the inverse singular values") {
    Matrix a = Matrix::Identity(2, 2);
    const Matrix p = damped_pinv(a, 1e-8, 1.0);
    CHECK(p(0, 0) == doctest::Approx(0.5));  // sigma / (sigma^2 + 1)
}

TEST_CASE("velocity tracking command is exactly zero at the target") {
    const PlanarChain chain = PlanarChain::uniform(4);
    const Vector q = random_q(4);
    const SpdMatrix target = manipulability(chain, q, kVel).matrix;
    GainSpec gains;
    gains.km = Gain::scalar(5.0);
    const TrackingCommand cmd = velocity_track_main(chain, q, target, gains, kVel);
    CHECK(cmd.command.cwiseAbs().maxCoeff() == 0.0);
    CHECK(cmd.diag.distance == 0.0);
}

// Moderately conditioned targets at moderate distance; trajectories that
// cross manipulability-Jacobian rank losses are excluded by construction
// (there the realizable direction genuinely misaligns with the error).
TEST_CASE("velocity tracking converges monotonically to reachable targets") {
    GainSpec gains;
    gains.km = Gain::scalar(5.0);
    const PlanarChain chain = PlanarChain::uniform(4);
    Vector q0(4);
    q0 << 0.3, 0.5, 0.5, 0.5;
    const SpdMatrix m0 = manipulability(chain, q0, kVel).matrix;
    int converged = 0;
    for (int it = 0; it < 10; ++it) {
        SpdMatrix target = m0;
        while (true) {
            const SpdMatrix cand = manipulability(chain, random_q(4), kVel).matrix;
            Eigen::SelfAdjointEigenSolver<Matrix> es(cand.matrix());
            if (es.eigenvalues()(1) / es.eigenvalues()(0) > 6.0) continue;
            const double d0 = distance(m0, cand);
            if (d0 < 0.3 || d0 > 2.0) continue;
            target = cand;
            break;
        }
        Vector q = q0;
        double d = 0.0;
        double prev = std::numeric_limits<double>::infinity();
        bool monotone = true;
        for (int step = 0; step < 500; ++step) {
            const TrackingCommand cmd = velocity_track_main(chain, q, target, gains, kVel, 0.1);
            d = cmd.diag.distance;
            if (d > prev + 1e-6) monotone = false;
            prev = d;
            if (d < 1e-2) break;
            q += 0.01 * cmd.command;
        }
        if (d < 1e-2 && monotone) ++converged;
    }
    CHECK(converged == 10);
}

TEST_CASE("scalar gain scaling is exact for powers of two") {
    const PlanarChain chain = PlanarChain::uniform(4);
    const Vector q = random_q(4);
    const SpdMatrix target = manipulability(chain, random_q(4), kVel).matrix;
    GainSpec g1, g2, g3;
    g1.km = Gain::scalar(1.5);
    g2.km = Gain::scalar(3.0);
    g3.km = Gain::scalar(6.0);
    const Vector c1 = velocity_track_main(chain, q, target, g1, kVel).command;
    const Vector c2 = velocity_track_main(chain, q, target, g2, kVel).command;
    const Vector c3 = velocity_track_main(chain, q, target, g3, kVel).command;
    CHECK(c2 == 2.0 * c1);
    CHECK(c3 == 4.0 * c1);
}

TEST_CASE("redundant controller is zero when both targets are met") {
    const PlanarChain chain = PlanarChain::uniform(4);
    const Vector q = random_q(4);
    const SpdMatrix target = manipulability(chain, q, kVel).matrix;
    const PlanarPose pose = fk(chain, q);
    GainSpec gains;
    gains.km = Gain::scalar(2.0);
    gains.kx = 10.0;
    const TrackingCommand cmd = velocity_track_redundant(
        chain, q, Eigen::Vector2d(pose.x1, pose.x2), target, gains, kVel);
    CHECK(cmd.command.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("task-jacobian nullspace projector annihilates task velocity") {
    for (int it = 0; it < 50; ++it) {
        const int n = 3 + (it % 3);
        const PlanarChain chain = PlanarChain::uniform(n);
        const Vector q = random_q(n);
        const Matrix jp = planar_jacobian(chain, q);
        const Matrix proj = Matrix::Identity(n, n) - damped_pinv(jp) * jp;
        const Vector v = random_mat(n, 1).col(0);
        CHECK((jp * proj * v).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("redundant tracking holds the tip while reducing the distance") {
    const PlanarChain chain = PlanarChain::uniform(4);
    GainSpec gains;
    gains.km = Gain::scalar(3.0);
    gains.kx = 60.0;
    int ok = 0;
    for (int it = 0; it < 5; ++it) {
        Vector q = random_q(4, 1.6);
        const PlanarPose start = fk(chain, q);
        const Eigen::Vector2d hold(start.x1, start.x2);

        // A target posture that shares the tip position: short random walk in
        // the task nullspace, then pinned back onto the hold point.
        Vector q_goal = q;
        const Matrix step_dirs = random_mat(4, 20);
        for (int s = 0; s < 20; ++s) {
            const Matrix jp = planar_jacobian(chain, q_goal);
            const Matrix proj = Matrix::Identity(4, 4) - damped_pinv(jp) * jp;
            q_goal += 0.05 * (proj * step_dirs.col(s));
        }
        q_goal = solve_ik(chain, hold, q_goal);
        const SpdMatrix target = manipulability(chain, q_goal, kVel).matrix;

        const double d0 = distance(manipulability(chain, q, kVel).matrix, target);
        if (d0 < 0.1) {
            ++ok;  // already matched by the walk; nothing to reduce
            continue;
        }
        double drift = 0.0, d = d0;
        for (int step = 0; step < 3500; ++step) {
            const TrackingCommand cmd =
                velocity_track_redundant(chain, q, hold, target, gains, kVel, 0.1);
            q += 0.002 * cmd.command;
            const PlanarPose pose = fk(chain, q);
            drift = std::max(drift, (Eigen::Vector2d(pose.x1, pose.x2) - hold).norm());
            d = cmd.diag.distance;
        }
        if (d < 0.5 * d0 && drift < 1e-3) ++ok;
    }
    CHECK(ok == 5);
}

TEST_CASE("acceleration command is exactly zero at rest on the target") {
    const PlanarChain chain = PlanarChain::uniform(4);
    const Vector q = random_q(4);
    const SpdMatrix target = manipulability(chain, q, kVel).matrix;
    GainSpec gains;
    gains.kp = Gain::scalar(25.0);
    gains.kd = Gain::scalar(10.0);
    const TrackingCommand cmd =
        accel_track(chain, q, Vector::Zero(4), target, Matrix::Zero(2, 2), gains, kVel);
    CHECK(cmd.command.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("acceleration tracking of a step target converges without overshoot") {
    const PlanarChain chain = PlanarChain::uniform(4);
    GainSpec gains;
    gains.kp = Gain::scalar(25.0);
    gains.kd = Gain::scalar(10.0);
    Vector q0(4);
    q0 << 0.3, 0.5, 0.5, 0.5;
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    Vector dq(4);
    for (int i = 0; i < 4; ++i) dq(i) = u(rng);
    const SpdMatrix target = manipulability(chain, Vector(q0 + dq), kVel).matrix;

    Vector q = q0, qdot = Vector::Zero(4);
    const double d0 = distance(manipulability(chain, q, kVel).matrix, target);
    double d = d0, overshoot = 0.0;
    bool reached = false;
    for (int step = 0; step < 4000; ++step) {
        const TrackingCommand cmd =
            accel_track(chain, q, qdot, target, Matrix::Zero(2, 2), gains, kVel, 0.1, 10.0);
        qdot += 0.005 * cmd.command;
        q += 0.005 * qdot;
        d = cmd.diag.distance;
        if (d < 1e-2) reached = true;
        if (reached) overshoot = std::max(overshoot, d);
    }
    CHECK(d < 1e-2);
    CHECK(overshoot < 0.05 * d0);
}

TEST_CASE("acceleration and velocity controllers share the fixed point") {
    const PlanarChain chain = PlanarChain::uniform(4);
    Vector q0(4);
    q0 << 0.4, 0.6, 0.4, 0.6;
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    Vector dq(4);
    for (int i = 0; i < 4; ++i) dq(i) = u(rng);
    const SpdMatrix target = manipulability(chain, Vector(q0 + dq), kVel).matrix;

    GainSpec vg;
    vg.km = Gain::scalar(5.0);
    Vector qv = q0;
    for (int step = 0; step < 2000; ++step)
        qv += 0.01 * velocity_track_main(chain, qv, target, vg, kVel, 0.1).command;

    GainSpec ag;
    ag.kp = Gain::scalar(25.0);
    ag.kd = Gain::scalar(10.0);
    Vector qa = q0, qdot = Vector::Zero(4);
    for (int step = 0; step < 4000; ++step) {
        const TrackingCommand cmd =
            accel_track(chain, qa, qdot, target, Matrix::Zero(2, 2), ag, kVel, 0.1, 10.0);
        qdot += 0.005 * cmd.command;
        qa += 0.005 * qdot;
    }
    CHECK(distance(manipulability(chain, qv, kVel).matrix, target) < 1e-2);
    CHECK(distance(manipulability(chain, qa, kVel).matrix, target) < 1e-2);
}

TEST_CASE("nullspace controller with zero secondary equals the main controller") {
    const PlanarChain chain = PlanarChain::uniform(6);
    const Vector q = random_q(6);
    const SpdMatrix target = manipulability(chain, random_q(6), kVel).matrix;
    GainSpec gains;
    gains.km = Gain::scalar(3.0);
    const Vector a = velocity_track_main(chain, q, target, gains, kVel).command;
    const Vector b = nullspace_secondary(chain, q, target, gains, Vector::Zero(6), kVel).command;
    CHECK(a == b);
}

TEST_CASE("manipulability-jacobian nullspace projector annihilates ellipsoid change") {
    for (int it = 0; it < 50; ++it) {
        const PlanarChain chain = PlanarChain::uniform(6);
        const Vector q = random_q(6);
        const Matrix j3 = manipulability_jacobian_mandel(chain, q, kVel);
        const Matrix pinv_t = damped_pinv(j3).transpose();
        const Matrix proj = Matrix::Identity(6, 6) - pinv_t * j3.transpose();
        const Vector v = random_mat(6, 1).col(0);
        CHECK((j3.transpose() * (proj * v)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("nullspace secondary objective pulls the first joint toward its reference") {
    const PlanarChain chain = PlanarChain::uniform(6);
    GainSpec gains;
    gains.km = Gain::scalar(5.0);
    Vector q0 = random_q(6, 1.5);
    const SpdMatrix target = manipulability(chain, random_q(6, 1.5), kVel).matrix;
    const double q1_ref = q0(0);

    const auto run = [&](bool with_secondary) {
        Vector q = q0;
        for (int step = 0; step < 800; ++step) {
            Vector qn = Vector::Zero(6);
            if (with_secondary) qn(0) = 2.0 * (q1_ref - q(0));
            q += 0.01 * nullspace_secondary(chain, q, target, gains, qn, kVel).command;
        }
        return q;
    };

    const Vector q_with = run(true);
    const Vector q_without = run(false);
    CHECK(distance(manipulability(chain, q_with, kVel).matrix, target) < 1e-2);
    CHECK(distance(manipulability(chain, q_without, kVel).matrix, target) < 1e-2);
    CHECK(std::abs(q_with(0) - q1_ref) < std::abs(q_without(0) - q1_ref));
}

TEST_CASE("precision gain of an isotropic tensor is a scaled identity") {
    const DenseTensor4 iso = mandel_fold4(Matrix::Identity(3, 3));
    const Matrix km = gain_from_precision(iso, 2.0, GainMode::Full);
    CHECK((km - 2.0 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("precision gain inverts anisotropic variances ten to one") {
    Matrix cov = Matrix::Identity(3, 3);
    cov(0, 0) = 1.0;
    cov(1, 1) = 10.0;
    cov(2, 2) = 10.0;
    const Matrix km = gain_from_precision(mandel_fold4(cov), 1.0, GainMode::Diagonal);
    CHECK(km(0, 0) / km(1, 1) == doctest::Approx(10.0).epsilon(1e-4));
}

TEST_CASE("precision gain is PSD for random covariance tensors") {
    for (int it = 0; it < 10; ++it) {
        const Matrix a = random_mat(3, 3);
        const Matrix cov = a * a.transpose() + 0.1 * Matrix::Identity(3, 3);
        const Matrix km = gain_from_precision(mandel_fold4(cov), 1.0, GainMode::Full);
        Eigen::SelfAdjointEigenSolver<Matrix> es(km, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("all baselines are exactly stationary at the target") {
    const PlanarChain chain = PlanarChain::uniform(4);
    const Vector q = random_q(4);
    const SpdMatrix target = manipulability(chain, q, kVel).matrix;
    GainSpec gains;
    for (BaselineMethod m : {BaselineMethod::Euclidean, BaselineMethod::Cholesky,
                             BaselineMethod::CholeskyJacobian, BaselineMethod::SteinGradient}) {
        const TrackingCommand cmd = baseline_track(m, chain, q, target, gains, 1.0);
        CHECK(cmd.command.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("stein gradient matches finite differences of the divergence") {
    for (int it = 0; it < 30; ++it) {
        const PlanarChain chain = PlanarChain::uniform(4);
        const Vector q = random_q(4);
        const SpdMatrix target = manipulability(chain, random_q(4), kVel).matrix;
        GainSpec gains;
        const TrackingCommand cmd = baseline_track(BaselineMethod::SteinGradient, chain, q, target,
                                                   gains, 1.0);
        const auto g_fn = [&](const Vector& x) {
            return stein_divergence(target.matrix(), manipulability(chain, x, kVel).matrix.matrix());
        };
        for (int k = 0; k < 4; ++k)
            CHECK(std::abs(-cmd.command(k) - central_diff_scalar(g_fn, q, k, 1e-6)) < 1e-6);
    }
}

TEST_CASE("volume gradient of a two-link arm depends only on the elbow angle") {
    // w(q) = |sin q2|; flat in q1 everywhere, stationary in q2 at pi/2.
    const PlanarChain chain = PlanarChain::uniform(2);
    Vector q(2);
    q << 0.3, M_PI / 2.0;
    const Vector g = index_gradient(IndexObjective::Volume, chain, q);
    CHECK(std::abs(g(0)) < 1e-12);
    CHECK(std::abs(g(1)) < 1e-12);
}

TEST_CASE("index gradients match finite differences") {
    for (int it = 0; it < 30; ++it) {
        const PlanarChain chain = PlanarChain::uniform(4);
        const Vector q = random_q(4);
        const Vector vol = index_gradient(IndexObjective::Volume, chain, q);
        const auto vol_fn = [&](const Vector& x) {
            const Matrix m = manipulability(chain, x, kVel).matrix.matrix();
            return std::sqrt(m.determinant());
        };
        std::uniform_real_distribution<double> ua(0.0, 2.0 * M_PI);
        const double a = ua(rng);
        const Eigen::Vector2d u(std::cos(a), std::sin(a));
        const Vector comp = index_gradient(IndexObjective::Compatibility, chain, q, u);
        const auto comp_fn = [&](const Vector& x) {
            const Matrix m = manipulability(chain, x, kVel).matrix.matrix();
            return 1.0 / u.dot(m.inverse() * u);
        };
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(vol(k) - central_diff_scalar(vol_fn, q, k, 1e-6)) < 1e-6);
            CHECK(std::abs(comp(k) - central_diff_scalar(comp_fn, q, k, 1e-6)) < 1e-6);
        }
    }
}

TEST_CASE("compatibility along a unit eigenvector equals the eigenvalue") {
    const PlanarChain chain = PlanarChain::uniform(3);
    const Vector q = random_q(3);
    const Matrix m = manipulability(chain, q, kVel).matrix.matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    for (int i = 0; i < 2; ++i) {
        const Eigen::Vector2d u = es.eigenvectors().col(i);
        const double c = 1.0 / u.dot(m.inverse() * u);
        CHECK(c == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-10));
    }
}

TEST_CASE("gain construction validates its inputs") {
    CHECK_THROWS_AS(Gain::scalar(-1.0), DomainError);
    Vector neg(3);
    neg << 1.0, -1.0, 1.0;
    CHECK_THROWS_AS(Gain::diagonal(neg), DomainError);
    Matrix indef(3, 3);
    indef.setIdentity();
    indef(0, 0) = -2.0;
    CHECK_THROWS_AS(Gain::full(indef), DomainError);
}
