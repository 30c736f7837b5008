#include "manip/selftest.hpp"

#include <cmath>
#include <random>

#include "manip/numdiff.hpp"
#include "manip/tracking.hpp"

namespace manip::selftest {

namespace {

using Rng = std::mt19937_64;

Matrix random_sym(Rng& rng, int d, double scale, double max_norm = 0.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) {
            m(i, j) = g(rng);
            m(j, i) = m(i, j);
        }
    if (max_norm > 0.0 && m.norm() > max_norm) m *= max_norm / m.norm();
    return m;
}

// Base points stay within a bounded ball around the identity: tangents of
// norm 5 at strongly anisotropic bases map to matrices whose small
// eigenvalues are below double precision, so the round-trip identity is only
// meaningful on a moderate base ball.
SpdMatrix random_spd(Rng& rng, int d, double tangent_scale = 0.6) {
    return exp_map(SpdMatrix::identity(d), random_sym(rng, d, tangent_scale, 0.8));
}

Matrix random_invertible(Rng& rng, int d) {
    std::normal_distribution<double> g(0.0, 1.0);
    while (true) {
        Matrix w(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) w(i, j) = g(rng);
        if (std::abs(w.determinant()) > 0.1) return w;
    }
}

// Configurations away from the stretched/folded singularities. A single
// revolute joint spans only one task direction, so the rank filter applies
// from two joints up. The floor on the smallest singular value keeps the
// force- and dynamic-ellipsoid derivatives at magnitudes where an absolute
// finite-difference tolerance is meaningful.
Vector random_config(Rng& rng, const PlanarChain& chain) {
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    while (true) {
        Vector q(chain.dof());
        for (int i = 0; i < chain.dof(); ++i) q(i) = u(rng);
        if (chain.dof() < 2) return q;
        const Matrix jp = planar_jacobian(chain, q);
        Eigen::JacobiSVD<Matrix> svd(jp);
        if (svd.singularValues()(1) > 0.08 * svd.singularValues()(0) &&
            svd.singularValues()(1) > 0.5)
            return q;
    }
}

struct Collector {
    std::vector<CheckResult>& out;
    void add(const std::string& name, double worst, double tol) {
        out.push_back({name, worst, tol, worst < tol});
    }
};

}  // namespace

std::vector<CheckResult> manifold_suite(int cases, unsigned seed) {
    std::vector<CheckResult> results;
    Collector c{results};
    Rng rng(seed);
    const int d = 2;

    double exp_log = 0.0, dist_sym = 0.0, dist_self = 0.0, affine = 0.0, isometry = 0.0;
    double cov_roundtrip = 0.0, midpoint = 0.0, metric_norm = 0.0;
    bool cov_valid = true;

    for (int it = 0; it < cases; ++it) {
        const SpdMatrix base = random_spd(rng, d);
        const SpdMatrix other = random_spd(rng, d);
        const Matrix tangent = random_sym(rng, d, 1.5);

        // Exp/Log inversion over tangents with norm up to 5.
        const Matrix clipped = random_sym(rng, d, 2.0, 5.0);
        exp_log = std::max(exp_log,
                           (log_map(base, exp_map(base, clipped)) - clipped).cwiseAbs().maxCoeff());

        dist_sym = std::max(dist_sym, std::abs(distance(base, other) - distance(other, base)));
        dist_self = std::max(dist_self, distance(base, base));

        const Matrix w = random_invertible(rng, d);
        const SpdMatrix wa(w * base.matrix() * w.transpose());
        const SpdMatrix wb(w * other.matrix() * w.transpose());
        affine = std::max(affine, std::abs(distance(wa, wb) - distance(base, other)));

        // Metric consistency: |Log|_base equals the distance.
        const Matrix l = log_map(base, other);
        metric_norm = std::max(metric_norm, std::abs(std::sqrt(inner_product(base, l, l)) -
                                                     distance(base, other)));

        // Transport isometry.
        const Matrix t2 = random_sym(rng, d, 1.0);
        const double before = inner_product(base, tangent, t2);
        const double after = inner_product(other, transport_sym(base, other, tangent),
                                           transport_sym(base, other, t2));
        isometry = std::max(isometry, std::abs(before - after));

        // Covariance transport: validity and round trip.
        std::vector<Matrix> samples;
        for (int s = 0; s < 5; ++s) samples.push_back(random_sym(rng, d, 1.0));
        const DenseTensor4 cov = covariance_tensor(samples, Matrix::Zero(d, d));
        const DenseTensor4 moved = transport_cov4(base, other, cov);
        cov_valid = cov_valid && is_covariance_tensor(moved, 1e-9);
        const DenseTensor4 back = transport_cov4(other, base, moved);
        double rt = 0.0;
        for (Eigen::Index i = 0; i < cov.size(); ++i)
            rt = std::max(rt, std::abs(cov.data()[static_cast<std::size_t>(i)] -
                                       back.data()[static_cast<std::size_t>(i)]));
        cov_roundtrip = std::max(cov_roundtrip, rt);

        // Geodesic midpoint equidistance.
        const SpdMatrix mid = exp_map(base, 0.5 * log_map(base, other));
        midpoint = std::max(midpoint, std::abs(distance(base, mid) - distance(mid, other)));
    }

    c.add("exp/log inversion", exp_log, 1e-10);
    c.add("distance symmetry", dist_sym, 1e-12);
    c.add("distance identity", dist_self, 1e-12);
    c.add("distance affine invariance", affine, 1e-10);
    c.add("log norm matches distance", metric_norm, 1e-10);
    c.add("transport isometry", isometry, 1e-10);
    c.add("covariance transport validity", cov_valid ? 0.0 : 1.0, 0.5);
    c.add("covariance transport round trip", cov_roundtrip, 1e-10);
    c.add("geodesic midpoint equidistance", midpoint, 1e-10);
    return results;
}

std::vector<CheckResult> derivative_suite(int configs_per_size, const std::vector<int>& sizes,
                                          unsigned seed) {
    std::vector<CheckResult> results;
    Collector c{results};
    Rng rng(seed);

    double jac_err = 0.0, djac_err = 0.0, d2jac_err = 0.0, dinertia_err = 0.0;
    double manip_err = 0.0, mjdot_err = 0.0, grad_err = 0.0, contraction_err = 0.0;

    for (int n : sizes) {
        const PlanarChain chain = PlanarChain::uniform(n);
        for (int it = 0; it < configs_per_size; ++it) {
            const Vector q = random_config(rng, chain);
            std::normal_distribution<double> g(0.0, 1.0);
            Vector qdot(n);
            for (int i = 0; i < n; ++i) qdot(i) = g(rng);

            // Jacobian against the forward kinematics.
            const auto fk_fn = [&](const Vector& x) {
                const PlanarPose p = fk(chain, x);
                Matrix m(2, 1);
                m << p.x1, p.x2;
                return m;
            };
            const Matrix jp = planar_jacobian(chain, q);
            for (int j = 0; j < n; ++j) {
                const Matrix fd = central_diff(fk_fn, q, j, 1e-6);
                jac_err = std::max(jac_err, (jp.col(j) - fd.col(0)).cwiseAbs().maxCoeff());
            }

            // dJ/dq against the Jacobian.
            const auto jac_fn = [&](const Vector& x) { return jacobian(chain, x); };
            const DenseTensor3 dj = jacobian_dq(chain, q);
            for (int j = 0; j < n; ++j) {
                const Matrix fd = central_diff(jac_fn, q, j, 1e-6);
                double e = 0.0;
                for (int r = 0; r < 6; ++r)
                    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(dj(r, i, j) - fd(r, i)));
                djac_err = std::max(djac_err, e);
            }

            // d2J/dq2 against dJ/dq (sliced as matrices per (j, k)).
            const DenseTensor4 d2j = jacobian_dq2(chain, q);
            for (int k = 0; k < n; ++k) {
                const auto dj_fn = [&](const Vector& x) {
                    const DenseTensor3 t = jacobian_dq(chain, x);
                    Matrix m(6, n * n);
                    for (int r = 0; r < 6; ++r)
                        for (int i = 0; i < n; ++i)
                            for (int j = 0; j < n; ++j) m(r, i * n + j) = t(r, i, j);
                    return m;
                };
                const Matrix fd = central_diff(dj_fn, q, k, 1e-5);
                double e = 0.0;
                for (int r = 0; r < 6; ++r)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            e = std::max(e, std::abs(d2j(r, i, j, k) - fd(r, i * n + j)));
                d2jac_err = std::max(d2jac_err, e);
            }

            // dLambda/dq against the inertia matrix.
            const auto inertia_fn = [&](const Vector& x) { return inertia(chain, x); };
            const DenseTensor3 dl = inertia_dq(chain, q);
            for (int k = 0; k < n; ++k) {
                const Matrix fd = central_diff(inertia_fn, q, k, 1e-6);
                double e = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) e = std::max(e, std::abs(dl(a, b, k) - fd(a, b)));
                dinertia_err = std::max(dinertia_err, e);
            }

            // Time-derivative contraction of dJ/dq along qdot.
            {
                const auto jac_dir = [&](const Vector& x) { return jacobian(chain, x); };
                const Matrix fd = central_diff_dir(jac_dir, q, qdot, 1e-5);
                Matrix an = Matrix::Zero(6, n);
                for (int j = 0; j < n; ++j)
                    for (int r = 0; r < 6; ++r)
                        for (int i = 0; i < n; ++i) an(r, i) += dj(r, i, j) * qdot(j);
                contraction_err = std::max(contraction_err, (an - fd).cwiseAbs().maxCoeff());
            }

            // Ellipsoid-level checks need a full-rank task Jacobian.
            if (n < 2) continue;

            // Manipulability Jacobians, all three kinds.
            for (const ManipType type : {ManipType::Velocity, ManipType::Force, ManipType::Dynamic}) {
                const ManipKind kind{type, false};
                const auto manip_fn = [&](const Vector& x) {
                    return manipulability(chain, x, kind).matrix.matrix();
                };
                const DenseTensor3 mj = manipulability_jacobian(chain, q, kind);
                for (int k = 0; k < n; ++k) {
                    const Matrix fd = central_diff(manip_fn, q, k, 1e-6);
                    manip_err = std::max(manip_err, (mj.slice(k) - fd).cwiseAbs().maxCoeff());
                }
            }

            // Time derivative of the velocity manipulability Jacobian.
            {
                const ManipKind kind{ManipType::Velocity, false};
                const auto mj_fn = [&](const Vector& x) {
                    return mandel_matricize3(manipulability_jacobian(chain, x, kind));
                };
                const Matrix fd = central_diff_dir(mj_fn, q, qdot, 1e-5);
                const Matrix an = mandel_matricize3(manipulability_jacobian_dt(chain, q, qdot, kind));
                mjdot_err = std::max(mjdot_err, (an - fd).cwiseAbs().maxCoeff());
            }

            // Stein, volume and compatibility gradients.
            {
                const SpdMatrix target = random_spd(rng, 2, 0.8);
                const auto g_fn = [&](const Vector& x) {
                    const Matrix m = manipulability(chain, x, {ManipType::Velocity, false}).matrix.matrix();
                    return stein_divergence(target.matrix(), m);
                };
                GainSpec gains;
                const TrackingCommand cmd =
                    baseline_track(BaselineMethod::SteinGradient, chain, q, target, gains, 1.0);
                for (int k = 0; k < n; ++k) {
                    const double fd = central_diff_scalar(g_fn, q, k, 1e-6);
                    grad_err = std::max(grad_err, std::abs(-cmd.command(k) - fd));
                }

                const auto vol_fn = [&](const Vector& x) {
                    const Matrix m = manipulability(chain, x, {ManipType::Velocity, false}).matrix.matrix();
                    return std::sqrt(m.determinant());
                };
                const Vector vol_grad = index_gradient(IndexObjective::Volume, chain, q);
                std::uniform_real_distribution<double> ua(0.0, 2.0 * M_PI);
                const double angle = ua(rng);
                const Eigen::Vector2d u(std::cos(angle), std::sin(angle));
                const auto comp_fn = [&](const Vector& x) {
                    const Matrix m = manipulability(chain, x, {ManipType::Velocity, false}).matrix.matrix();
                    return 1.0 / u.dot(m.inverse() * u);
                };
                const Vector comp_grad =
                    index_gradient(IndexObjective::Compatibility, chain, q, u);
                for (int k = 0; k < n; ++k) {
                    grad_err = std::max(grad_err,
                                        std::abs(vol_grad(k) - central_diff_scalar(vol_fn, q, k, 1e-6)));
                    grad_err = std::max(grad_err, std::abs(comp_grad(k) -
                                                           central_diff_scalar(comp_fn, q, k, 1e-6)));
                }
            }
        }
    }

    c.add("jacobian vs forward kinematics", jac_err, 1e-6);
    c.add("jacobian joint derivative", djac_err, 1e-5);
    c.add("jacobian second joint derivative", d2jac_err, 1e-4);
    c.add("inertia joint derivative", dinertia_err, 1e-5);
    c.add("manipulability jacobians (3 kinds)", manip_err, 1e-5);
    c.add("manipulability jacobian time derivative", mjdot_err, 1e-4);
    c.add("stein/volume/compatibility gradients", grad_err, 1e-6);
    c.add("jacobian time-derivative contraction", contraction_err, 1e-6);
    return results;
}

bool all_pass(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace manip::selftest
