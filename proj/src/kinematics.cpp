#include "manip/kinematics.hpp"

#include <cmath>

namespace manip {

namespace {

using Vec3 = Eigen::Vector3d;
using Col6 = Eigen::Matrix<double, 6, 1>;

Vec3 top(const Col6& c) { return c.head<3>(); }
Vec3 bottom(const Col6& c) { return c.tail<3>(); }

// P-form operator of a Jacobian column applied to another column:
// (w_x cross w_y; w_x cross v_y).
Col6 p_apply(const Col6& x, const Col6& y) {
    Col6 r;
    r.head<3>() = top(x).cross(top(y));
    r.tail<3>() = top(x).cross(bottom(y));
    return r;
}

// M-form operator: (0; v_x cross w_y).
Col6 m_apply(const Col6& x, const Col6& y) {
    Col6 r = Col6::Zero();
    r.tail<3>() = bottom(x).cross(top(y));
    return r;
}

// Derivative of column i of a hybrid Jacobian w.r.t. joint j, given the
// columns themselves.
Col6 d_column(const Matrix& jac, Eigen::Index i, Eigen::Index j) {
    const Col6 ji = jac.col(i);
    const Col6 jj = jac.col(j);
    return (j <= i) ? p_apply(jj, ji) : Col6(-m_apply(jj, ji));
}

}  // namespace

void PlanarChain::validate() const {
    const std::size_t n = lengths.size();
    if (n < 1) throw DomainError("PlanarChain: need at least one joint");
    if (masses.size() != n || qdot_max.size() != n || tau_max.size() != n)
        throw ShapeError("PlanarChain: per-link arrays must share one length");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lengths[i] > 0.0 && masses[i] > 0.0 && qdot_max[i] > 0.0 && tau_max[i] > 0.0))
            throw DomainError("PlanarChain: lengths, masses and limits must be positive");
    }
}

PlanarChain PlanarChain::uniform(int n, double length, double mass) {
    PlanarChain c;
    c.lengths.assign(static_cast<std::size_t>(n), length);
    c.masses.assign(static_cast<std::size_t>(n), mass);
    c.qdot_max.assign(static_cast<std::size_t>(n), 1.0);
    c.tau_max.assign(static_cast<std::size_t>(n), 1.0);
    c.validate();
    return c;
}

Matrix joint_points(const PlanarChain& chain, const Vector& q) {
    const int n = chain.dof();
    if (q.size() != n) throw ShapeError("joint_points: q length must equal dof");
    Matrix p(2, n + 1);
    p.col(0).setZero();
    double theta = 0.0;
    for (int i = 0; i < n; ++i) {
        theta += q(i);
        p(0, i + 1) = p(0, i) + chain.lengths[static_cast<std::size_t>(i)] * std::cos(theta);
        p(1, i + 1) = p(1, i) + chain.lengths[static_cast<std::size_t>(i)] * std::sin(theta);
    }
    return p;
}

PlanarPose fk(const PlanarChain& chain, const Vector& q) {
    const Matrix p = joint_points(chain, q);
    PlanarPose pose;
    pose.x1 = p(0, chain.dof());
    pose.x2 = p(1, chain.dof());
    pose.phi = q.sum();
    return pose;
}

namespace {

// Hybrid Jacobian of a world point rigidly attached to link `last` (columns
// beyond `last` are zero). All joint axes are world z.
Matrix point_jacobian(const PlanarChain& chain, const Vector& q, int last, const Vec3& point) {
    const int n = chain.dof();
    const Matrix jp = joint_points(chain, q);
    Matrix jac = Matrix::Zero(6, n);
    for (int i = 0; i <= last; ++i) {
        const Vec3 axis(0.0, 0.0, 1.0);
        const Vec3 origin(jp(0, i), jp(1, i), 0.0);
        jac.block<3, 1>(0, i) = axis;
        jac.block<3, 1>(3, i) = axis.cross(point - origin);
    }
    return jac;
}

}  // namespace

Matrix jacobian(const PlanarChain& chain, const Vector& q) {
    const int n = chain.dof();
    if (q.size() != n) throw ShapeError("jacobian: q length must equal dof");
    const Matrix jp = joint_points(chain, q);
    const Vec3 tip(jp(0, n), jp(1, n), 0.0);
    return point_jacobian(chain, q, n - 1, tip);
}

Matrix planar_jacobian(const PlanarChain& chain, const Vector& q) {
    return jacobian(chain, q).middleRows(3, 2);
}

Matrix link_com_jacobian(const PlanarChain& chain, const Vector& q, int link) {
    const int n = chain.dof();
    if (q.size() != n) throw ShapeError("link_com_jacobian: q length must equal dof");
    if (link < 0 || link >= n) throw ShapeError("link_com_jacobian: link out of range");
    const Matrix jp = joint_points(chain, q);
    const Vec3 com(0.5 * (jp(0, link) + jp(0, link + 1)), 0.5 * (jp(1, link) + jp(1, link + 1)), 0.0);
    return point_jacobian(chain, q, link, com);
}

DenseTensor3 jacobian_dq_of(const Matrix& jac) {
    const Eigen::Index n = jac.cols();
    DenseTensor3 d(6, n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const Col6 c = d_column(jac, i, j);
            for (Eigen::Index r = 0; r < 6; ++r) d(r, i, j) = c(r);
        }
    return d;
}

DenseTensor3 jacobian_dq(const PlanarChain& chain, const Vector& q) {
    return jacobian_dq_of(jacobian(chain, q));
}

DenseTensor4 jacobian_dq2_of(const Matrix& jac, const DenseTensor3& djac) {
    const Eigen::Index n = jac.cols();
    DenseTensor4 d2(6, n, n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Col6 ji = jac.col(i);
        for (Eigen::Index j = 0; j < n; ++j) {
            const Col6 jj = jac.col(j);
            for (Eigen::Index k = 0; k < n; ++k) {
                Col6 djk, dik;
                for (Eigen::Index r = 0; r < 6; ++r) {
                    djk(r) = djac(r, j, k);
                    dik(r) = djac(r, i, k);
                }
                // Product rule on dJ^i/dq^j, the P/M form fixed by (j, i).
                Col6 c;
                if (j <= i)
                    c = p_apply(djk, ji) + p_apply(jj, dik);
                else
                    c = -m_apply(djk, ji) - m_apply(jj, dik);
                for (Eigen::Index r = 0; r < 6; ++r) d2(r, i, j, k) = c(r);
            }
        }
    }
    return d2;
}

DenseTensor4 jacobian_dq2(const PlanarChain& chain, const Vector& q) {
    const Matrix jac = jacobian(chain, q);
    return jacobian_dq2_of(jac, jacobian_dq_of(jac));
}

namespace {

// Spatial inertia of link i about its center of mass, in the hybrid frame
// (angular block first). Planar rods spin about world z only, so the
// orientation-invariant z-axis moment is all that is needed.
Eigen::Matrix<double, 6, 6> link_spatial_inertia(const PlanarChain& chain, int link) {
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
    const double mass = chain.masses[static_cast<std::size_t>(link)];
    const double len = chain.lengths[static_cast<std::size_t>(link)];
    m(2, 2) = mass * len * len / 12.0;
    m.block<3, 3>(3, 3) = mass * Matrix::Identity(3, 3);
    return m;
}

}  // namespace

Matrix inertia(const PlanarChain& chain, const Vector& q) {
    const int n = chain.dof();
    Matrix lambda = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const Matrix ji = link_com_jacobian(chain, q, i);
        lambda += ji.transpose() * link_spatial_inertia(chain, i) * ji;
    }
    return 0.5 * (lambda + lambda.transpose());
}

DenseTensor3 inertia_dq(const PlanarChain& chain, const Vector& q) {
    const int n = chain.dof();
    DenseTensor3 d(n, n, n);
    for (int i = 0; i < n; ++i) {
        const Matrix ji = link_com_jacobian(chain, q, i);
        const DenseTensor3 dji = jacobian_dq_of(ji);
        const Eigen::Matrix<double, 6, 6> mi = link_spatial_inertia(chain, i);
        const Matrix mji = mi * ji;
        for (int k = 0; k < n; ++k) {
            Matrix djk(6, n);
            for (Eigen::Index r = 0; r < 6; ++r)
                for (Eigen::Index c = 0; c < n; ++c) djk(r, c) = dji(r, c, k);
            const Matrix term = djk.transpose() * mji;
            const Matrix slice = term + term.transpose();
            for (Eigen::Index a = 0; a < n; ++a)
                for (Eigen::Index b = 0; b < n; ++b) d(a, b, k) += slice(a, b);
        }
    }
    return d;
}

}  // namespace manip
