#pragma once

#include <vector>

#include "manip/tensor.hpp"

namespace manip {

/// Planar serial chain of n revolute joints. Links are uniform thin rods
/// (mass m_i, center of mass at the midpoint, rotational inertia m l^2 / 12
/// about the center of mass).
struct PlanarChain {
    std::vector<double> lengths;    // m
    std::vector<double> masses;     // kg
    std::vector<double> qdot_max;   // rad/s, diagonal of the velocity limit matrix
    std::vector<double> tau_max;    // N m, diagonal of the torque limit matrix

    int dof() const { return static_cast<int>(lengths.size()); }
    void validate() const;

    /// Uniform chain with unit limits; the standard test fixture.
    static PlanarChain uniform(int n, double length = 1.0, double mass = 1.0);
};

struct PlanarPose {
    double x1 = 0.0;
    double x2 = 0.0;
    double phi = 0.0;  // rad, sum of joint angles
};

/// Tip pose of the chain.
PlanarPose fk(const PlanarChain& chain, const Vector& q);

/// World positions of the joint origins plus the tip: (n+1) columns of (x, y).
Matrix joint_points(const PlanarChain& chain, const Vector& q);

/// Hybrid 6 x n Jacobian of the tip, columns (w; v) with angular part on top.
Matrix jacobian(const PlanarChain& chain, const Vector& q);

/// The two in-plane translational rows of the tip Jacobian (2 x n).
Matrix planar_jacobian(const PlanarChain& chain, const Vector& q);

/// Hybrid 6 x n Jacobian of the center of mass of link `link` (0-based);
/// columns for joints beyond the link are zero.
Matrix link_com_jacobian(const PlanarChain& chain, const Vector& q, int link);

/// dJ/dq of a hybrid Jacobian as a 6 x n x n tensor, entry (:, i, j) being
/// the derivative of column i with respect to joint j. Works for any
/// point Jacobian of the chain (tip or link center of mass).
DenseTensor3 jacobian_dq_of(const Matrix& jac);

/// dJ/dq of the tip Jacobian.
DenseTensor3 jacobian_dq(const PlanarChain& chain, const Vector& q);

/// d2J/dq2 as a 6 x n x n x n tensor, entry (:, i, j, k) being
/// d2 J^i / (dq^k dq^j). Symmetric in (j, k).
DenseTensor4 jacobian_dq2_of(const Matrix& jac, const DenseTensor3& djac);

DenseTensor4 jacobian_dq2(const PlanarChain& chain, const Vector& q);

/// Joint-space inertia matrix, n x n symmetric positive definite.
Matrix inertia(const PlanarChain& chain, const Vector& q);

/// dLambda/dq as an n x n x n tensor with symmetric frontal slices.
DenseTensor3 inertia_dq(const PlanarChain& chain, const Vector& q);

}  // namespace manip
