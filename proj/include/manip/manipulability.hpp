#pragma once

#include "manip/kinematics.hpp"
#include "manip/spd.hpp"

namespace manip {

enum class ManipType { Velocity, Force, Dynamic };

/// Selects which ellipsoid to compute and whether actuator limits are folded
/// in (velocity limits for Velocity, torque limits for Force and Dynamic).
struct ManipKind {
    ManipType type = ManipType::Velocity;
    bool weighted = false;
};

/// A manipulability ellipsoid together with the configuration it was
/// evaluated at. Planar chains yield 2 x 2 ellipsoids.
struct Ellipsoid {
    SpdMatrix matrix;
    ManipKind kind;
    Vector config;
};

/// Relative singular-value threshold below which Force/Dynamic ellipsoids
/// are refused as singular.
inline constexpr double kSingularTol = 1e-8;

/// Velocity: J J', Force: (J J')^-1, Dynamic: Y Y' with Y = J Lambda^-1,
/// plus the actuator-weighted variants.
Ellipsoid manipulability(const PlanarChain& chain, const Vector& q, const ManipKind& kind);

/// First-order sensitivity of the ellipsoid to the joints, D x D x n with
/// symmetric frontal slices.
DenseTensor3 manipulability_jacobian(const PlanarChain& chain, const Vector& q,
                                     const ManipKind& kind);

/// Rate of change of the ellipsoid along qdot: contraction of the
/// manipulability Jacobian with the joint velocity (symmetric D x D).
Matrix manipulability_rate(const PlanarChain& chain, const Vector& q, const Vector& qdot,
                           const ManipKind& kind);

/// Time derivative of the manipulability Jacobian along qdot. Analytic for
/// the velocity kind; Force/Dynamic fall back to a central finite difference
/// along qdot with step 1e-6.
DenseTensor3 manipulability_jacobian_dt(const PlanarChain& chain, const Vector& q,
                                        const Vector& qdot, const ManipKind& kind);

}  // namespace manip
