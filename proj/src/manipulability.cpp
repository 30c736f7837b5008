#include "manip/manipulability.hpp"

#include <cmath>

namespace manip {

namespace {

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix diag_from(const std::vector<double>& v) {
    Vector d(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) d(static_cast<Eigen::Index>(i)) = v[i];
    return d.asDiagonal();
}

void require_nonsingular(const Matrix& jac, const char* what) {
    Eigen::JacobiSVD<Matrix> svd(jac);
    const Vector& s = svd.singularValues();
    if (s(s.size() - 1) < kSingularTol * s(0))
        throw SingularConfigError(std::string(what) + ": singular configuration");
}

// W Wdag for the velocity weighting, Omega = (W W')^-1 for torques.
Matrix velocity_weight(const PlanarChain& chain) {
    const Matrix w = diag_from(chain.qdot_max);
    return w * w.transpose();
}

Matrix torque_omega(const PlanarChain& chain) {
    const Matrix w = diag_from(chain.tau_max);
    return (w * w.transpose()).inverse();
}

// Frontal slices of dY/dq for Y = J Lambda^-1 (planar rows).
std::vector<Matrix> upsilon_dq_slices(const PlanarChain& chain, const Vector& q, const Matrix& jp,
                                      const Matrix& lambda_inv) {
    const int n = chain.dof();
    const DenseTensor3 dj = jacobian_dq(chain, q);
    const DenseTensor3 dl = inertia_dq(chain, q);
    const Matrix upsilon = jp * lambda_inv;
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        Matrix djk(2, n), dlk(n, n);
        for (int c = 0; c < n; ++c) {
            djk(0, c) = dj(3, c, k);
            djk(1, c) = dj(4, c, k);
            for (int r = 0; r < n; ++r) dlk(r, c) = dl(r, c, k);
        }
        out.push_back(djk * lambda_inv - upsilon * dlk * lambda_inv);
    }
    return out;
}

}  // namespace

Ellipsoid manipulability(const PlanarChain& chain, const Vector& q, const ManipKind& kind) {
    const Matrix jp = planar_jacobian(chain, q);
    switch (kind.type) {
        case ManipType::Velocity: {
            const Matrix m = kind.weighted ? sym(jp * velocity_weight(chain) * jp.transpose())
                                           : sym(jp * jp.transpose());
            return Ellipsoid{SpdMatrix(m), kind, q};
        }
        case ManipType::Force: {
            require_nonsingular(jp, "force manipulability");
            const Matrix core = kind.weighted ? sym(jp * torque_omega(chain) * jp.transpose())
                                              : sym(jp * jp.transpose());
            return Ellipsoid{SpdMatrix(sym(core.inverse())), kind, q};
        }
        case ManipType::Dynamic: {
            const Matrix lambda = inertia(chain, q);
            Eigen::JacobiSVD<Matrix> svd(lambda);
            if (svd.singularValues()(lambda.rows() - 1) < kSingularTol * svd.singularValues()(0))
                throw SingularConfigError("dynamic manipulability: singular inertia");
            const Matrix upsilon = jp * lambda.inverse();
            require_nonsingular(upsilon, "dynamic manipulability");
            const Matrix m = kind.weighted
                                 ? sym(upsilon * torque_omega(chain).inverse() * upsilon.transpose())
                                 : sym(upsilon * upsilon.transpose());
            return Ellipsoid{SpdMatrix(m), kind, q};
        }
    }
    throw DomainError("manipulability: unknown kind");
}

DenseTensor3 manipulability_jacobian(const PlanarChain& chain, const Vector& q,
                                     const ManipKind& kind) {
    const int n = chain.dof();
    const Matrix jp = planar_jacobian(chain, q);
    const DenseTensor3 dj = jacobian_dq(chain, q);

    std::vector<Matrix> dj_slices;
    dj_slices.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        Matrix djk(2, n);
        for (int c = 0; c < n; ++c) {
            djk(0, c) = dj(3, c, k);
            djk(1, c) = dj(4, c, k);
        }
        dj_slices.push_back(std::move(djk));
    }

    DenseTensor3 out(2, 2, n);
    switch (kind.type) {
        case ManipType::Velocity: {
            const Matrix w = kind.weighted ? velocity_weight(chain)
                                           : Matrix(Matrix::Identity(n, n));
            for (int k = 0; k < n; ++k) {
                const Matrix t = dj_slices[static_cast<std::size_t>(k)] * w * jp.transpose();
                out.set_slice(k, t + t.transpose());
            }
            return out;
        }
        case ManipType::Force: {
            require_nonsingular(jp, "force manipulability Jacobian");
            const Matrix w = kind.weighted ? torque_omega(chain) : Matrix(Matrix::Identity(n, n));
            const Matrix mf = sym(sym(jp * w * jp.transpose()).inverse());
            for (int k = 0; k < n; ++k) {
                const Matrix t = dj_slices[static_cast<std::size_t>(k)] * w * jp.transpose();
                out.set_slice(k, sym(-mf * (t + t.transpose()) * mf));
            }
            return out;
        }
        case ManipType::Dynamic: {
            const Matrix lambda = inertia(chain, q);
            const Matrix lambda_inv = lambda.inverse();
            const Matrix upsilon = jp * lambda_inv;
            require_nonsingular(upsilon, "dynamic manipulability Jacobian");
            const Matrix w = kind.weighted ? Matrix(torque_omega(chain).inverse())
                                           : Matrix(Matrix::Identity(n, n));
            const auto dups = upsilon_dq_slices(chain, q, jp, lambda_inv);
            for (int k = 0; k < n; ++k) {
                const Matrix t = dups[static_cast<std::size_t>(k)] * w * upsilon.transpose();
                out.set_slice(k, t + t.transpose());
            }
            return out;
        }
    }
    throw DomainError("manipulability_jacobian: unknown kind");
}

Matrix manipulability_rate(const PlanarChain& chain, const Vector& q, const Vector& qdot,
                           const ManipKind& kind) {
    if (qdot.size() != chain.dof()) throw ShapeError("manipulability_rate: qdot length mismatch");
    const DenseTensor3 mj = manipulability_jacobian(chain, q, kind);
    Matrix rate = Matrix::Zero(2, 2);
    for (int k = 0; k < chain.dof(); ++k) rate += qdot(k) * mj.slice(k);
    return rate;
}

DenseTensor3 manipulability_jacobian_dt(const PlanarChain& chain, const Vector& q,
                                        const Vector& qdot, const ManipKind& kind) {
    const int n = chain.dof();
    if (qdot.size() != n) throw ShapeError("manipulability_jacobian_dt: qdot length mismatch");

    if (kind.type != ManipType::Velocity) {
        // Certified fallback: central difference of the manipulability
        // Jacobian along qdot.
        const double h = 1e-6;
        const DenseTensor3 plus = manipulability_jacobian(chain, q + h * qdot, kind);
        const DenseTensor3 minus = manipulability_jacobian(chain, q - h * qdot, kind);
        DenseTensor3 out(2, 2, n);
        for (int k = 0; k < n; ++k) out.set_slice(k, (plus.slice(k) - minus.slice(k)) / (2.0 * h));
        return out;
    }

    const Matrix jac = jacobian(chain, q);
    const DenseTensor3 dj = jacobian_dq_of(jac);
    const DenseTensor4 d2j = jacobian_dq2_of(jac, dj);

    const Matrix w = kind.weighted ? velocity_weight(chain) : Matrix(Matrix::Identity(n, n));

    // Planar rows of J, Jdot, dJ/dq_j and d(dJ/dq_j)/dt.
    const Matrix jp = jac.middleRows(3, 2);
    Matrix jdot = Matrix::Zero(2, n);
    for (int j = 0; j < n; ++j)
        for (int c = 0; c < n; ++c) {
            jdot(0, c) += dj(3, c, j) * qdot(j);
            jdot(1, c) += dj(4, c, j) * qdot(j);
        }

    DenseTensor3 out(2, 2, n);
    for (int j = 0; j < n; ++j) {
        Matrix djj(2, n), d2jj(2, n);
        d2jj.setZero();
        for (int c = 0; c < n; ++c) {
            djj(0, c) = dj(3, c, j);
            djj(1, c) = dj(4, c, j);
            for (int k = 0; k < n; ++k) {
                d2jj(0, c) += d2j(3, c, j, k) * qdot(k);
                d2jj(1, c) += d2j(4, c, j, k) * qdot(k);
            }
        }
        const Matrix t = d2jj * w * jp.transpose() + djj * w * jdot.transpose();
        out.set_slice(j, t + t.transpose());
    }
    return out;
}

}  // namespace manip
