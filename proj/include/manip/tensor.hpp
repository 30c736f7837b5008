#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "manip/errors.hpp"

namespace manip {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense 3rd-order tensor, row-major storage (last index fastest).
class DenseTensor3 {
public:
    DenseTensor3() = default;
    DenseTensor3(Eigen::Index i, Eigen::Index j, Eigen::Index k);

    Eigen::Index dim(int n) const { return dims_[n]; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(data_.size()); }

    double& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
        return data_[static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k)];
    }
    double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
        return data_[static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k)];
    }

    /// Frontal slice T[:,:,k] as a matrix.
    Matrix slice(Eigen::Index k) const;
    void set_slice(Eigen::Index k, const Matrix& m);

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::array<Eigen::Index, 3> dims_{0, 0, 0};
    std::vector<double> data_;
};

/// Dense 4th-order tensor, row-major storage.
class DenseTensor4 {
public:
    DenseTensor4() = default;
    DenseTensor4(Eigen::Index i, Eigen::Index j, Eigen::Index k, Eigen::Index l);

    Eigen::Index dim(int n) const { return dims_[n]; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(data_.size()); }

    double& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k, Eigen::Index l) {
        return data_[static_cast<std::size_t>(((i * dims_[1] + j) * dims_[2] + k) * dims_[3] + l)];
    }
    double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k, Eigen::Index l) const {
        return data_[static_cast<std::size_t>(((i * dims_[1] + j) * dims_[2] + k) * dims_[3] + l)];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    DenseTensor4& operator+=(const DenseTensor4& other);
    DenseTensor4& operator*=(double s);

private:
    std::array<Eigen::Index, 4> dims_{0, 0, 0, 0};
    std::vector<double> data_;
};

/// Size of the Mandel vector of a symmetric D x D matrix.
inline Eigen::Index mandel_dim(Eigen::Index d) { return d + d * (d - 1) / 2; }

/// Orthonormal (Mandel) vectorization of a symmetric matrix: diagonal entries
/// first, then column-major lower-triangle entries scaled by sqrt(2), so that
/// the Euclidean norm of the vector equals the Frobenius norm of the matrix.
Vector mandel_vec(const Matrix& sym);

/// Inverse of mandel_vec. Exact round trip for symmetric input.
Matrix mandel_fold(const Vector& v);

/// k-th Mandel basis matrix of Sym(d): E_k with mandel_vec(E_k) = e_k.
Matrix mandel_basis(Eigen::Index d, Eigen::Index k);

/// n-mode product T x_n A (modes are 1-based as is conventional).
DenseTensor3 n_mode_product(const DenseTensor3& t, const Matrix& a, int mode);
DenseTensor4 n_mode_product(const DenseTensor4& t, const Matrix& a, int mode);

/// n-mode matricization T_(n): rows indexed by mode n, remaining modes
/// flattened in increasing order with the later mode varying fastest.
Matrix matricize(const DenseTensor3& t, int mode);
Matrix matricize(const DenseTensor4& t, int mode);

/// Mode-3 matricization of a D x D x K tensor with symmetric frontal slices,
/// rows are Mandel vectors of the slices (K x Dtilde).
Matrix mandel_matricize3(const DenseTensor3& t);

/// Mandel unfolding of a D^4 covariance-like tensor into Dtilde x Dtilde.
Matrix mandel_unfold(const DenseTensor4& s);

/// Inverse of mandel_unfold on tensors symmetric in (i,j) and (k,l).
DenseTensor4 mandel_fold4(const Matrix& m);

/// Contraction over the two contravariant indices: R_ij = sum_kl S_ijkl X_kl.
Matrix contract4_2(const DenseTensor4& s, const Matrix& x);

/// Tensor (outer) product of two matrices: (X o Y)_ijkl = X_ij Y_kl.
DenseTensor4 outer(const Matrix& x, const Matrix& y);

/// Sample covariance tensor of symmetric matrices about a given center,
/// S = 1/(N-1) sum (X_n - center) o (X_n - center).
DenseTensor4 covariance_tensor(const std::vector<Matrix>& samples, const Matrix& center);

/// Checks the covariance-tensor invariants: pair-exchange symmetry of (i,j)
/// and (k,l) blocks and positive semi-definite Mandel unfolding.
bool is_covariance_tensor(const DenseTensor4& s, double tol = 1e-10);

}  // namespace manip
