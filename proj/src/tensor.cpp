#include "manip/tensor.hpp"

#include <cmath>

namespace manip {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw ShapeError(msg);
}

}  // namespace

DenseTensor3::DenseTensor3(Eigen::Index i, Eigen::Index j, Eigen::Index k)
    : dims_{i, j, k}, data_(static_cast<std::size_t>(i * j * k), 0.0) {
    require(i > 0 && j > 0 && k > 0, "DenseTensor3: dims must be positive");
}

Matrix DenseTensor3::slice(Eigen::Index k) const {
    Matrix m(dims_[0], dims_[1]);
    for (Eigen::Index i = 0; i < dims_[0]; ++i)
        for (Eigen::Index j = 0; j < dims_[1]; ++j) m(i, j) = (*this)(i, j, k);
    return m;
}

void DenseTensor3::set_slice(Eigen::Index k, const Matrix& m) {
    require(m.rows() == dims_[0] && m.cols() == dims_[1], "set_slice: shape mismatch");
    for (Eigen::Index i = 0; i < dims_[0]; ++i)
        for (Eigen::Index j = 0; j < dims_[1]; ++j) (*this)(i, j, k) = m(i, j);
}

DenseTensor4::DenseTensor4(Eigen::Index i, Eigen::Index j, Eigen::Index k, Eigen::Index l)
    : dims_{i, j, k, l}, data_(static_cast<std::size_t>(i * j * k * l), 0.0) {
    require(i > 0 && j > 0 && k > 0 && l > 0, "DenseTensor4: dims must be positive");
}

DenseTensor4& DenseTensor4::operator+=(const DenseTensor4& other) {
    require(dims_ == other.dims_, "tensor sum: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

DenseTensor4& DenseTensor4::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Vector mandel_vec(const Matrix& sym) {
    require(sym.rows() == sym.cols(), "mandel_vec: matrix must be square");
    const Eigen::Index d = sym.rows();
    Vector v(mandel_dim(d));
    for (Eigen::Index i = 0; i < d; ++i) v(i) = sym(i, i);
    const double s2 = std::sqrt(2.0);
    Eigen::Index r = d;
    for (Eigen::Index j = 0; j < d - 1; ++j)
        for (Eigen::Index i = j + 1; i < d; ++i) v(r++) = s2 * sym(i, j);
    return v;
}

Matrix mandel_fold(const Vector& v) {
    // Invert Dtilde = d(d+1)/2.
    const Eigen::Index dt = v.size();
    const Eigen::Index d = static_cast<Eigen::Index>(std::lround((std::sqrt(8.0 * dt + 1.0) - 1.0) / 2.0));
    require(mandel_dim(d) == dt, "mandel_fold: invalid vector length");
    Matrix m = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) m(i, i) = v(i);
    const double inv_s2 = 1.0 / std::sqrt(2.0);
    Eigen::Index r = d;
    for (Eigen::Index j = 0; j < d - 1; ++j)
        for (Eigen::Index i = j + 1; i < d; ++i) {
            m(i, j) = v(r) * inv_s2;
            m(j, i) = m(i, j);
            ++r;
        }
    return m;
}

Matrix mandel_basis(Eigen::Index d, Eigen::Index k) {
    Vector e = Vector::Zero(mandel_dim(d));
    e(k) = 1.0;
    return mandel_fold(e);
}

namespace {

// Generic n-mode product over a row-major buffer with given dims.
template <std::size_t N>
std::vector<double> mode_product(const std::vector<double>& x,
                                 const std::array<Eigen::Index, N>& dims,
                                 const Matrix& a, int mode,
                                 std::array<Eigen::Index, N>& out_dims) {
    const int m = mode - 1;
    require(m >= 0 && m < static_cast<int>(N), "n_mode_product: mode out of range");
    require(a.cols() == dims[m], "n_mode_product: matrix columns must match tensor mode dim");

    out_dims = dims;
    out_dims[m] = a.rows();

    Eigen::Index outer_sz = 1, inner_sz = 1;
    for (int i = 0; i < m; ++i) outer_sz *= dims[i];
    for (int i = m + 1; i < static_cast<int>(N); ++i) inner_sz *= dims[i];

    std::vector<double> y(static_cast<std::size_t>(outer_sz * a.rows() * inner_sz), 0.0);
    for (Eigen::Index o = 0; o < outer_sz; ++o)
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            for (Eigen::Index c = 0; c < dims[m]; ++c) {
                const double w = a(r, c);
                if (w == 0.0) continue;
                const double* src = x.data() + (o * dims[m] + c) * inner_sz;
                double* dst = y.data() + (o * a.rows() + r) * inner_sz;
                for (Eigen::Index t = 0; t < inner_sz; ++t) dst[t] += w * src[t];
            }
    return y;
}

template <std::size_t N>
Matrix unfold(const std::vector<double>& x, const std::array<Eigen::Index, N>& dims, int mode) {
    const int m = mode - 1;
    require(m >= 0 && m < static_cast<int>(N), "matricize: mode out of range");
    Eigen::Index outer_sz = 1, inner_sz = 1;
    for (int i = 0; i < m; ++i) outer_sz *= dims[i];
    for (int i = m + 1; i < static_cast<int>(N); ++i) inner_sz *= dims[i];

    // Column index flattens the remaining modes in increasing order, with the
    // later mode varying fastest (consistent with row-major storage).
    Matrix r(dims[m], outer_sz * inner_sz);
    for (Eigen::Index o = 0; o < outer_sz; ++o)
        for (Eigen::Index i = 0; i < dims[m]; ++i)
            for (Eigen::Index t = 0; t < inner_sz; ++t)
                r(i, o * inner_sz + t) = x[static_cast<std::size_t>((o * dims[m] + i) * inner_sz + t)];
    return r;
}

}  // namespace

DenseTensor3 n_mode_product(const DenseTensor3& t, const Matrix& a, int mode) {
    std::array<Eigen::Index, 3> dims{t.dim(0), t.dim(1), t.dim(2)}, out{};
    auto y = mode_product<3>(t.data(), dims, a, mode, out);
    DenseTensor3 r(out[0], out[1], out[2]);
    r.data() = std::move(y);
    return r;
}

DenseTensor4 n_mode_product(const DenseTensor4& t, const Matrix& a, int mode) {
    std::array<Eigen::Index, 4> dims{t.dim(0), t.dim(1), t.dim(2), t.dim(3)}, out{};
    auto y = mode_product<4>(t.data(), dims, a, mode, out);
    DenseTensor4 r(out[0], out[1], out[2], out[3]);
    r.data() = std::move(y);
    return r;
}

Matrix matricize(const DenseTensor3& t, int mode) {
    std::array<Eigen::Index, 3> dims{t.dim(0), t.dim(1), t.dim(2)};
    return unfold<3>(t.data(), dims, mode);
}

Matrix matricize(const DenseTensor4& t, int mode) {
    std::array<Eigen::Index, 4> dims{t.dim(0), t.dim(1), t.dim(2), t.dim(3)};
    return unfold<4>(t.data(), dims, mode);
}

Matrix mandel_matricize3(const DenseTensor3& t) {
    require(t.dim(0) == t.dim(1), "mandel_matricize3: slices must be square");
    const Eigen::Index k = t.dim(2);
    Matrix r(k, mandel_dim(t.dim(0)));
    for (Eigen::Index s = 0; s < k; ++s) r.row(s) = mandel_vec(t.slice(s)).transpose();
    return r;
}

Matrix mandel_unfold(const DenseTensor4& s) {
    require(s.dim(0) == s.dim(1) && s.dim(0) == s.dim(2) && s.dim(0) == s.dim(3),
            "mandel_unfold: tensor must be D^4");
    const Eigen::Index d = s.dim(0);
    const Eigen::Index dt = mandel_dim(d);
    std::vector<Matrix> basis;
    basis.reserve(static_cast<std::size_t>(dt));
    for (Eigen::Index k = 0; k < dt; ++k) basis.push_back(mandel_basis(d, k));

    Matrix r(dt, dt);
    for (Eigen::Index a = 0; a < dt; ++a)
        for (Eigen::Index b = 0; b < dt; ++b) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j)
                    for (Eigen::Index k = 0; k < d; ++k)
                        for (Eigen::Index l = 0; l < d; ++l)
                            acc += basis[a](i, j) * s(i, j, k, l) * basis[b](k, l);
            r(a, b) = acc;
        }
    return r;
}

DenseTensor4 mandel_fold4(const Matrix& m) {
    require(m.rows() == m.cols(), "mandel_fold4: matrix must be square");
    const Eigen::Index dt = m.rows();
    const Eigen::Index d = static_cast<Eigen::Index>(std::lround((std::sqrt(8.0 * dt + 1.0) - 1.0) / 2.0));
    require(mandel_dim(d) == dt, "mandel_fold4: invalid matrix size");
    DenseTensor4 s(d, d, d, d);
    for (Eigen::Index a = 0; a < dt; ++a) {
        const Matrix ea = mandel_basis(d, a);
        for (Eigen::Index b = 0; b < dt; ++b) {
            const double w = m(a, b);
            if (w == 0.0) continue;
            const Matrix eb = mandel_basis(d, b);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j) {
                    if (ea(i, j) == 0.0) continue;
                    for (Eigen::Index k = 0; k < d; ++k)
                        for (Eigen::Index l = 0; l < d; ++l)
                            s(i, j, k, l) += w * ea(i, j) * eb(k, l);
                }
        }
    }
    return s;
}

Matrix contract4_2(const DenseTensor4& s, const Matrix& x) {
    require(s.dim(2) == x.rows() && s.dim(3) == x.cols(), "contract4_2: shape mismatch");
    Matrix r = Matrix::Zero(s.dim(0), s.dim(1));
    for (Eigen::Index i = 0; i < s.dim(0); ++i)
        for (Eigen::Index j = 0; j < s.dim(1); ++j) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < s.dim(2); ++k)
                for (Eigen::Index l = 0; l < s.dim(3); ++l) acc += s(i, j, k, l) * x(k, l);
            r(i, j) = acc;
        }
    return r;
}

DenseTensor4 outer(const Matrix& x, const Matrix& y) {
    DenseTensor4 r(x.rows(), x.cols(), y.rows(), y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double xv = x(i, j);
            for (Eigen::Index k = 0; k < y.rows(); ++k)
                for (Eigen::Index l = 0; l < y.cols(); ++l) r(i, j, k, l) = xv * y(k, l);
        }
    return r;
}

DenseTensor4 covariance_tensor(const std::vector<Matrix>& samples, const Matrix& center) {
    if (samples.size() < 2) throw DataError("covariance_tensor: need at least 2 samples");
    const Eigen::Index d = center.rows();
    DenseTensor4 s(d, d, d, d);
    for (const Matrix& x : samples) {
        require(x.rows() == d && x.cols() == d, "covariance_tensor: sample shape mismatch");
        s += outer(x - center, x - center);
    }
    s *= 1.0 / static_cast<double>(samples.size() - 1);
    return s;
}

bool is_covariance_tensor(const DenseTensor4& s, double tol) {
    if (!(s.dim(0) == s.dim(1) && s.dim(0) == s.dim(2) && s.dim(0) == s.dim(3))) return false;
    const Eigen::Index d = s.dim(0);
    double scale = 0.0;
    for (double v : s.data()) scale = std::max(scale, std::abs(v));
    const double abs_tol = tol * std::max(1.0, scale);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < d; ++k)
                for (Eigen::Index l = 0; l < d; ++l) {
                    if (std::abs(s(i, j, k, l) - s(k, l, i, j)) > abs_tol) return false;
                    if (std::abs(s(i, j, k, l) - s(j, i, k, l)) > abs_tol) return false;
                    if (std::abs(s(i, j, k, l) - s(i, j, l, k)) > abs_tol) return false;
                }
    const Matrix u = mandel_unfold(s);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (u + u.transpose()));
    const double floor = -tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    return es.eigenvalues().minCoeff() >= floor;
}

}  // namespace manip
