#include <doctest.h>

#include <cmath>
#include <random>

#include "manip/tensor.hpp"

using namespace manip;

namespace {

std::mt19937_64 rng(20240511);

double rnd() {
    static std::normal_distribution<double> g(0.0, 1.0);
    return g(rng);
}

DenseTensor3 random_t3(int i, int j, int k) {
    DenseTensor3 t(i, j, k);
    for (double& v : t.data()) v = rnd();
    return t;
}

DenseTensor4 random_t4(int d) {
    DenseTensor4 t(d, d, d, d);
    for (double& v : t.data()) v = rnd();
    return t;
}

Matrix random_sym(int d) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = rnd();
    return m;
}

// Brute-force contraction, the independent reference for contract4_2.
Matrix contract_loop(const DenseTensor4& s, const Matrix& x) {
    Matrix r = Matrix::Zero(s.dim(0), s.dim(1));
    for (Eigen::Index i = 0; i < s.dim(0); ++i)
        for (Eigen::Index j = 0; j < s.dim(1); ++j)
            for (Eigen::Index k = 0; k < s.dim(2); ++k)
                for (Eigen::Index l = 0; l < s.dim(3); ++l) r(i, j) += s(i, j, k, l) * x(k, l);
    return r;
}

}  // namespace

TEST_CASE("n-mode product with the identity leaves the tensor unchanged") {
    const DenseTensor3 t = random_t3(2, 2, 2);
    for (int mode = 1; mode <= 3; ++mode) {
        const DenseTensor3 r = n_mode_product(t, Matrix::Identity(2, 2), mode);
        for (Eigen::Index i = 0; i < t.size(); ++i)
            CHECK(r.data()[static_cast<std::size_t>(i)] ==
                  doctest::Approx(t.data()[static_cast<std::size_t>(i)]).epsilon(1e-15));
    }
}

TEST_CASE("n-mode product scales an all-ones tensor") {
    DenseTensor3 t(2, 2, 2);
    for (double& v : t.data()) v = 1.0;
    const DenseTensor3 r = n_mode_product(t, 2.0 * Matrix::Identity(2, 2), 1);
    for (double v : r.data()) CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("mode-3 product with a basis row vector extracts a frontal slice") {
    const DenseTensor3 t = random_t3(2, 2, 3);
    Matrix e1t(1, 3);
    e1t << 1.0, 0.0, 0.0;
    const DenseTensor3 r = n_mode_product(t, e1t, 3);
    REQUIRE(r.dim(2) == 1);
    // Direct summation over the mode-3 index.
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) {
            double expected = 0.0;
            for (Eigen::Index k = 0; k < 3; ++k) expected += e1t(0, k) * t(i, j, k);
            CHECK(r(i, j, 0) == doctest::Approx(expected).epsilon(1e-15));
            CHECK(r(i, j, 0) == doctest::Approx(t(i, j, 0)).epsilon(1e-15));
        }
}

TEST_CASE("n-mode product satisfies the matricization identity") {
    const DenseTensor3 t = random_t3(3, 4, 2);
    for (int mode = 1; mode <= 3; ++mode) {
        Matrix a(5, t.dim(mode - 1));
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rnd();
        const DenseTensor3 y = n_mode_product(t, a, mode);
        const Matrix lhs = matricize(y, mode);
        const Matrix rhs = a * matricize(t, mode);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }

    const DenseTensor4 t4 = random_t4(3);
    for (int mode = 1; mode <= 4; ++mode) {
        Matrix b(2, 3);
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = rnd();
        const DenseTensor4 y = n_mode_product(t4, b, mode);
        const Matrix lhs = matricize(y, mode);
        const Matrix rhs = b * matricize(t4, mode);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("n-mode product rejects shape mismatches") {
    const DenseTensor3 t = random_t3(2, 2, 2);
    CHECK_THROWS_AS(n_mode_product(t, Matrix::Identity(3, 3), 1), ShapeError);
    CHECK_THROWS_AS(n_mode_product(t, Matrix::Identity(2, 2), 5), ShapeError);
}

TEST_CASE("mandel matricization of an identity slice") {
    DenseTensor3 t(2, 2, 1);
    t.set_slice(0, Matrix::Identity(2, 2));
    const Matrix m = mandel_matricize3(t);
    REQUIRE(m.rows() == 1);
    REQUIRE(m.cols() == 3);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(0, 2) == 0.0);
}

TEST_CASE("mandel vector of a 2x2 symmetric matrix") {
    Matrix s(2, 2);
    s << 1.0, 2.0, 2.0, 3.0;
    const Vector v = mandel_vec(s);
    CHECK(v(0) == doctest::Approx(1.0));
    CHECK(v(1) == doctest::Approx(3.0));
    CHECK(v(2) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("mandel vector norm equals the Frobenius norm") {
    for (int it = 0; it < 20; ++it) {
        const Matrix s = random_sym(3);
        CHECK(std::abs(mandel_vec(s).norm() - s.norm()) < 1e-12);
    }
}

TEST_CASE("mandel fold inverts mandel vec") {
    // The sqrt(2)-scaled slots cannot guarantee the last bit across binade
    // boundaries, so off-diagonals are held to one ulp; diagonal entries are
    // stored unscaled and must come back bit-exact.
    for (int it = 0; it < 200; ++it) {
        const int d = 2 + (it % 3);
        const Matrix s = random_sym(d);
        const Matrix r = mandel_fold(mandel_vec(s));
        for (int i = 0; i < d; ++i) CHECK(r(i, i) == s(i, i));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                CHECK(std::abs(r(i, j) - s(i, j)) <= std::abs(s(i, j)) * 2.3e-16);
    }
}

TEST_CASE("contraction of an identity outer product doubles the identity") {
    const DenseTensor4 s = outer(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    const Matrix r = contract4_2(s, Matrix::Identity(2, 2));
    CHECK((r - 2.0 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("contraction of a zero tensor is zero") {
    const DenseTensor4 s(2, 2, 2, 2);
    const Matrix x = random_sym(2);
    CHECK(contract4_2(s, x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("contraction agrees with the quadruple-loop reference") {
    for (int it = 0; it < 10; ++it) {
        const DenseTensor4 s = random_t4(3);
        Matrix x(3, 3);
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rnd();
        CHECK((contract4_2(s, x) - contract_loop(s, x)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("contraction rejects shape mismatches") {
    const DenseTensor4 s = random_t4(2);
    CHECK_THROWS_AS(contract4_2(s, Matrix::Identity(3, 3)), ShapeError);
}

TEST_CASE("outer product of zero is zero") {
    const DenseTensor4 s = outer(Matrix::Zero(2, 2), random_sym(2));
    for (double v : s.data()) CHECK(v == 0.0);
}

TEST_CASE("outer product of identities has the Kronecker pattern") {
    const DenseTensor4 s = outer(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
            for (Eigen::Index k = 0; k < 2; ++k)
                for (Eigen::Index l = 0; l < 2; ++l)
                    CHECK(s(i, j, k, l) == ((i == j && k == l) ? 1.0 : 0.0));
}

TEST_CASE("contraction against a rank-one tensor gives a Frobenius product") {
    for (int it = 0; it < 10; ++it) {
        const Matrix x = random_sym(2);
        const Matrix y = random_sym(2);
        const Matrix lhs = contract4_2(outer(x, x), y);
        const Matrix rhs = x * (x.cwiseProduct(y)).sum();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("covariance tensor of constant samples is zero") {
    const Matrix c = random_sym(2);
    const DenseTensor4 s = covariance_tensor({c, c, c}, c);
    for (double v : s.data()) CHECK(v == 0.0);
}

TEST_CASE("covariance tensor of a symmetric pair is twice the outer product") {
    // Hand expansion: two samples +/-E about zero, N - 1 = 1.
    const Matrix e = random_sym(2);
    const DenseTensor4 s = covariance_tensor({e, -e}, Matrix::Zero(2, 2));
    const DenseTensor4 expected = outer(e, e);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        CHECK(s.data()[static_cast<std::size_t>(i)] ==
              doctest::Approx(2.0 * expected.data()[static_cast<std::size_t>(i)]).epsilon(1e-14));
}

TEST_CASE("covariance tensor unfolding equals the vectorized sample covariance") {
    std::vector<Matrix> samples;
    for (int i = 0; i < 6; ++i) samples.push_back(random_sym(2));
    const Matrix center = random_sym(2);
    const DenseTensor4 s = covariance_tensor(samples, center);

    Matrix cov = Matrix::Zero(3, 3);
    for (const Matrix& x : samples) {
        const Vector v = mandel_vec(x - center);
        cov += v * v.transpose();
    }
    cov /= static_cast<double>(samples.size() - 1);
    CHECK((mandel_unfold(s) - cov).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("covariance tensor needs at least two samples") {
    CHECK_THROWS_AS(covariance_tensor({Matrix::Identity(2, 2)}, Matrix::Zero(2, 2)), DataError);
}

TEST_CASE("covariance tensors satisfy the exchange-symmetry and PSD invariants") {
    std::vector<Matrix> samples;
    for (int i = 0; i < 5; ++i) samples.push_back(random_sym(3));
    const DenseTensor4 s = covariance_tensor(samples, Matrix::Zero(3, 3));
    CHECK(is_covariance_tensor(s));
}

TEST_CASE("mandel unfold and fold4 are inverse on covariance tensors") {
    std::vector<Matrix> samples;
    for (int i = 0; i < 5; ++i) samples.push_back(random_sym(2));
    const DenseTensor4 s = covariance_tensor(samples, Matrix::Zero(2, 2));
    const DenseTensor4 r = mandel_fold4(mandel_unfold(s));
    for (Eigen::Index i = 0; i < s.size(); ++i)
        CHECK(r.data()[static_cast<std::size_t>(i)] ==
              doctest::Approx(s.data()[static_cast<std::size_t>(i)]).epsilon(1e-13));

    // The unfolding also linearizes the contraction.
    const Matrix x = random_sym(2);
    const Matrix via_vec = mandel_fold(mandel_unfold(s) * mandel_vec(x));
    CHECK((contract4_2(s, x) - via_vec).cwiseAbs().maxCoeff() < 1e-12);
}
