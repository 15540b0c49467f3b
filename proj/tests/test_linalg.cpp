#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bglm/errors.hpp"
#include "bglm/linalg.hpp"

using namespace bglm;
using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

namespace {

// Independent oracle: plain Gaussian elimination with partial pivoting,
// no library calls.
Vector naive_solve(Matrix a, Vector b) {
    const int n = static_cast<int>(a.rows());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a(row, col)) > std::abs(a(piv, col))) piv = row;
        if (piv != col) {
            a.row(piv).swap(a.row(col));
            std::swap(b(piv), b(col));
        }
        for (int row = col + 1; row < n; ++row) {
            const double m = a(row, col) / a(col, col);
            a.row(row).tail(n - col) -= m * a.row(col).tail(n - col);
            b(row) -= m * b(col);
        }
    }
    Vector x(n);
    for (int row = n - 1; row >= 0; --row) {
        double s = b(row);
        for (int col = row + 1; col < n; ++col) s -= a(row, col) * x(col);
        x(row) = s / a(row, row);
    }
    return x;
}

double poly_at(const std::vector<double>& c, double x) {
    double p = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) p = p * x + *it;
    return p;
}

// Bisection oracle for the closing-polynomial root, independent of the
// production Newton polish.
double bisect_root(const std::vector<double>& c) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (poly_at(c, mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Matrix block_a2_322() {
    Matrix m(2, 2);
    m << 0.5, 1.0 / 3.0, -3.0, 11.0 / 6.0;
    return m;
}

} // namespace

TEST_CASE("lu: identity and permutation") {
    Matrix id = Matrix::Identity(4, 4);
    auto lu = linalg::lu_factor(id);
    Vector b(4);
    b << 1, -2, 3, -4;
    CHECK((lu.solve(b) - b).norm() == doctest::Approx(0.0));
    CHECK(lu.det() == doctest::Approx(1.0));

    Matrix perm = Matrix::Zero(3, 3);
    perm(0, 2) = perm(1, 0) = perm(2, 1) = 1.0;
    Vector c(3);
    c << 5, 7, 9;
    Vector x = linalg::lu_factor(perm).solve(c);
    CHECK(x(2) == doctest::Approx(5.0));
    CHECK(x(0) == doctest::Approx(7.0));
    CHECK(x(1) == doctest::Approx(9.0));
}

TEST_CASE("lu: singular matrix throws") {
    Matrix s(2, 2);
    s << 1, 2, 2, 4;
    CHECK_THROWS_AS(linalg::lu_factor(s), SingularMatrix);
    Matrix z = Matrix::Zero(3, 3);
    CHECK_THROWS_AS(linalg::lu_factor(z), SingularMatrix);
}

TEST_CASE("lu: dimension mismatch throws") {
    Matrix a = Matrix::Identity(3, 3);
    Vector b(2);
    b << 1, 2;
    CHECK_THROWS_AS(linalg::lu_factor(a).solve(b), DimensionMismatch);
    Matrix rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(linalg::lu_factor(rect), DimensionMismatch);
}

TEST_CASE("lu: order-3 block coefficient system against elimination oracle") {
    Matrix a2 = block_a2_322();
    Vector rhs(2);
    rhs << 1.0, 2.0;
    Vector x = linalg::lu_factor(a2).solve(rhs);
    Vector ref = naive_solve(a2, rhs);
    CHECK((x - ref).norm() < 1e-14);
    CHECK((a2 * x - rhs).norm() < 1e-14);
}

TEST_CASE("lu: random diagonally dominant systems match elimination oracle") {
    std::mt19937 rng(20260824);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) a(i, j) = u(rng);
        for (int i = 0; i < 5; ++i) a(i, i) += 6.0;
        Vector b(5);
        for (int i = 0; i < 5; ++i) b(i) = u(rng);
        Vector x = linalg::lu_factor(a).solve(b);
        Vector ref = naive_solve(a, b);
        CHECK((x - ref).norm() < 1e-12);
    }
}

TEST_CASE("lu: determinant equals product of eigenvalues") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix a(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) a(i, j) = u(rng);
    a += 3.0 * Matrix::Identity(6, 6);
    Complex prod(1.0, 0.0);
    for (const Complex& mu : linalg::eigenvalues(a)) prod *= mu;
    CHECK(std::abs(prod.imag()) < 1e-10);
    CHECK(linalg::lu_factor(a).det() == doctest::Approx(prod.real()).epsilon(1e-10));
}

TEST_CASE("inverse: round trip") {
    Matrix a2 = block_a2_322();
    Matrix inv = linalg::inverse(a2);
    CHECK((a2 * inv - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    // Known closed form of this inverse.
    CHECK(inv(0, 0) == doctest::Approx(22.0 / 23.0).epsilon(1e-14));
    CHECK(inv(0, 1) == doctest::Approx(-4.0 / 23.0).epsilon(1e-14));
    CHECK(inv(1, 0) == doctest::Approx(36.0 / 23.0).epsilon(1e-14));
    CHECK(inv(1, 1) == doctest::Approx(6.0 / 23.0).epsilon(1e-14));
}

TEST_CASE("eigenvalues: diagonal and rotation") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 2.0;
    d(1, 1) = -5.0;
    d(2, 2) = 0.5;
    auto ev = linalg::eigenvalues(d);
    std::vector<double> mods;
    for (auto& mu : ev) mods.push_back(std::abs(mu));
    std::sort(mods.begin(), mods.end());
    CHECK(mods[0] == doctest::Approx(0.5));
    CHECK(mods[1] == doctest::Approx(2.0));
    CHECK(mods[2] == doctest::Approx(5.0));
    CHECK(linalg::spectral_radius(d) == doctest::Approx(5.0));

    // Rotation by 30 degrees: eigenvalues exp(+-i pi/6).
    const double th = M_PI / 6.0;
    Matrix rot(2, 2);
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    for (auto& mu : linalg::eigenvalues(rot)) {
        CHECK(std::abs(mu) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(mu.imag()) == doctest::Approx(std::sin(th)).epsilon(1e-12));
    }
    CHECK(linalg::spectral_radius(rot) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenvalues: minimum modulus over the order-3 block inverse") {
    // Eigenvalues of A2 are (7 +- i sqrt(23))/6; those of A are reciprocal,
    // so min |mu(A)| = sqrt(36/72) * ... = sqrt(12/23).
    Matrix a = linalg::inverse(block_a2_322());
    double mn = 1e300;
    for (auto& mu : linalg::eigenvalues(a)) mn = std::min(mn, std::abs(mu));
    CHECK(mn == doctest::Approx(std::sqrt(12.0 / 23.0)).epsilon(1e-13));
    CHECK(mn == doctest::Approx(0.7223).epsilon(1e-4));
}

TEST_CASE("eigenvalues: transpose has the same spectrum") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Matrix a(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = u(rng);
    auto sa = linalg::eigenvalues(a);
    auto sb = linalg::eigenvalues(Matrix(a.transpose()));
    auto key = [](const Complex& z) { return std::make_pair(z.real(), z.imag()); };
    std::sort(sa.begin(), sa.end(), [&](auto x, auto y) { return key(x) < key(y); });
    std::sort(sb.begin(), sb.end(), [&](auto x, auto y) { return key(x) < key(y); });
    for (size_t i = 0; i < sa.size(); ++i) CHECK(std::abs(sa[i] - sb[i]) < 1e-9);
}

TEST_CASE("complex lu: solve and singularity") {
    linalg::CMatrix a(2, 2);
    a << Complex(1, 1), Complex(0, 0), Complex(2, 0), Complex(0, 3);
    linalg::CVector b(2);
    b << Complex(2, 2), Complex(2, 3);
    auto x = linalg::clu_factor(a).solve(b);
    CHECK(std::abs(x(0) - Complex(2, 0)) < 1e-14);
    CHECK(std::abs(x(1) - Complex(1, 2.0 / 3.0)) < 1e-14);

    linalg::CMatrix s(2, 2);
    s << Complex(1, 0), Complex(0, 1), Complex(0, -1), Complex(1, 0);
    CHECK_THROWS_AS(linalg::clu_factor(s), SingularAtQ);
}

TEST_CASE("complex spectral radius") {
    linalg::CMatrix a = linalg::CMatrix::Zero(2, 2);
    a(0, 0) = Complex(0, 2);
    a(1, 1) = Complex(1, 0);
    CHECK(linalg::spectral_radius(a) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("closing polynomial root: degenerate single-term case") {
    // z - 1: root exactly 1 (one auxiliary spacing).
    CHECK(linalg::positive_poly_root({-1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closing polynomial root: quadratic case has closed form") {
    // z^2 + z - 1: positive root (sqrt(5)-1)/2.
    std::vector<double> c = {-1.0, 1.0, 1.0};
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    CHECK(linalg::positive_poly_root(c) == doctest::Approx(golden).epsilon(1e-12));
    CHECK(linalg::positive_poly_root(c) == doctest::Approx(bisect_root(c)).epsilon(1e-10));
}

TEST_CASE("closing polynomial root: cubic case against bisection oracle") {
    // z^3 + z^2 + z - 1 (two auxiliary spacings).
    std::vector<double> c = {-1.0, 1.0, 1.0, 1.0};
    const double z = linalg::positive_poly_root(c);
    CHECK(z == doctest::Approx(bisect_root(c)).epsilon(1e-10));
    CHECK(std::abs(poly_at(c, z)) < 1e-14);
    CHECK(z > 0.0);
    CHECK(z < 1.0);
}

TEST_CASE("closing polynomial root: spacings sum to one") {
    // The root z satisfies z + z^2 + ... + z^{n+1} = 1 by construction.
    for (int naux = 0; naux <= 2; ++naux) {
        std::vector<double> c(naux + 2, 1.0);
        c[0] = -1.0;
        const double z = linalg::positive_poly_root(c);
        double s = 0.0, p = 1.0;
        for (int m = 0; m <= naux; ++m) {
            p *= z;
            s += p;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("closing polynomial root: no sign change throws") {
    CHECK_THROWS_AS(linalg::positive_poly_root({1.0, 1.0}), NoSignChange);
}
