#include "bglm/linalg.hpp"

#include <cmath>

namespace bglm::linalg {

namespace {

template <typename Mat>
void check_square(const Mat& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw DimensionMismatch(std::string(who) + ": matrix must be square");
}

} // namespace

LuFactorization::LuFactorization(const Matrix& m) {
    check_square(m, "lu_factor");
    lu_.compute(m);
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) throw SingularMatrix("lu_factor: zero matrix");
    const Matrix& packed = lu_.matrixLU();
    for (int i = 0; i < packed.rows(); ++i) {
        if (std::abs(packed(i, i)) < 1e-14 * scale)
            throw SingularMatrix("lu_factor: pivot below 1e-14 * max|entry|");
    }
}

Vector LuFactorization::solve(const Vector& rhs) const {
    if (rhs.size() != lu_.rows())
        throw DimensionMismatch("solve: rhs length does not match matrix size");
    return lu_.solve(rhs);
}

Matrix LuFactorization::solve(const Matrix& rhs) const {
    if (rhs.rows() != lu_.rows())
        throw DimensionMismatch("solve: rhs rows do not match matrix size");
    return lu_.solve(rhs);
}

double LuFactorization::det() const { return lu_.determinant(); }

CluFactorization::CluFactorization(const CMatrix& m) {
    check_square(m, "lu_factor");
    lu_.compute(m);
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) throw SingularAtQ("complex lu: zero matrix");
    const CMatrix& packed = lu_.matrixLU();
    for (int i = 0; i < packed.rows(); ++i) {
        if (std::abs(packed(i, i)) < 1e-14 * scale)
            throw SingularAtQ("complex lu: pivot below 1e-14 * max|entry|");
    }
}

CVector CluFactorization::solve(const CVector& rhs) const {
    if (rhs.size() != lu_.rows())
        throw DimensionMismatch("solve: rhs length does not match matrix size");
    return lu_.solve(rhs);
}

CMatrix CluFactorization::solve(const CMatrix& rhs) const {
    if (rhs.rows() != lu_.rows())
        throw DimensionMismatch("solve: rhs rows do not match matrix size");
    return lu_.solve(rhs);
}

std::vector<Complex> eigenvalues(const Matrix& m) {
    check_square(m, "eigenvalues");
    Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NoConvergence("eigenvalues: QR iteration did not converge");
    std::vector<Complex> out(m.rows());
    for (int i = 0; i < m.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

double spectral_radius(const Matrix& m) {
    double r = 0.0;
    for (const Complex& mu : eigenvalues(m)) r = std::max(r, std::abs(mu));
    return r;
}

double spectral_radius(const CMatrix& m) {
    check_square(m, "spectral_radius");
    Eigen::ComplexEigenSolver<CMatrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NoConvergence("spectral_radius: QR iteration did not converge");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix inverse(const Matrix& m) {
    return lu_factor(m).solve(Matrix(Matrix::Identity(m.rows(), m.cols())));
}

namespace {

double poly_eval(const std::vector<double>& c, double x, double* deriv) {
    // Horner with derivative.
    double p = 0.0, dp = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        dp = dp * x + p;
        p = p * x + *it;
    }
    if (deriv) *deriv = dp;
    return p;
}

} // namespace

double positive_poly_root(const std::vector<double>& coeffs) {
    double lo = 0.0, hi = 1.0;
    double plo = poly_eval(coeffs, lo, nullptr);
    double phi = poly_eval(coeffs, hi, nullptr);
    if (phi == 0.0) return 1.0;
    if (plo >= 0.0 || phi < 0.0)
        throw NoSignChange("positive_poly_root: no sign change on (0,1]");
    for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
        const double mid = 0.5 * (lo + hi);
        (poly_eval(coeffs, mid, nullptr) < 0.0 ? lo : hi) = mid;
    }
    // Newton polish from the bisection estimate.
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        double dp = 0.0;
        const double p = poly_eval(coeffs, x, &dp);
        if (dp == 0.0) break;
        const double step = p / dp;
        x -= step;
        if (std::abs(step) < 1e-16) break;
    }
    return x;
}

} // namespace bglm::linalg
