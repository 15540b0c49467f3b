#pragma once

// Small dense matrix kernels shared by every other module. Matrices here are
// tiny (method tableaux, at most ~17x17), so robustness matters and speed does
// not. Backed by Eigen; the rest of the library only uses this surface.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "bglm/errors.hpp"

namespace bglm::linalg {

using Matrix  = Eigen::MatrixXd;
using Vector  = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Partial-pivoting LU of a square real matrix. A pivot below
/// 1e-14 * max|entry| is reported as SingularMatrix instead of being used.
class LuFactorization {
public:
    explicit LuFactorization(const Matrix& m);

    Vector solve(const Vector& rhs) const;
    Matrix solve(const Matrix& rhs) const;

    /// Determinant of the factored matrix.
    double det() const;

    int size() const { return static_cast<int>(lu_.rows()); }

private:
    Eigen::PartialPivLU<Matrix> lu_;
};

/// Complex analogue, used for the stability matrix (I - qA)^{-1} U.
class CluFactorization {
public:
    explicit CluFactorization(const CMatrix& m);

    CVector solve(const CVector& rhs) const;
    CMatrix solve(const CMatrix& rhs) const;

private:
    Eigen::PartialPivLU<CMatrix> lu_;
};

inline LuFactorization lu_factor(const Matrix& m) { return LuFactorization(m); }
inline CluFactorization clu_factor(const CMatrix& m) { return CluFactorization(m); }

/// Full complex spectrum of a real square matrix (conjugate pairs, order
/// unspecified).
std::vector<Complex> eigenvalues(const Matrix& m);

double spectral_radius(const Matrix& m);
double spectral_radius(const CMatrix& m);

Matrix inverse(const Matrix& m);

/// Root in (0,1] of a polynomial given by ascending coefficients, assuming
/// p(0) < 0 <= p(1). Bisection bracketed, then polished with Newton.
double positive_poly_root(const std::vector<double>& coeffs);

} // namespace bglm::linalg
