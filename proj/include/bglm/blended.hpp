#pragma once

// Blended reformulation at the linear-test level: the weight function, the
// iteration core A^{-1}(A - gamma I)^2, the convergence parameters
// (rho_tilde, rho_inf, rho_star) and the optimization of gamma.

#include <complex>
#include <vector>

#include "bglm/linalg.hpp"

namespace bglm::construction { struct GlmTableau; }

namespace bglm::blended {

using linalg::CVector;
using linalg::Complex;
using linalg::Matrix;

struct BlendedParams {
    double gamma = 0.0;
    double rho_tilde = 0.0; // nonstiff amplification factor, rho(A^{-1}(A-gI)^2)
    double rho_inf = 0.0;   // stiff convergence factor, gamma^{-2} rho_tilde
    double rho_star = 0.0;  // maximum amplification factor, (2 gamma)^{-1} rho_tilde
    double gamma_star = 0.0; // min |mu| over the spectrum of A
    bool multiple_minima = false; // set by optimize_gamma when the scan is non-convex
};

/// W = A^{-1}(A - gamma I)^2. The iteration matrix at hλ = q is
/// q / (1 - gamma q)^2 * W.
Matrix iteration_core(const Matrix& A, double gamma);

BlendedParams convergence_params(const Matrix& A, double gamma);

/// Minimize rho_star over gamma > 0: coarse log-spaced scan on
/// [0.1 gamma*, 10 gamma*] followed by golden-section refinement to 1e-6.
BlendedParams optimize_gamma(const Matrix& A);

/// Spectral radius of the iteration matrix at q, evaluated analytically as
/// |q| / |1 - gamma q|^2 * rho_tilde.
double rho_q(Complex q, double gamma, double rho_tilde);

/// Assemble the tableau and fill gamma by optimize_gamma.
construction::GlmTableau make_method(int k, int r, int ell, int choice_num);

struct ScalarIterateHistory {
    std::vector<CVector> iterates;  // y^(0), y^(1), ...
    CVector fixed_point;            // direct solve of (I - qA) y = eta
    std::vector<double> error_norms; // ||y^(i) - fixed_point||
};

/// Blended iteration on the test equation: N(q) y^(i+1) = (N - M) y^(i) + eta(q),
/// starting from y^(0) = 0.
ScalarIterateHistory scalar_blended_iterate(const construction::GlmTableau& t,
                                            Complex q, const CVector& eta, int sweeps);

} // namespace bglm::blended
