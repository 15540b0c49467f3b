#pragma once

// Derivation of generalized-BDF differentiation formulas on the block grid and
// assembly of the GLM tableaux (A1, A2, A, U) for a triple (k, r, ell),
// together with the starting-procedure and error-estimator tableaux.

#include <string>
#include <utility>
#include <vector>

#include "bglm/linalg.hpp"

namespace bglm::construction {

using linalg::Matrix;
using linalg::Vector;

/// Auxiliary-point abscissa scheme: geometric steps (irrational coefficients)
/// or approximately halved steps (rational coefficients).
enum class AuxChoice { None, Geometric, Rational };

std::string to_string(AuxChoice c);
AuxChoice aux_choice_from_string(const std::string& s);

/// One linear-multistep differentiation formula: weights alpha on the stencil
/// nodes (in units of h) reproducing the derivative at stencil[deriv_index]
/// exactly for polynomials of degree <= stencil.size()-1.
struct LmfRow {
    std::vector<double> stencil;
    std::vector<double> alpha;
    int deriv_index = 0;
};

/// Number of initial conditions of the GBDF of order k.
int gbdf_nu(int k);

/// Block abscissae c_1..c_r and the closing stepsize fractions xi.
/// c_i = i for i < ell, c_r = ell; the last r-ell+1 spacings follow the
/// auxiliary-point choice and sum to one.
std::pair<Vector, std::vector<double>> abscissae(int k, int r, int ell, AuxChoice choice);

/// Unique order-(n-1) differentiation weights on n distinct nodes, computed by
/// Lagrange-basis derivative evaluation.
LmfRow differentiation_weights(const std::vector<double>& stencil, int deriv_index);

struct GlmTableau {
    int k = 0;
    int r = 0;
    int ell = 0;
    int nu = 0;
    AuxChoice choice = AuxChoice::None;
    Vector c;                   // r abscissae
    std::vector<double> xi;     // closing stepsize fractions
    Matrix A1, A2;              // r x r block coefficient matrices
    Matrix A;                   // A2^{-1}
    Matrix U;                   // -A2^{-1} A1
    double gamma = 0.0;         // blended parameter, filled by the blended module
    std::vector<int> aux_indices; // zero-based block indices of auxiliary points

    bool is_auxiliary(int stage) const;
};

/// Assemble the GLM for the triple (k, r, ell). gamma is left at zero.
GlmTableau assemble_glm(int k, int r, int ell, AuxChoice choice);

/// Order-(k+1) companion on the identical grid, used only to form residuals.
/// Throws InvalidTriple when (k+1, r, ell) is infeasible (e.g. (3,2,2)).
GlmTableau error_estimator_tableau(int k, int r, int ell, AuxChoice choice);

/// Whether the (k+1, r, ell) companion exists, i.e. the method is
/// solver-eligible.
bool has_error_companion(int k, int r, int ell);

/// Starting procedure: block GBDF of order k with blocksize r = k on the
/// uniform grid {0,...,k}. Row j differentiates at node j.
struct StartTableau {
    int k = 0;
    Matrix calA;          // k x (k+1) alpha coefficients
    Vector a0;            // first column of calA (multiplies y0)
    Matrix square;        // calA columns 1..k
    Matrix A_hat;         // inverse of the square part
    double gamma_start = 0.0;
};

StartTableau starting_tableau(int k);

/// Block of r consecutive BDF-k rows used as an initial value method
/// (derivative always at the last stencil node). Control case for the
/// stability checks; not part of the L-stable family.
GlmTableau bdf_ivm_block(int k, int r);

/// JSON export/import of a tableau (17 significant digits).
std::string tableau_to_json(const GlmTableau& t);
GlmTableau tableau_from_json(const std::string& text);

} // namespace bglm::construction
