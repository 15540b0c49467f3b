#pragma once

// Linear stability analysis: the stability matrix R(q) = (I - qA)^{-1} U,
// boundary-locus scans, A/L-stability verification and convergence-region
// sampling for the blended iteration.

#include <string>
#include <vector>

#include "bglm/construction.hpp"

namespace bglm::analysis {

using construction::GlmTableau;
using linalg::CMatrix;
using linalg::Complex;

/// One-step propagation matrix of the external stages under y' = lambda y.
CMatrix stability_matrix(const GlmTableau& t, Complex q);

/// Spectral radius of R(q); singular points report +infinity.
double stability_radius(const GlmTableau& t, Complex q);

struct StabilityReport {
    int k = 0, r = 0, ell = 0;
    std::string choice;
    double max_imag_axis_radius = 0.0; // max rho(R(ix)) over the sample
    double radius_at_large_q = 0.0;    // rho(R(q)) at q = -1e8
    bool a_stable = false;
    bool l_stable = false;
};

/// Samples rho(R(ix)) at 2000 log-spaced x in [1e-3, 1e6] plus x = 1/gamma.
StabilityReport check_stability(const GlmTableau& t);

std::string report_to_json(const StabilityReport& rep);

struct LocusGrid {
    double re0 = 0, re1 = 0, im0 = 0, im1 = 0;
    int nx = 0, ny = 0;
    std::vector<double> radius; // row-major, ny rows of nx values

    double at(int ix, int iy) const { return radius[static_cast<size_t>(iy) * nx + ix]; }
    double re_of(int ix) const { return re0 + (re1 - re0) * ix / (nx - 1); }
    double im_of(int iy) const { return im0 + (im1 - im0) * iy / (ny - 1); }
};

struct ContourSegment {
    double re_a = 0, im_a = 0, re_b = 0, im_b = 0;
    int id = 0;
};

struct BoundaryLocus {
    LocusGrid grid;
    std::vector<ContourSegment> contour; // level-1 polyline segments
};

/// Dense scan of rho(R(q)) on a rectangle plus the marching-squares contour
/// at level one.
BoundaryLocus boundary_locus(const GlmTableau& t, double re0, double re1,
                             double im0, double im1, int nx, int ny);

std::string locus_grid_csv(const LocusGrid& g);
std::string contour_csv(const std::vector<ContourSegment>& segments);

/// rho(q) = |q| / |1 - gamma q|^2 * rho_tilde per grid point.
LocusGrid convergence_region(const GlmTableau& t, double re0, double re1,
                             double im0, double im1, int nx, int ny);

} // namespace bglm::analysis
