#include "bglm/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "bglm/blended.hpp"

namespace bglm::analysis {

CMatrix stability_matrix(const GlmTableau& t, Complex q) {
    const int r = t.r;
    const CMatrix lhs = CMatrix::Identity(r, r) - q * t.A.cast<Complex>();
    return linalg::CluFactorization(lhs).solve(CMatrix(t.U.cast<Complex>()));
}

double stability_radius(const GlmTableau& t, Complex q) {
    try {
        return linalg::spectral_radius(stability_matrix(t, q));
    } catch (const SingularAtQ&) {
        return std::numeric_limits<double>::infinity();
    }
}

StabilityReport check_stability(const GlmTableau& t) {
    StabilityReport rep;
    rep.k = t.k;
    rep.r = t.r;
    rep.ell = t.ell;
    rep.choice = construction::to_string(t.choice);

    const int n = 2000;
    const double x0 = 1e-3, x1 = 1e6;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i)
        xs[i] = x0 * std::pow(x1 / x0, static_cast<double>(i) / (n - 1));
    if (t.gamma > 0.0) xs.push_back(1.0 / t.gamma);

    double mx = 0.0;
    for (double x : xs) mx = std::max(mx, stability_radius(t, Complex(0.0, x)));
    rep.max_imag_axis_radius = mx;
    rep.radius_at_large_q = stability_radius(t, Complex(-1e8, 0.0));
    rep.a_stable = mx <= 1.0 + 1e-9;
    rep.l_stable = rep.a_stable && rep.radius_at_large_q <= 1e-6;
    return rep;
}

std::string report_to_json(const StabilityReport& rep) {
    nlohmann::json j;
    j["k"] = rep.k;
    j["r"] = rep.r;
    j["ell"] = rep.ell;
    j["choice"] = rep.choice;
    j["max_imag_axis_radius"] = rep.max_imag_axis_radius;
    j["radius_at_large_q"] = rep.radius_at_large_q;
    j["a_stable"] = rep.a_stable;
    j["l_stable"] = rep.l_stable;
    return j.dump(2);
}

namespace {

// Linear interpolation of the level-1 crossing between two grid values.
double crossing(double va, double vb) {
    return (1.0 - va) / (vb - va);
}

} // namespace

BoundaryLocus boundary_locus(const GlmTableau& t, double re0, double re1,
                             double im0, double im1, int nx, int ny) {
    if (nx < 2 || ny < 2)
        throw DimensionMismatch("boundary_locus: resolution must be >= 2 per axis");
    BoundaryLocus out;
    LocusGrid& g = out.grid;
    g.re0 = re0; g.re1 = re1; g.im0 = im0; g.im1 = im1;
    g.nx = nx; g.ny = ny;
    g.radius.resize(static_cast<size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            g.radius[static_cast<size_t>(iy) * nx + ix] =
                stability_radius(t, Complex(g.re_of(ix), g.im_of(iy)));

    // Marching squares at level 1, emitting raw segments per cell.
    int seg_id = 0;
    for (int iy = 0; iy + 1 < ny; ++iy) {
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const double v00 = g.at(ix, iy), v10 = g.at(ix + 1, iy);
            const double v01 = g.at(ix, iy + 1), v11 = g.at(ix + 1, iy + 1);
            if (!std::isfinite(v00) || !std::isfinite(v10) ||
                !std::isfinite(v01) || !std::isfinite(v11))
                continue;
            const double x0 = g.re_of(ix), x1 = g.re_of(ix + 1);
            const double y0 = g.im_of(iy), y1 = g.im_of(iy + 1);

            struct Pt { double x, y; };
            std::vector<Pt> pts;
            auto edge = [&](double va, double vb, double ax, double ay, double bx, double by) {
                if ((va > 1.0) != (vb > 1.0)) {
                    const double s = crossing(va, vb);
                    pts.push_back({ax + s * (bx - ax), ay + s * (by - ay)});
                }
            };
            edge(v00, v10, x0, y0, x1, y0);
            edge(v10, v11, x1, y0, x1, y1);
            edge(v11, v01, x1, y1, x0, y1);
            edge(v01, v00, x0, y1, x0, y0);
            for (size_t p = 0; p + 1 < pts.size(); p += 2) {
                out.contour.push_back({pts[p].x, pts[p].y, pts[p + 1].x, pts[p + 1].y, seg_id++});
            }
        }
    }
    return out;
}

std::string locus_grid_csv(const LocusGrid& g) {
    std::ostringstream os;
    os.precision(10);
    os << "re,im,radius\n";
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            os << g.re_of(ix) << ',' << g.im_of(iy) << ',' << g.at(ix, iy) << '\n';
    return os.str();
}

std::string contour_csv(const std::vector<ContourSegment>& segments) {
    std::ostringstream os;
    os.precision(10);
    os << "re_a,im_a,re_b,im_b,segment_id\n";
    for (const auto& s : segments)
        os << s.re_a << ',' << s.im_a << ',' << s.re_b << ',' << s.im_b << ',' << s.id << '\n';
    return os.str();
}

LocusGrid convergence_region(const GlmTableau& t, double re0, double re1,
                             double im0, double im1, int nx, int ny) {
    if (nx < 2 || ny < 2)
        throw DimensionMismatch("convergence_region: resolution must be >= 2 per axis");
    const double rho_tilde =
        linalg::spectral_radius(blended::iteration_core(t.A, t.gamma));
    LocusGrid g;
    g.re0 = re0; g.re1 = re1; g.im0 = im0; g.im1 = im1;
    g.nx = nx; g.ny = ny;
    g.radius.resize(static_cast<size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            g.radius[static_cast<size_t>(iy) * nx + ix] =
                blended::rho_q(Complex(g.re_of(ix), g.im_of(iy)), t.gamma, rho_tilde);
    return g;
}

} // namespace bglm::analysis
