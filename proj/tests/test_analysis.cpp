#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bglm/analysis.hpp"
#include "bglm/blended.hpp"
#include "bglm/catalogue.hpp"
#include "bglm/errors.hpp"

using namespace bglm;
using analysis::BoundaryLocus;
using construction::GlmTableau;
using linalg::CMatrix;
using linalg::Complex;
using linalg::Matrix;

namespace {

// Backward-Euler-like single-stage tableau: A = (1), U = (1).
GlmTableau backward_euler_like() {
    GlmTableau t;
    t.k = 1;
    t.r = 1;
    t.ell = 1;
    t.nu = 1;
    t.c = linalg::Vector::Ones(1);
    t.A = Matrix::Ones(1, 1);
    t.A2 = Matrix::Ones(1, 1);
    t.A1 = -Matrix::Ones(1, 1);
    t.U = Matrix::Ones(1, 1);
    t.gamma = 1.0;
    return t;
}

} // namespace

TEST_CASE("stability matrix at q = 0 is U with unit spectral radius") {
    auto t = catalogue::method_for_order(4, 2);
    CMatrix r0 = analysis::stability_matrix(t, Complex(0.0, 0.0));
    CHECK((r0 - t.U.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(analysis::stability_radius(t, Complex(0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("stability matrix decays at large negative q") {
    for (int choice = 1; choice <= 2; ++choice)
        for (const auto& e : catalogue::triples()) {
            auto t = catalogue::method_for_order(e.k, choice);
            CHECK(analysis::stability_radius(t, Complex(-1e8, 0.0)) <= 1e-6);
        }
}

TEST_CASE("order-3 method contracts at q = -1") {
    auto t = catalogue::method_for_order(3, 1);
    CHECK(analysis::stability_radius(t, Complex(-1.0, 0.0)) < 1.0);
}

TEST_CASE("singular resolvent reports infinite radius") {
    auto t = backward_euler_like();
    // I - qA singular at q = 1.
    CHECK(std::isinf(analysis::stability_radius(t, Complex(1.0, 0.0))));
}

TEST_CASE("catalogue methods are L-stable") {
    for (int choice = 1; choice <= 2; ++choice)
        for (const auto& e : catalogue::triples()) {
            auto t = catalogue::method_for_order(e.k, choice);
            auto rep = analysis::check_stability(t);
            CHECK(rep.a_stable);
            CHECK(rep.l_stable);
            CHECK(rep.max_imag_axis_radius <= 1.0 + 1e-9);
            CHECK(rep.radius_at_large_q <= 1e-6);
        }
}

TEST_CASE("uniform BDF3 block is not A-stable") {
    auto t = construction::bdf_ivm_block(3, 3);
    t.gamma = 0.5; // only used for the extra sample point
    auto rep = analysis::check_stability(t);
    CHECK_FALSE(rep.a_stable);
    CHECK(rep.max_imag_axis_radius > 1.0 + 1e-9);
}

TEST_CASE("stability report serializes to json") {
    auto t = catalogue::method_for_order(6, 2);
    auto rep = analysis::check_stability(t);
    std::string doc = analysis::report_to_json(rep);
    CHECK(doc.find("\"l_stable\"") != std::string::npos);
    CHECK(doc.find("\"k\": 6") != std::string::npos);
}

TEST_CASE("boundary locus of the single-stage implicit method is the unit circle shifted") {
    auto t = backward_euler_like();
    BoundaryLocus loc = analysis::boundary_locus(t, -1.5, 3.5, -2.5, 2.5, 201, 201);
    REQUIRE(!loc.contour.empty());
    // Level-1 set of |1/(1-q)| is |q - 1| = 1.
    for (const auto& seg : loc.contour) {
        const double ra = std::hypot(seg.re_a - 1.0, seg.im_a);
        const double rb = std::hypot(seg.re_b - 1.0, seg.im_b);
        CHECK(std::abs(ra - 1.0) < 0.05);
        CHECK(std::abs(rb - 1.0) < 0.05);
    }
}

TEST_CASE("order-3 boundary locus stays in the closed right half-plane") {
    auto t = catalogue::method_for_order(3, 2);
    BoundaryLocus loc = analysis::boundary_locus(t, -10.0, 10.0, -10.0, 10.0, 220, 220);
    REQUIRE(!loc.contour.empty());
    // The locus touches the imaginary axis at the origin; allow one grid cell
    // of interpolation slack there.
    const double cell = 20.0 / 219.0;
    for (const auto& seg : loc.contour) {
        CHECK(seg.re_a > -cell);
        CHECK(seg.re_b > -cell);
    }
}

TEST_CASE("high-order locus is a closed curve in the right half-plane") {
    auto t = catalogue::method_for_order(16, 2);
    BoundaryLocus loc = analysis::boundary_locus(t, -5.0, 40.0, -25.0, 25.0, 160, 160);
    REQUIRE(!loc.contour.empty());
    const double cell = 45.0 / 159.0;
    for (const auto& seg : loc.contour) {
        CHECK(seg.re_a > -cell);
        CHECK(seg.re_b > -cell);
    }
}

TEST_CASE("locus csv has the documented headers") {
    auto t = backward_euler_like();
    BoundaryLocus loc = analysis::boundary_locus(t, -1.0, 3.0, -2.0, 2.0, 21, 21);
    std::string grid_csv = analysis::locus_grid_csv(loc.grid);
    CHECK(grid_csv.rfind("re,im,radius", 0) == 0);
    std::string ccsv = analysis::contour_csv(loc.contour);
    CHECK(ccsv.rfind("re_a,im_a,re_b,im_b,segment_id", 0) == 0);
    // One data row per grid point.
    const long rows = std::count(grid_csv.begin(), grid_csv.end(), '\n');
    CHECK(rows == 21 * 21 + 1);
}

TEST_CASE("convergence region values follow the analytic factor") {
    auto t = catalogue::method_for_order(6, 2);
    auto p = blended::convergence_params(t.A, t.gamma);
    auto grid = analysis::convergence_region(t, -4.0, 2.0, -3.0, 3.0, 13, 11);
    for (int iy = 0; iy < 11; ++iy)
        for (int ix = 0; ix < 13; ++ix) {
            const Complex q(grid.re_of(ix), grid.im_of(iy));
            CHECK(grid.at(ix, iy) ==
                  doctest::Approx(blended::rho_q(q, t.gamma, p.rho_tilde)).epsilon(1e-12));
        }
    // Left half-plane contained in the convergence region (rho* <= 1).
    for (int iy = 0; iy < 11; ++iy)
        for (int ix = 0; ix < 13; ++ix)
            if (grid.re_of(ix) < 0.0) CHECK(grid.at(ix, iy) <= p.rho_star * (1.0 + 1e-12) + 1e-15);
}
