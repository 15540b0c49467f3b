#include "bglm/construction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "bglm/blended.hpp"

namespace bglm::construction {

std::string to_string(AuxChoice c) {
    switch (c) {
        case AuxChoice::None: return "none";
        case AuxChoice::Geometric: return "geometric";
        case AuxChoice::Rational: return "rational";
    }
    return "none";
}

AuxChoice aux_choice_from_string(const std::string& s) {
    if (s == "none") return AuxChoice::None;
    if (s == "geometric" || s == "1") return AuxChoice::Geometric;
    if (s == "rational" || s == "2") return AuxChoice::Rational;
    throw ParseError("unknown auxiliary-point choice: " + s);
}

int gbdf_nu(int k) {
    if (k < 1) throw InvalidTriple("gbdf_nu: k must be >= 1");
    return k / 2 + 1;
}

std::pair<Vector, std::vector<double>> abscissae(int k, int r, int ell, AuxChoice choice) {
    if (k < 1 || r < 1 || ell < 1 || ell > r)
        throw InvalidTriple("abscissae: need k,r >= 1 and 1 <= ell <= r");
    const int naux = r - ell;
    if (naux > 0 && choice == AuxChoice::None)
        throw InvalidTriple("abscissae: ell < r requires an auxiliary-point choice");

    std::vector<double> xi(naux + 1);
    if (choice == AuxChoice::Geometric || choice == AuxChoice::None) {
        // zeta is the root in (0,1] of sum_{m=0}^{naux} z^{m+1} - 1.
        std::vector<double> p(naux + 2, 1.0);
        p[0] = -1.0;
        const double zeta = linalg::positive_poly_root(p);
        double pw = 1.0;
        for (int m = 0; m <= naux; ++m) {
            pw *= zeta;
            xi[m] = pw;
        }
    } else {
        const double den = std::ldexp(1.0, naux + 1) - 1.0;
        for (int m = 0; m <= naux; ++m) xi[m] = std::ldexp(1.0, naux - m) / den;
    }

    Vector c(r);
    for (int i = 1; i < ell; ++i) c(i - 1) = i;
    double acc = ell - 1.0;
    for (int j = 0; j <= naux; ++j) {
        acc += xi[j];
        c(ell - 1 + j) = acc;
    }
    c(r - 1) = ell; // the xi sum to one by construction; pin the endpoint
    return {c, xi};
}

LmfRow differentiation_weights(const std::vector<double>& stencil, int deriv_index) {
    const int n = static_cast<int>(stencil.size());
    if (deriv_index < 0 || deriv_index >= n)
        throw DimensionMismatch("differentiation_weights: deriv_index out of range");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (stencil[i] == stencil[j])
                throw DuplicateNodes("differentiation_weights: repeated stencil node");

    // alpha_j = L_j'(x_d) with L_j the Lagrange basis polynomial.
    const double xd = stencil[deriv_index];
    LmfRow row;
    row.stencil = stencil;
    row.deriv_index = deriv_index;
    row.alpha.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        if (j == deriv_index) {
            double s = 0.0;
            for (int m = 0; m < n; ++m)
                if (m != j) s += 1.0 / (xd - stencil[m]);
            row.alpha[j] = s;
        } else {
            double p = 1.0 / (stencil[j] - xd);
            for (int m = 0; m < n; ++m) {
                if (m == j || m == deriv_index) continue;
                p *= (xd - stencil[m]) / (stencil[j] - stencil[m]);
            }
            row.alpha[j] = p;
        }
    }
    return row;
}

bool GlmTableau::is_auxiliary(int stage) const {
    return std::find(aux_indices.begin(), aux_indices.end(), stage) != aux_indices.end();
}

namespace {

// Shared row-by-row assembly. grid holds the ell past nodes followed by the r
// block abscissae; row_stencil_start and deriv position vary per row kind.
GlmTableau assemble_from_rows(int k, int r, int ell, int nu, AuxChoice choice,
                              const Vector& c, const std::vector<double>& xi,
                              bool bdf_ivm) {
    const int npast = ell;
    std::vector<double> grid(npast + r);
    for (int i = 0; i < npast; ++i) grid[i] = -(npast - 1) + i;
    for (int i = 0; i < r; ++i) grid[npast + i] = c(i);

    if (static_cast<int>(grid.size()) < k + 1)
        throw InvalidTriple("assemble_glm: grid too short, need ell + r >= k + 1");

    GlmTableau t;
    t.k = k;
    t.r = r;
    t.ell = ell;
    t.nu = nu;
    t.choice = choice;
    t.c = c;
    t.xi = xi;
    for (int i = ell - 1; i < r - 1; ++i) t.aux_indices.push_back(i);

    t.A1 = Matrix::Zero(r, r);
    t.A2 = Matrix::Zero(r, r);
    const int main_rows = r - (k - nu);
    for (int i = 1; i <= r; ++i) {
        int start, dindex;
        if (bdf_ivm) {
            // every row differentiates at its own point with the k prior nodes
            start = npast + i - 1 - k;
            dindex = k;
        } else if (i <= main_rows) {
            start = npast + i - 1 - nu;
            dindex = nu;
        } else {
            start = static_cast<int>(grid.size()) - (k + 1);
            dindex = k - (r - i);
        }
        if (start < 0)
            throw InvalidTriple("assemble_glm: stencil reaches before the past window (ell < nu?)");
        std::vector<double> stencil(grid.begin() + start, grid.begin() + start + k + 1);
        const LmfRow row = differentiation_weights(stencil, dindex);

        for (int j = 0; j <= k; ++j) {
            const int g = start + j;
            const double w = row.alpha[j];
            if (g >= npast) {
                t.A2(i - 1, g - npast) += w;
            } else {
                // past node at time g - (npast-1) - 1 + ... : grid[g] = g-(npast-1).
                // grid[g] = j0 - ell maps to y_old column j0; grid value 0 maps
                // to the carried endpoint, column r.
                const int time = static_cast<int>(std::lround(grid[g]));
                const int col = (time == 0) ? r : time + ell;
                t.A1(i - 1, col - 1) += w;
            }
        }
    }

    t.A = linalg::inverse(t.A2);
    t.U = -t.A * t.A1;
    return t;
}

} // namespace

GlmTableau assemble_glm(int k, int r, int ell, AuxChoice choice) {
    const int nu = gbdf_nu(k);
    auto [c, xi] = abscissae(k, r, ell, choice);
    if (ell < nu)
        throw InvalidTriple("assemble_glm: need ell >= nu");
    if (ell + r < k + 1)
        throw InvalidTriple("assemble_glm: need ell + r >= k + 1");
    return assemble_from_rows(k, r, ell, nu, choice, c, xi, /*bdf_ivm=*/false);
}

bool has_error_companion(int k, int r, int ell) {
    return ell >= gbdf_nu(k + 1) && ell + r >= k + 2 && ell <= r;
}

GlmTableau error_estimator_tableau(int k, int r, int ell, AuxChoice choice) {
    if (!has_error_companion(k, r, ell))
        throw InvalidTriple("error_estimator_tableau: no feasible (k+1, r, ell) companion");
    const int kp = k + 1;
    const int nu = gbdf_nu(kp);
    auto [c, xi] = abscissae(k, r, ell, choice); // identical grid to the order-k method
    return assemble_from_rows(kp, r, ell, nu, choice, c, xi, /*bdf_ivm=*/false);
}

StartTableau starting_tableau(int k) {
    if (k < 1) throw InvalidTriple("starting_tableau: k must be >= 1");
    StartTableau st;
    st.k = k;
    st.calA = Matrix::Zero(k, k + 1);
    std::vector<double> stencil(k + 1);
    for (int i = 0; i <= k; ++i) stencil[i] = i;
    for (int j = 1; j <= k; ++j) {
        const LmfRow row = differentiation_weights(stencil, j);
        for (int i = 0; i <= k; ++i) st.calA(j - 1, i) = row.alpha[i];
    }
    st.a0 = st.calA.col(0);
    st.square = st.calA.rightCols(k);
    st.A_hat = linalg::inverse(st.square);
    st.gamma_start = blended::optimize_gamma(st.A_hat).gamma;
    return st;
}

GlmTableau bdf_ivm_block(int k, int r) {
    if (k < 1 || r < 1) throw InvalidTriple("bdf_ivm_block: k, r must be >= 1");
    // Uniform abscissae, ell = r, past window of r nodes; rows need k prior
    // nodes so require r + r >= k + 1 at the first row: start index r - k >= 0.
    if (r < k) throw InvalidTriple("bdf_ivm_block: need r >= k");
    Vector c(r);
    for (int i = 0; i < r; ++i) c(i) = i + 1;
    return assemble_from_rows(k, r, r, k, AuxChoice::None, c, {1.0}, /*bdf_ivm=*/true);
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int jj = 0; jj < cols; ++jj) m(i, jj) = j[i][jj].get<double>();
    return m;
}

} // namespace

std::string tableau_to_json(const GlmTableau& t) {
    nlohmann::json j;
    j["k"] = t.k;
    j["r"] = t.r;
    j["ell"] = t.ell;
    j["nu"] = t.nu;
    j["choice"] = to_string(t.choice);
    j["c"] = std::vector<double>(t.c.data(), t.c.data() + t.c.size());
    j["xi"] = t.xi;
    j["A"] = matrix_to_json(t.A);
    j["U"] = matrix_to_json(t.U);
    j["A1"] = matrix_to_json(t.A1);
    j["A2"] = matrix_to_json(t.A2);
    j["gamma"] = t.gamma;
    // 17 significant digits: nlohmann serializes doubles round-trip exactly.
    return j.dump(2);
}

GlmTableau tableau_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tableau_from_json: ") + e.what());
    }
    GlmTableau t;
    t.k = j.at("k").get<int>();
    t.r = j.at("r").get<int>();
    t.ell = j.at("ell").get<int>();
    t.nu = j.at("nu").get<int>();
    t.choice = aux_choice_from_string(j.at("choice").get<std::string>());
    const auto cv = j.at("c").get<std::vector<double>>();
    t.c = Eigen::Map<const Vector>(cv.data(), static_cast<Eigen::Index>(cv.size()));
    t.xi = j.at("xi").get<std::vector<double>>();
    t.A = matrix_from_json(j.at("A"));
    t.U = matrix_from_json(j.at("U"));
    t.A1 = matrix_from_json(j.at("A1"));
    t.A2 = matrix_from_json(j.at("A2"));
    t.gamma = j.at("gamma").get<double>();
    for (int i = t.ell - 1; i < t.r - 1; ++i) t.aux_indices.push_back(i);
    return t;
}

} // namespace bglm::construction
