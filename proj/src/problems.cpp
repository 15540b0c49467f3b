#include "bglm/problems.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bglm::problems {

OdeProblem linear_test(double lambda) {
    OdeProblem p;
    p.name = "linear_test";
    p.m = 1;
    p.f = [lambda](double, const Vector& y) { return Vector(lambda * y); };
    p.jacobian = [lambda](double, const Vector&) {
        Matrix J(1, 1);
        J(0, 0) = lambda;
        return J;
    };
    p.y0 = Vector::Ones(1);
    p.t0 = 0.0;
    p.t_end = 10.0;
    p.analytic = [lambda](double t) {
        Vector y(1);
        y(0) = std::exp(lambda * t);
        return y;
    };
    p.rtol = 1e-8;
    p.atol = 1e-10;
    p.h0 = 1e-2;
    return p;
}

OdeProblem prothero_robinson(double lambda) {
    // y' = lambda (y - g(t)) + g'(t), g(t) = sin t, y(0) = g(0): y = g.
    OdeProblem p;
    p.name = "prothero_robinson";
    p.m = 1;
    p.f = [lambda](double t, const Vector& y) {
        Vector dy(1);
        dy(0) = lambda * (y(0) - std::sin(t)) + std::cos(t);
        return dy;
    };
    p.jacobian = [lambda](double, const Vector&) {
        Matrix J(1, 1);
        J(0, 0) = lambda;
        return J;
    };
    p.y0 = Vector::Zero(1);
    p.t0 = 0.0;
    p.t_end = 10.0;
    p.analytic = [](double t) {
        Vector y(1);
        y(0) = std::sin(t);
        return y;
    };
    p.rtol = 1e-8;
    p.atol = 1e-10;
    p.h0 = 1e-4;
    return p;
}

namespace {

OdeProblem vanderpol() {
    // Stiff van der Pol in the eps formulation of the IVP test set.
    const double eps = 1e-6;
    OdeProblem p;
    p.name = "vanderpol";
    p.m = 2;
    p.f = [eps](double, const Vector& y) {
        Vector dy(2);
        dy(0) = y(1);
        dy(1) = ((1.0 - y(0) * y(0)) * y(1) - y(0)) / eps;
        return dy;
    };
    p.jacobian = [eps](double, const Vector& y) {
        Matrix J(2, 2);
        J(0, 0) = 0.0;
        J(0, 1) = 1.0;
        J(1, 0) = (-2.0 * y(0) * y(1) - 1.0) / eps;
        J(1, 1) = (1.0 - y(0) * y(0)) / eps;
        return J;
    };
    p.y0 = Vector(2);
    p.y0 << 2.0, 0.0;
    p.t0 = 0.0;
    p.t_end = 0.5;
    p.rtol = 1e-6;
    p.atol = 1e-8;
    p.h0 = 1e-6;
    return p;
}

OdeProblem robertson() {
    OdeProblem p;
    p.name = "robertson";
    p.m = 3;
    p.f = [](double, const Vector& y) {
        Vector dy(3);
        dy(0) = -0.04 * y(0) + 1e4 * y(1) * y(2);
        dy(2) = 3e7 * y(1) * y(1);
        dy(1) = -dy(0) - dy(2);
        return dy;
    };
    p.jacobian = [](double, const Vector& y) {
        Matrix J(3, 3);
        J(0, 0) = -0.04;
        J(0, 1) = 1e4 * y(2);
        J(0, 2) = 1e4 * y(1);
        J(2, 0) = 0.0;
        J(2, 1) = 6e7 * y(1);
        J(2, 2) = 0.0;
        J(1, 0) = -J(0, 0) - J(2, 0);
        J(1, 1) = -J(0, 1) - J(2, 1);
        J(1, 2) = -J(0, 2) - J(2, 2);
        return J;
    };
    p.y0 = Vector(3);
    p.y0 << 1.0, 0.0, 0.0;
    p.t0 = 0.0;
    p.t_end = 1e4;
    p.rtol = 1e-6;
    p.atol = 1e-10;
    p.h0 = 1e-6;
    return p;
}

// Air-pollution kinetics: 20 species, 25 reactions.
const double kp[25] = {
    0.35,   0.266e2, 0.123e5, 0.86e-3, 0.82e-3, 0.15e5, 0.13e-3,
    0.24e5, 0.165e5, 0.9e4,   0.22e-1, 0.12e5,  0.188e1, 0.163e5,
    0.48e7, 0.35e-3, 0.175e-1, 0.1e9,  0.444e12, 0.124e4, 0.21e1,
    0.578e1, 0.474e-1, 0.178e4, 0.312e1};

Vector pollution_rates(const Vector& y) {
    Vector r(25);
    r(0) = kp[0] * y(0);
    r(1) = kp[1] * y(1) * y(3);
    r(2) = kp[2] * y(4) * y(1);
    r(3) = kp[3] * y(6);
    r(4) = kp[4] * y(6);
    r(5) = kp[5] * y(6) * y(5);
    r(6) = kp[6] * y(8);
    r(7) = kp[7] * y(8) * y(5);
    r(8) = kp[8] * y(10) * y(1);
    r(9) = kp[9] * y(10) * y(0);
    r(10) = kp[10] * y(12);
    r(11) = kp[11] * y(9) * y(1);
    r(12) = kp[12] * y(13);
    r(13) = kp[13] * y(0) * y(5);
    r(14) = kp[14] * y(2);
    r(15) = kp[15] * y(3);
    r(16) = kp[16] * y(3);
    r(17) = kp[17] * y(15);
    r(18) = kp[18] * y(15);
    r(19) = kp[19] * y(16) * y(5);
    r(20) = kp[20] * y(18);
    r(21) = kp[21] * y(18);
    r(22) = kp[22] * y(0) * y(3);
    r(23) = kp[23] * y(18) * y(0);
    r(24) = kp[24] * y(19);
    return r;
}

OdeProblem pollution() {
    OdeProblem p;
    p.name = "pollution";
    p.m = 20;
    p.f = [](double, const Vector& y) {
        const Vector r = pollution_rates(y);
        Vector dy(20);
        dy(0) = -r(0) - r(9) - r(13) - r(22) - r(23)
                + r(1) + r(2) + r(8) + r(10) + r(11) + r(21) + r(24);
        dy(1) = -r(1) - r(2) - r(8) - r(11) + r(0) + r(20);
        dy(2) = -r(14) + r(0) + r(16) + r(18) + r(21);
        dy(3) = -r(1) - r(15) - r(16) - r(22) + r(14);
        dy(4) = -r(2) + 2.0 * r(3) + r(5) + r(6) + r(12) + r(19);
        dy(5) = -r(5) - r(7) - r(13) - r(19) + r(2) + 2.0 * r(17);
        dy(6) = -r(3) - r(4) - r(5) + r(12);
        dy(7) = r(3) + r(4) + r(5) + r(6);
        dy(8) = -r(6) - r(7);
        dy(9) = -r(11) + r(6) + r(8);
        dy(10) = -r(8) - r(9) + r(7) + r(10);
        dy(11) = r(8);
        dy(12) = -r(10) + r(9);
        dy(13) = -r(12) + r(11);
        dy(14) = r(13);
        dy(15) = -r(17) - r(18) + r(15);
        dy(16) = -r(19);
        dy(17) = r(19);
        dy(18) = -r(20) - r(21) - r(23) + r(22) + r(24);
        dy(19) = -r(24) + r(23);
        return dy;
    };
    p.jacobian = [](double, const Vector& y) {
        // dr/dy is sparse; assemble J = S * dr/dy with S the stoichiometry.
        Matrix dr = Matrix::Zero(25, 20);
        dr(0, 0) = kp[0];
        dr(1, 1) = kp[1] * y(3);  dr(1, 3) = kp[1] * y(1);
        dr(2, 4) = kp[2] * y(1);  dr(2, 1) = kp[2] * y(4);
        dr(3, 6) = kp[3];
        dr(4, 6) = kp[4];
        dr(5, 6) = kp[5] * y(5);  dr(5, 5) = kp[5] * y(6);
        dr(6, 8) = kp[6];
        dr(7, 8) = kp[7] * y(5);  dr(7, 5) = kp[7] * y(8);
        dr(8, 10) = kp[8] * y(1); dr(8, 1) = kp[8] * y(10);
        dr(9, 10) = kp[9] * y(0); dr(9, 0) = kp[9] * y(10);
        dr(10, 12) = kp[10];
        dr(11, 9) = kp[11] * y(1); dr(11, 1) = kp[11] * y(9);
        dr(12, 13) = kp[12];
        dr(13, 0) = kp[13] * y(5); dr(13, 5) = kp[13] * y(0);
        dr(14, 2) = kp[14];
        dr(15, 3) = kp[15];
        dr(16, 3) = kp[16];
        dr(17, 15) = kp[17];
        dr(18, 15) = kp[18];
        dr(19, 16) = kp[19] * y(5); dr(19, 5) = kp[19] * y(16);
        dr(20, 18) = kp[20];
        dr(21, 18) = kp[21];
        dr(22, 0) = kp[22] * y(3); dr(22, 3) = kp[22] * y(0);
        dr(23, 18) = kp[23] * y(0); dr(23, 0) = kp[23] * y(18);
        dr(24, 19) = kp[24];

        Matrix S = Matrix::Zero(20, 25);
        auto add = [&S](int species, std::initializer_list<std::pair<int, double>> terms) {
            for (auto [reac, coef] : terms) S(species, reac) += coef;
        };
        add(0, {{0, -1}, {9, -1}, {13, -1}, {22, -1}, {23, -1},
                {1, 1}, {2, 1}, {8, 1}, {10, 1}, {11, 1}, {21, 1}, {24, 1}});
        add(1, {{1, -1}, {2, -1}, {8, -1}, {11, -1}, {0, 1}, {20, 1}});
        add(2, {{14, -1}, {0, 1}, {16, 1}, {18, 1}, {21, 1}});
        add(3, {{1, -1}, {15, -1}, {16, -1}, {22, -1}, {14, 1}});
        add(4, {{2, -1}, {3, 2}, {5, 1}, {6, 1}, {12, 1}, {19, 1}});
        add(5, {{5, -1}, {7, -1}, {13, -1}, {19, -1}, {2, 1}, {17, 2}});
        add(6, {{3, -1}, {4, -1}, {5, -1}, {12, 1}});
        add(7, {{3, 1}, {4, 1}, {5, 1}, {6, 1}});
        add(8, {{6, -1}, {7, -1}});
        add(9, {{11, -1}, {6, 1}, {8, 1}});
        add(10, {{8, -1}, {9, -1}, {7, 1}, {10, 1}});
        add(11, {{8, 1}});
        add(12, {{10, -1}, {9, 1}});
        add(13, {{12, -1}, {11, 1}});
        add(14, {{13, 1}});
        add(15, {{17, -1}, {18, -1}, {15, 1}});
        add(16, {{19, -1}});
        add(17, {{19, 1}});
        add(18, {{20, -1}, {21, -1}, {23, -1}, {22, 1}, {24, 1}});
        add(19, {{24, -1}, {23, 1}});
        return Matrix(S * dr);
    };
    p.y0 = Vector::Zero(20);
    p.y0(1) = 0.2;
    p.y0(3) = 0.04;
    p.y0(6) = 0.1;
    p.y0(7) = 0.3;
    p.y0(8) = 0.01;
    p.y0(16) = 0.007;
    p.t0 = 0.0;
    p.t_end = 60.0;
    p.rtol = 1e-6;
    p.atol = 1e-10;
    p.h0 = 1e-5;
    return p;
}

} // namespace

OdeProblem builtin(const std::string& name) {
    if (name == "linear_test") return linear_test(-1.0);
    if (name == "prothero_robinson") return prothero_robinson(-1e6);
    if (name == "vanderpol") return vanderpol();
    if (name == "robertson") return robertson();
    if (name == "pollution") return pollution();
    throw UnknownProblem("unknown builtin problem: " + name);
}

// ---------------------------------------------------------------------------
// Ingestion: linear systems y' = M y + g(t), or componentwise rational rhs.

namespace {

struct Term {
    double c = 0.0;
    int tpow = 0;
    std::vector<int> ypow; // length m
};

double eval_terms(const std::vector<Term>& terms, double t, const Vector& y) {
    double s = 0.0;
    for (const Term& tm : terms) {
        double v = tm.c;
        for (int p = 0; p < tm.tpow; ++p) v *= t;
        for (size_t j = 0; j < tm.ypow.size(); ++j)
            for (int p = 0; p < tm.ypow[j]; ++p) v *= y(static_cast<int>(j));
        s += v;
    }
    return s;
}

// Partial derivative of a term list with respect to y_j.
std::vector<Term> diff_terms(const std::vector<Term>& terms, int j) {
    std::vector<Term> out;
    for (const Term& tm : terms) {
        if (tm.ypow[j] == 0) continue;
        Term d = tm;
        d.c *= tm.ypow[j];
        d.ypow[j] -= 1;
        out.push_back(d);
    }
    return out;
}

struct RationalComponent {
    std::vector<Term> num;
    std::vector<Term> den; // empty means 1
};

struct PiecewisePoly {
    std::vector<double> breakpoints;          // ascending; pieces.size() = breakpoints.size() + 1
    std::vector<std::vector<double>> pieces;  // ascending coefficients in t

    double eval(double t) const {
        size_t i = 0;
        while (i < breakpoints.size() && t >= breakpoints[i]) ++i;
        const auto& c = pieces[i];
        double v = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
        return v;
    }
};

std::vector<Term> parse_terms(const nlohmann::json& j, int m) {
    std::vector<Term> out;
    for (const auto& tj : j) {
        Term tm;
        tm.c = tj.at("c").get<double>();
        tm.tpow = tj.value("t", 0);
        tm.ypow.assign(m, 0);
        if (tj.contains("y")) {
            const auto yp = tj.at("y").get<std::vector<int>>();
            if (static_cast<int>(yp.size()) != m)
                throw ValidationError("term exponent list length does not match dimension");
            tm.ypow = yp;
        }
        if (tm.tpow < 0)
            throw ValidationError("negative time exponent in term");
        for (int e : tm.ypow)
            if (e < 0) throw ValidationError("negative state exponent in term");
        out.push_back(tm);
    }
    return out;
}

nlohmann::json terms_to_json(const std::vector<Term>& terms) {
    nlohmann::json out = nlohmann::json::array();
    for (const Term& tm : terms) {
        nlohmann::json tj;
        tj["c"] = tm.c;
        if (tm.tpow != 0) tj["t"] = tm.tpow;
        bool any = false;
        for (int e : tm.ypow) any = any || e != 0;
        if (any) tj["y"] = tm.ypow;
        out.push_back(tj);
    }
    return out;
}

} // namespace

OdeProblem ingest_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("problem JSON: ") + e.what());
    }

    OdeProblem p;
    try {
        p.name = j.value("name", "ingested");
        p.m = j.at("dimension").get<int>();
        if (p.m < 1) throw ValidationError("dimension must be >= 1");
        const auto y0v = j.at("y0").get<std::vector<double>>();
        if (static_cast<int>(y0v.size()) != p.m)
            throw ValidationError("y0 length does not match dimension");
        p.y0 = Eigen::Map<const Vector>(y0v.data(), p.m);
        const auto span = j.at("t_span").get<std::vector<double>>();
        if (span.size() != 2 || !(span[1] > span[0]))
            throw ValidationError("t_span must be [t0, t1] with t1 > t0");
        p.t0 = span[0];
        p.t_end = span[1];
        p.rtol = j.value("rtol", 1e-6);
        p.atol = j.value("atol", 1e-8);
        p.h0 = j.value("h0", 1e-4);
        for (int i = 0; i < p.m; ++i)
            if (!std::isfinite(p.y0(i))) throw ValidationError("non-finite y0 entry");

        const nlohmann::json& rhs = j.at("rhs");
        const std::string type = rhs.at("type").get<std::string>();
        nlohmann::json normalized = j;

        if (type == "linear") {
            const auto mj = rhs.at("matrix");
            if (static_cast<int>(mj.size()) != p.m)
                throw ValidationError("matrix row count does not match dimension");
            auto M = std::make_shared<Matrix>(p.m, p.m);
            for (int i = 0; i < p.m; ++i) {
                if (static_cast<int>(mj[i].size()) != p.m)
                    throw ValidationError("matrix column count does not match dimension");
                for (int c = 0; c < p.m; ++c) {
                    (*M)(i, c) = mj[i][c].get<double>();
                    if (!std::isfinite((*M)(i, c)))
                        throw ValidationError("non-finite matrix entry");
                }
            }
            auto g = std::make_shared<std::vector<PiecewisePoly>>();
            if (rhs.contains("forcing")) {
                const auto& fj = rhs.at("forcing");
                if (static_cast<int>(fj.size()) != p.m)
                    throw ValidationError("forcing length does not match dimension");
                for (const auto& comp : fj) {
                    PiecewisePoly pp;
                    if (comp.is_array()) {
                        pp.pieces.push_back(comp.get<std::vector<double>>());
                    } else {
                        pp.breakpoints = comp.at("breakpoints").get<std::vector<double>>();
                        for (const auto& piece : comp.at("pieces"))
                            pp.pieces.push_back(piece.get<std::vector<double>>());
                        if (pp.pieces.size() != pp.breakpoints.size() + 1)
                            throw ValidationError("piecewise forcing needs one more piece than breakpoints");
                    }
                    g->push_back(pp);
                }
            }
            const int m = p.m;
            p.f = [M, g, m](double t, const Vector& y) {
                Vector dy = *M * y;
                if (!g->empty())
                    for (int i = 0; i < m; ++i) dy(i) += (*g)[i].eval(t);
                return dy;
            };
            p.jacobian = [M](double, const Vector&) { return *M; };
        } else if (type == "rational" || type == "polynomial") {
            auto comps = std::make_shared<std::vector<RationalComponent>>();
            const auto& cj = rhs.at("components");
            if (static_cast<int>(cj.size()) != p.m)
                throw ValidationError("components length does not match dimension");
            for (const auto& comp : cj) {
                RationalComponent rc;
                rc.num = parse_terms(comp.at("num"), p.m);
                if (comp.contains("den")) rc.den = parse_terms(comp.at("den"), p.m);
                comps->push_back(rc);
            }
            // normalize the description so serialize() round-trips
            nlohmann::json comps_json = nlohmann::json::array();
            for (const auto& rc : *comps) {
                nlohmann::json cc;
                cc["num"] = terms_to_json(rc.num);
                if (!rc.den.empty()) cc["den"] = terms_to_json(rc.den);
                comps_json.push_back(cc);
            }
            normalized["rhs"] = {{"type", "rational"}, {"components", comps_json}};

            const int m = p.m;
            p.f = [comps, m](double t, const Vector& y) {
                Vector dy(m);
                for (int i = 0; i < m; ++i) {
                    const auto& rc = (*comps)[i];
                    double v = eval_terms(rc.num, t, y);
                    if (!rc.den.empty()) v /= eval_terms(rc.den, t, y);
                    dy(i) = v;
                }
                return dy;
            };
            p.jacobian = [comps, m](double t, const Vector& y) {
                Matrix J(m, m);
                for (int i = 0; i < m; ++i) {
                    const auto& rc = (*comps)[i];
                    for (int c = 0; c < m; ++c) {
                        const double dn = eval_terms(diff_terms(rc.num, c), t, y);
                        if (rc.den.empty()) {
                            J(i, c) = dn;
                        } else {
                            const double n = eval_terms(rc.num, t, y);
                            const double d = eval_terms(rc.den, t, y);
                            const double dd = eval_terms(diff_terms(rc.den, c), t, y);
                            J(i, c) = (dn * d - n * dd) / (d * d);
                        }
                    }
                }
                return J;
            };
        } else {
            throw ValidationError("unknown rhs type: " + type);
        }
        p.description = normalized.dump(2);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("problem JSON: ") + e.what());
    }
    return p;
}

OdeProblem ingest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return ingest_text(buf.str());
}

std::string serialize(const OdeProblem& p) {
    if (p.description.empty())
        throw ValidationError("serialize: problem has no JSON description");
    return p.description;
}

} // namespace bglm::problems
