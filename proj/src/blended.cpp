#include "bglm/blended.hpp"

#include <cmath>
#include <limits>

#include "bglm/construction.hpp"

namespace bglm::blended {

Matrix iteration_core(const Matrix& A, double gamma) {
    const int n = static_cast<int>(A.rows());
    const Matrix shifted = A - gamma * Matrix::Identity(n, n);
    return linalg::lu_factor(A).solve(Matrix(shifted * shifted));
}

BlendedParams convergence_params(const Matrix& A, double gamma) {
    BlendedParams p;
    p.gamma = gamma;
    p.rho_tilde = linalg::spectral_radius(iteration_core(A, gamma));
    p.rho_inf = p.rho_tilde / (gamma * gamma);
    p.rho_star = p.rho_tilde / (2.0 * gamma);
    double gmin = std::numeric_limits<double>::infinity();
    for (const Complex& mu : linalg::eigenvalues(A)) gmin = std::min(gmin, std::abs(mu));
    p.gamma_star = gmin;
    return p;
}

namespace {

// rho_star(gamma) directly from the spectrum of A: the eigenvalues of the
// iteration core are (mu - gamma)^2 / mu.
double rho_star_of(const std::vector<Complex>& spectrum, double gamma) {
    double rt = 0.0;
    for (const Complex& mu : spectrum) {
        const Complex d = mu - gamma;
        rt = std::max(rt, std::abs(d * d / mu));
    }
    return rt / (2.0 * gamma);
}

} // namespace

BlendedParams optimize_gamma(const Matrix& A) {
    const std::vector<Complex> spectrum = linalg::eigenvalues(A);
    double gamma_star = std::numeric_limits<double>::infinity();
    for (const Complex& mu : spectrum) gamma_star = std::min(gamma_star, std::abs(mu));

    const double lo = 0.1 * gamma_star, hi = 10.0 * gamma_star;
    const int nscan = 200;
    std::vector<double> gs(nscan), vals(nscan);
    for (int i = 0; i < nscan; ++i) {
        gs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (nscan - 1));
        vals[i] = rho_star_of(spectrum, gs[i]);
    }
    // Detect interior local minima of the coarse scan.
    std::vector<int> minima;
    for (int i = 1; i + 1 < nscan; ++i)
        if (vals[i] < vals[i - 1] && vals[i] <= vals[i + 1]) minima.push_back(i);
    if (minima.empty()) {
        minima.push_back(vals.front() <= vals.back() ? 0 : nscan - 1);
    }

    double best_gamma = gs[minima.front()];
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> refined;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int idx : minima) {
        double a = gs[std::max(0, idx - 1)], b = gs[std::min(nscan - 1, idx + 1)];
        double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
        double f1 = rho_star_of(spectrum, x1), f2 = rho_star_of(spectrum, x2);
        while (b - a > 1e-12) {
            if (f1 <= f2) {
                b = x2; x2 = x1; f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = rho_star_of(spectrum, x1);
            } else {
                a = x1; x1 = x2; f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = rho_star_of(spectrum, x2);
            }
        }
        const double g = 0.5 * (a + b), v = rho_star_of(spectrum, g);
        refined.push_back(v);
        if (v < best_val - 1e-12 || (std::abs(v - best_val) <= 1e-12 && g < best_gamma)) {
            best_val = v;
            best_gamma = g;
        }
    }
    bool multiple = false;
    for (double v : refined)
        if (std::abs(v - best_val) > 1e-6) multiple = true;

    BlendedParams p = convergence_params(A, best_gamma);
    p.multiple_minima = multiple && refined.size() > 1;
    return p;
}

double rho_q(Complex q, double gamma, double rho_tilde) {
    const Complex w = 1.0 - gamma * q;
    return std::abs(q) / std::norm(w) * rho_tilde;
}

construction::GlmTableau make_method(int k, int r, int ell, int choice_num) {
    using construction::AuxChoice;
    AuxChoice choice = AuxChoice::None;
    if (ell < r) choice = (choice_num == 1) ? AuxChoice::Geometric : AuxChoice::Rational;
    construction::GlmTableau t = construction::assemble_glm(k, r, ell, choice);
    t.gamma = optimize_gamma(t.A).gamma;
    return t;
}

ScalarIterateHistory scalar_blended_iterate(const construction::GlmTableau& t,
                                            Complex q, const CVector& eta, int sweeps) {
    const int r = t.r;
    const double gamma = t.gamma;
    const Complex ngq = 1.0 - gamma * q;
    if (std::abs(ngq) == 0.0)
        throw SingularAtQ("scalar_blended_iterate: 1 - gamma q vanishes");

    const linalg::CMatrix I = linalg::CMatrix::Identity(r, r);
    const linalg::CMatrix Ainv = t.A2.cast<Complex>();
    const linalg::CMatrix A = t.A.cast<Complex>();
    const Complex theta = 1.0 / ngq;

    const linalg::CMatrix M = theta * (I - q * A) + gamma * (1.0 - theta) * (Ainv - q * I);
    const CVector eta1 = gamma * (Ainv * eta);
    const CVector eta_q = theta * eta + (1.0 - theta) * eta1;

    ScalarIterateHistory h;
    h.fixed_point = linalg::CluFactorization(I - q * A).solve(eta);

    CVector y = CVector::Zero(r);
    h.iterates.push_back(y);
    h.error_norms.push_back((y - h.fixed_point).norm());
    for (int i = 0; i < sweeps; ++i) {
        y = y - theta * (M * y - eta_q);
        if (y.norm() > 1e12)
            throw Divergence("scalar_blended_iterate: iterate norm exceeded 1e12");
        h.iterates.push_back(y);
        h.error_norms.push_back((y - h.fixed_point).norm());
    }
    return h;
}

} // namespace bglm::blended
