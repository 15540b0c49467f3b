#include "bglm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "bglm/blended.hpp"
#include "bglm/catalogue.hpp"

namespace bglm::solver {

double stepsize_factor(double error_norm, int k) {
    const double f = 0.9 * std::pow(std::max(error_norm, 1e-10), -1.0 / (k + 1));
    return std::min(5.0, std::max(0.2, f));
}

void History::push(double t, const Vector& y) {
    times_.push_back(t);
    values_.push_back(y);
    while (static_cast<int>(times_.size()) > max_points_) {
        times_.pop_front();
        values_.pop_front();
    }
}

Vector History::eval(double t) const {
    const int n = static_cast<int>(times_.size());
    if (n == 0) throw DimensionMismatch("History::eval: empty history");
    if (n == 1) return values_[0];
    // Barycentric Lagrange; node counts are tiny.
    std::vector<double> w(n, 1.0);
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
            if (m != j) w[j] /= (times_[j] - times_[m]);
    double denom = 0.0;
    Vector num = Vector::Zero(values_[0].size());
    for (int j = 0; j < n; ++j) {
        const double d = t - times_[j];
        if (d == 0.0) return values_[j];
        const double c = w[j] / d;
        denom += c;
        num += c * values_[j];
    }
    return num / denom;
}

double weighted_rms(const Vector& v, const Vector& yref, double rtol, double atol) {
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        const double w = atol + rtol * std::abs(yref(i));
        const double e = v(i) / w;
        s += e * e;
    }
    return std::sqrt(s / v.size());
}

namespace {

// Weighted RMS over a full stage block.
double block_norm(const Matrix& d, const Matrix& yref, double rtol, double atol) {
    double s = 0.0;
    for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j) {
            const double w = atol + rtol * std::abs(yref(i, j));
            const double e = d(i, j) / w;
            s += e * e;
        }
    return std::sqrt(s / (d.rows() * d.cols()));
}

// Apply (I_m - h gamma J)^{-1} to every stage row.
Matrix solve_rows(const linalg::LuFactorization& n_factor, const Matrix& block,
                  Statistics* stats) {
    Matrix out(block.rows(), block.cols());
    for (int i = 0; i < block.rows(); ++i)
        out.row(i) = n_factor.solve(Vector(block.row(i).transpose())).transpose();
    if (stats) stats->cost += 2.0 * block.cols() * block.cols() * block.rows();
    return out;
}

Matrix eval_stages(const Rhs& f, const std::vector<double>& times, const Matrix& Y,
                   Statistics* stats) {
    Matrix F(Y.rows(), Y.cols());
    for (int i = 0; i < Y.rows(); ++i)
        F.row(i) = f(times[i], Vector(Y.row(i).transpose())).transpose();
    if (stats) stats->fevals += Y.rows();
    return F;
}

} // namespace

StageSolveResult blended_stage_solve(const Matrix& A, const Matrix& Ainv, double gamma,
                                     const Rhs& f, const std::vector<double>& stage_times,
                                     double h, const Matrix& eta, const Matrix& predictor,
                                     const linalg::LuFactorization& n_factor,
                                     double rtol, double atol, int max_sweeps,
                                     double stop_tol, bool record_iterates,
                                     Statistics* stats) {
    const int r = static_cast<int>(A.rows());
    const Matrix A_shift = A - gamma * Matrix::Identity(r, r);
    const Matrix I_minus_gAinv = Matrix::Identity(r, r) - gamma * Ainv;

    StageSolveResult res;
    res.Y = predictor;
    if (record_iterates) res.iterates.push_back(res.Y);

    double prev_err = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        res.F = eval_stages(f, stage_times, res.Y, stats);
        const Matrix V = res.Y - eta;
        const Matrix R1 = I_minus_gAinv * V - h * (A_shift * res.F);
        const Matrix R2 = Ainv * V - h * res.F;
        const Matrix S = solve_rows(n_factor, R1, stats);
        const Matrix D = solve_rows(n_factor, Matrix(S + gamma * R2), stats);

        res.Y -= D;
        if (record_iterates) res.iterates.push_back(res.Y);
        if (stats) stats->sweeps += 1;
        res.sweeps = sweep + 1;

        if (!res.Y.allFinite())
            throw Divergence("blended iteration produced non-finite values");

        const double err = block_norm(D, res.Y, rtol, atol);
        res.last_correction = err;
        res.contraction = err / prev_err;
        if (err <= stop_tol) {
            res.converged = true;
            return res;
        }
        if (sweep >= 1 && res.contraction >= 0.99) {
            // stalled; either at the roundoff floor or not contracting
            res.converged = err <= 0.05;
            return res;
        }
        prev_err = err;
    }
    res.converged = res.last_correction <= 0.05;
    return res;
}

Matrix start_block(const problems::OdeProblem& p, const construction::StartTableau& st,
                   double& h, double rtol, double atol, Statistics& stats) {
    const int k = st.k;
    const int m = p.m;
    for (int attempt = 0; attempt < 10; ++attempt) {
        // Factor I_m - h gamma_start J at the initial point.
        Matrix J;
        if (p.has_jacobian()) {
            J = p.jacobian(p.t0, p.y0);
        } else {
            J.resize(m, m);
            const Vector f0 = p.f(p.t0, p.y0);
            for (int j = 0; j < m; ++j) {
                Vector yp = p.y0;
                const double d = std::sqrt(std::numeric_limits<double>::epsilon()) *
                                 std::max(std::abs(yp(j)), atol);
                yp(j) += d;
                J.col(j) = (p.f(p.t0, yp) - f0) / d;
            }
            stats.fevals += m + 1;
        }
        stats.jevals += 1;
        try {
            linalg::LuFactorization nlu(
                Matrix(Matrix::Identity(m, m) - h * st.gamma_start * J));
            stats.factorizations += 1;
            stats.cost += 2.0 / 3.0 * m * m * m;

            const Matrix eta = -(st.A_hat * st.a0) * p.y0.transpose();
            Matrix predictor(k, m);
            for (int i = 0; i < k; ++i) predictor.row(i) = p.y0.transpose();
            std::vector<double> times(k);
            for (int i = 0; i < k; ++i) times[i] = p.t0 + (i + 1) * h;

            StageSolveResult r = blended_stage_solve(
                st.A_hat, st.square, st.gamma_start, p.f, times, h, eta, predictor,
                nlu, rtol, atol, 30, 0.005, false, &stats);
            if (r.converged) {
                Matrix out(k + 1, m);
                out.row(0) = p.y0.transpose();
                out.bottomRows(k) = r.Y;
                return out;
            }
        } catch (const SingularMatrix&) {
            // fall through to the retry with a smaller h
        } catch (const Divergence&) {
        }
        h *= 0.5;
    }
    throw IterationFailure("start procedure failed to converge after 10 halvings");
}

Matrix deferred_correction(const GlmTableau& t, const GlmTableau& est,
                           const Matrix& y_old, const Matrix& Y, const Matrix& F,
                           double h, const linalg::LuFactorization& n_factor,
                           Statistics* stats) {
    const Matrix eta_plus = est.U * y_old;
    const Matrix tau = Y - h * (est.A * F) - eta_plus;
    const Matrix tau1 = t.gamma * (t.A2 * tau);
    const Matrix S = solve_rows(n_factor, Matrix(tau - tau1), stats);
    return solve_rows(n_factor, Matrix(S + tau1), stats);
}

namespace {

struct Driver {
    const problems::OdeProblem& p;
    const SolverOptions& opts;
    GlmTableau tab;
    GlmTableau est;
    IntegrationResult out;

    double t = 0.0;
    double h = 0.0;
    Matrix y_old;    // r x m, previous block stages
    History hist;
    size_t next_dense = 0;

    std::optional<linalg::LuFactorization> nlu;
    double factored_h = 0.0;
    bool refresh_jacobian = true;
    Matrix J;

    int max_sweeps;

    Driver(const problems::OdeProblem& prob, const SolverOptions& o)
        : p(prob), opts(o), hist(o.k + 1) {
        max_sweeps = opts.max_sweeps > 0 ? opts.max_sweeps : (opts.fixed_h ? 40 : 12);
    }

    void bump_fevals(long n) { out.stats.fevals += n; }

    Matrix jacobian(double tj, const Vector& yj) {
        if (p.has_jacobian()) return p.jacobian(tj, yj);
        const int m = p.m;
        Matrix Jfd(m, m);
        const Vector f0 = p.f(tj, yj);
        for (int j = 0; j < m; ++j) {
            Vector yp = yj;
            const double d = std::sqrt(std::numeric_limits<double>::epsilon()) *
                             std::max(std::abs(yp(j)), opts.atol);
            yp(j) += d;
            Jfd.col(j) = (p.f(tj, yp) - f0) / d;
        }
        bump_fevals(m + 1);
        return Jfd;
    }

    void ensure_factorization(const Vector& y_current) {
        const bool h_moved = std::abs(h - factored_h) > 0.1 * factored_h;
        if (nlu && !refresh_jacobian && !h_moved) return;
        if (refresh_jacobian || J.size() == 0) {
            J = jacobian(t, y_current);
            out.stats.jevals += 1;
            refresh_jacobian = false;
        }
        const int m = p.m;
        nlu.emplace(Matrix(Matrix::Identity(m, m) - h * tab.gamma * J));
        factored_h = h;
        out.stats.factorizations += 1;
        out.stats.cost += 2.0 / 3.0 * m * m * m;
    }

    // Rebuild the y_old window from the history interpolant at spacing h.
    void rebuild_window() {
        for (int j = 0; j < tab.r; ++j) {
            const double tj = t + (tab.c(j) - tab.ell) * h;
            y_old.row(j) = hist.eval(tj).transpose();
        }
    }

    // Largest h for which the rebuilt window stays inside the history span
    // and the block does not overshoot t_end.
    double clamp_h(double hn) const {
        if (tab.ell > 1) {
            const double span = t - hist.oldest_time();
            if (span > 0.0) hn = std::min(hn, span / (tab.ell - 1));
        }
        const double remaining = p.t_end - t;
        if (t + tab.ell * hn > p.t_end) hn = remaining / tab.ell;
        return hn;
    }

    void flush_dense(double upto) {
        while (next_dense < opts.dense_times.size() &&
               opts.dense_times[next_dense] <= upto + 1e-12 * std::abs(upto)) {
            const double td = opts.dense_times[next_dense];
            out.dense_output.emplace_back(td, hist.eval(td));
            ++next_dense;
        }
    }

    void run() {
        const int r = tab.r, ell = tab.ell, m = p.m;
        h = opts.h0 > 0.0 ? opts.h0 : p.h0;
        const double span = p.t_end - p.t0;
        h = std::min(h, span / (2.0 * tab.k));

        const construction::StartTableau st = construction::starting_tableau(tab.k);
        const Matrix start = start_block(p, st, h, opts.rtol, opts.atol, out.stats);
        for (int i = 0; i <= tab.k; ++i) hist.push(p.t0 + i * h, start.row(i).transpose());
        t = p.t0 + tab.k * h;
        out.samples.emplace_back(p.t0, p.y0);
        for (int i = 1; i <= tab.k; ++i)
            out.samples.emplace_back(p.t0 + i * h, Vector(start.row(i).transpose()));
        flush_dense(t);

        y_old.resize(r, m);
        rebuild_window();
        refresh_jacobian = true; // start used gamma_start; factor for the main method

        long guard = 0;
        while (t < p.t_end - 1e-12 * std::max(1.0, std::abs(p.t_end))) {
            if (++guard > opts.max_steps)
                throw IterationFailure("step limit exceeded");
            if (h < 1e-14 * span)
                throw StepsizeUnderflow("stepsize underflow at t = " + std::to_string(t));

            const double hc = clamp_h(h);
            if (hc != h) {
                // window spacing must follow every h change
                h = hc;
                rebuild_window();
            }
            ensure_factorization(Vector(y_old.row(r - 1).transpose()));

            Matrix eta = tab.U * y_old;
            Matrix predictor(r, m);
            std::vector<double> times(r);
            for (int i = 0; i < r; ++i) {
                times[i] = t + tab.c(i) * h;
                predictor.row(i) = hist.eval(times[i]).transpose();
            }

            StageSolveResult sres;
            bool iter_ok = true;
            try {
                sres = blended_stage_solve(tab.A, tab.A2, tab.gamma, p.f, times, h, eta,
                                           predictor, *nlu, opts.rtol, opts.atol,
                                           max_sweeps, 0.005, false, &out.stats);
                iter_ok = sres.converged;
            } catch (const Divergence&) {
                iter_ok = false;
            }

            if (!iter_ok) {
                out.stats.rejected += 1;
                refresh_jacobian = true;
                h *= 0.5;
                rebuild_window();
                continue;
            }

            double err = 0.0;
            if (!opts.fixed_h) {
                const Matrix e = deferred_correction(tab, est, y_old, sres.Y, sres.F, h,
                                                     *nlu, &out.stats);
                err = weighted_rms(Vector(e.row(r - 1).transpose()),
                                   Vector(sres.Y.row(r - 1).transpose()),
                                   opts.rtol, opts.atol);
            }

            if (opts.fixed_h || err <= 1.0) {
                t += ell * h;
                y_old = sres.Y;
                for (int j = 0; j < ell - 1; ++j)
                    hist.push(t + (j + 1 - ell) * h, Vector(sres.Y.row(j).transpose()));
                hist.push(t, Vector(sres.Y.row(r - 1).transpose()));
                out.samples.emplace_back(t, Vector(sres.Y.row(r - 1).transpose()));
                out.stats.steps += 1;
                flush_dense(t);
                if (sres.contraction > 0.5) refresh_jacobian = true;

                if (!opts.fixed_h) {
                    const double hn = h * stepsize_factor(err, tab.k);
                    if (std::abs(hn - h) > 0.01 * h) {
                        h = hn;
                        rebuild_window();
                    }
                }
            } else {
                out.stats.rejected += 1;
                refresh_jacobian = true;
                h *= stepsize_factor(err, tab.k);
                rebuild_window();
            }
        }

        out.t_final = t;
        out.y_final = y_old.row(r - 1).transpose();
        out.success = true;
    }
};

} // namespace

IntegrationResult integrate(const problems::OdeProblem& p, const SolverOptions& opts) {
    const catalogue::Entry e = catalogue::entry_for_order(opts.k);
    if (!construction::has_error_companion(e.k, e.r, e.ell))
        throw InvalidTriple("method (" + std::to_string(e.k) + "," + std::to_string(e.r) +
                            "," + std::to_string(e.ell) +
                            ") has no error-estimator companion and is not solver-eligible");

    Driver d(p, opts);
    d.tab = blended::make_method(e.k, e.r, e.ell, opts.choice);
    d.est = construction::error_estimator_tableau(e.k, e.r, e.ell, d.tab.choice);
    try {
        d.run();
    } catch (const std::exception& ex) {
        d.out.success = false;
        d.out.message = ex.what();
        d.out.t_final = d.t;
        if (d.y_old.size() > 0)
            d.out.y_final = d.y_old.row(d.tab.r - 1).transpose();
        else
            d.out.y_final = p.y0;
        return d.out;
    }
    return d.out;
}

std::string result_to_json(const IntegrationResult& res) {
    nlohmann::json j;
    j["success"] = res.success;
    if (!res.message.empty()) j["message"] = res.message;
    j["t_final"] = res.t_final;
    j["y_final"] = std::vector<double>(res.y_final.data(),
                                       res.y_final.data() + res.y_final.size());
    nlohmann::json stats;
    stats["steps"] = res.stats.steps;
    stats["rejected"] = res.stats.rejected;
    stats["sweeps"] = res.stats.sweeps;
    stats["fevals"] = res.stats.fevals;
    stats["jevals"] = res.stats.jevals;
    stats["factorizations"] = res.stats.factorizations;
    stats["cost"] = res.stats.cost;
    j["stats"] = stats;
    auto dump_points = [](const std::vector<std::pair<double, Vector>>& pts) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [tv, yv] : pts) {
            nlohmann::json e;
            e["t"] = tv;
            e["y"] = std::vector<double>(yv.data(), yv.data() + yv.size());
            arr.push_back(e);
        }
        return arr;
    };
    j["samples"] = dump_points(res.samples);
    if (!res.dense_output.empty()) j["dense_output"] = dump_points(res.dense_output);
    return j.dump(2);
}

} // namespace bglm::solver
