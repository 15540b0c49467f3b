#pragma once

// Nonlinear integration engine: blended iteration on the real problem,
// starting procedure, deferred-correction error estimate, extrapolation
// predictor and the adaptive stepsize driver.

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "bglm/construction.hpp"
#include "bglm/problems.hpp"

namespace bglm::solver {

using construction::GlmTableau;
using linalg::Matrix;
using linalg::Vector;

struct SolverOptions {
    int k = 6;
    int choice = 2;        // auxiliary-point scheme: 1 geometric, 2 rational
    double rtol = 1e-6;
    double atol = 1e-8;
    double h0 = 0.0;       // 0 -> problem recommendation
    bool fixed_h = false;
    int max_sweeps = 0;    // 0 -> 12 adaptive, 40 fixed-step
    std::vector<double> dense_times;
    long max_steps = 2000000;
};

struct Statistics {
    long steps = 0;
    long rejected = 0;
    long sweeps = 0;        // total blended sweeps
    long fevals = 0;
    long jevals = 0;
    long factorizations = 0;
    double cost = 0.0;      // 2/3 m^3 per factorization + 2 m^2 per row solve
};

struct IntegrationResult {
    bool success = false;
    std::string message;
    double t_final = 0.0;
    Vector y_final;
    std::vector<std::pair<double, Vector>> samples;      // accepted carried points
    std::vector<std::pair<double, Vector>> dense_output; // at requested times
    Statistics stats;
};

/// Stepsize update factor min(5, max(0.2, 0.9 error_norm^{-1/(k+1)})).
double stepsize_factor(double error_norm, int k);

/// Interpolation history of recent carried solution points; degree is capped
/// by the number of stored points (at most k+1).
class History {
public:
    explicit History(int max_points) : max_points_(max_points) {}

    void push(double t, const Vector& y);
    Vector eval(double t) const;
    double oldest_time() const { return times_.front(); }
    double newest_time() const { return times_.back(); }
    int size() const { return static_cast<int>(times_.size()); }

private:
    int max_points_;
    std::deque<double> times_;
    std::deque<Vector> values_;
};

using Rhs = std::function<Vector(double, const Vector&)>;

struct StageSolveResult {
    Matrix Y;                     // block iterate on exit, stages by row
    Matrix F;                     // f at the stages of the last sweep
    int sweeps = 0;
    bool converged = false;
    double last_correction = 0.0; // weighted norm of the last delta
    double contraction = 0.0;     // last observed correction ratio
    std::vector<Matrix> iterates; // filled when record_iterates
};

/// Blended iteration for the block problem Y - h (A (x) I_m) f(Y) = eta,
/// preconditioned by the given factorization of I_m - h gamma J. A single
/// factorization is reused; two block-diagonal solves per sweep.
StageSolveResult blended_stage_solve(const Matrix& A, const Matrix& Ainv, double gamma,
                                     const Rhs& f, const std::vector<double>& stage_times,
                                     double h, const Matrix& eta, const Matrix& predictor,
                                     const linalg::LuFactorization& n_factor,
                                     double rtol, double atol, int max_sweeps,
                                     double stop_tol, bool record_iterates,
                                     Statistics* stats);

/// Starting procedure: uniform block GBDF of order k solved by its own
/// blended iteration. Returns the k+1 values y_0..y_k by row; h is halved on
/// iteration failure (up to 10 times).
Matrix start_block(const problems::OdeProblem& p, const construction::StartTableau& st,
                   double& h, double rtol, double atol, Statistics& stats);

/// Deferred-correction error block: residual of (y_old, Y) in the order-(k+1)
/// companion, re-weighted and passed once through the blended splitting.
Matrix deferred_correction(const GlmTableau& t, const GlmTableau& est,
                           const Matrix& y_old, const Matrix& Y, const Matrix& F,
                           double h, const linalg::LuFactorization& n_factor,
                           Statistics* stats);

/// Weighted RMS of v against atol + rtol |yref|.
double weighted_rms(const Vector& v, const Vector& yref, double rtol, double atol);

IntegrationResult integrate(const problems::OdeProblem& p, const SolverOptions& opts);

std::string result_to_json(const IntegrationResult& res);

} // namespace bglm::solver
