#pragma once

// Built-in stiff test problems plus file-based ingestion of externally
// defined ones (linear systems with piecewise-polynomial forcing, or
// componentwise rational right-hand sides).

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "bglm/linalg.hpp"

namespace bglm::problems {

using linalg::Matrix;
using linalg::Vector;

struct OdeProblem {
    std::string name;
    int m = 0;
    std::function<Vector(double, const Vector&)> f;
    std::function<Matrix(double, const Vector&)> jacobian; // may be empty
    Vector y0;
    double t0 = 0.0;
    double t_end = 1.0;
    std::function<Vector(double)> analytic; // may be empty

    // recommended run settings
    double rtol = 1e-6;
    double atol = 1e-8;
    double h0 = 1e-3;

    // normalized JSON description, present for ingested problems
    std::string description;

    bool has_jacobian() const { return static_cast<bool>(jacobian); }
    bool has_analytic() const { return static_cast<bool>(analytic); }
};

/// name in {linear_test, prothero_robinson, vanderpol, robertson, pollution}.
OdeProblem builtin(const std::string& name);

/// Parametrized variants used by tests.
OdeProblem linear_test(double lambda);
OdeProblem prothero_robinson(double lambda);

/// Parse a problem JSON document (see README for the schema).
OdeProblem ingest_text(const std::string& json_text);
OdeProblem ingest(const std::string& path);

/// Round-trippable JSON description; only available for ingested problems.
std::string serialize(const OdeProblem& p);

/// Analytic value when available, else a cached tight-tolerance self-reference
/// (computed on demand and stored in cache_path when given). Implemented on
/// top of the solver.
Vector reference_solution(const OdeProblem& p, double t,
                          const std::string& cache_path = "");

} // namespace bglm::problems
