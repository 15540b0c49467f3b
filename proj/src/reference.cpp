#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bglm/problems.hpp"
#include "bglm/solver.hpp"

namespace bglm::problems {

namespace {

std::string cache_key(const OdeProblem& p, double t) {
    std::ostringstream os;
    os.precision(17);
    os << p.name << '@' << t;
    return os.str();
}

Vector self_reference(const OdeProblem& p, double t) {
    // Tight-tolerance run with the highest-order comfortable method; a second
    // method must agree to 4+ digits before the value is trusted.
    auto run = [&](int k) {
        solver::SolverOptions o;
        o.k = k;
        o.choice = 2;
        o.rtol = 1e-12;
        o.atol = 1e-14;
        OdeProblem q = p;
        q.t_end = t;
        solver::IntegrationResult r = solver::integrate(q, o);
        if (!r.success)
            throw NoReference("self-reference run failed for " + p.name + ": " + r.message);
        return r.y_final;
    };
    const Vector a = run(8);
    const Vector b = run(6);
    for (int i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a(i)), std::abs(b(i)), 1e-10});
        if (std::abs(a(i) - b(i)) > 1e-4 * scale)
            throw NoReference("self-reference runs disagree for " + p.name);
    }
    return a;
}

} // namespace

Vector reference_solution(const OdeProblem& p, double t, const std::string& cache_path) {
    if (p.has_analytic()) return p.analytic(t);

    nlohmann::json cache = nlohmann::json::object();
    if (!cache_path.empty()) {
        std::ifstream in(cache_path);
        if (in) {
            try {
                in >> cache;
            } catch (const nlohmann::json::exception&) {
                cache = nlohmann::json::object();
            }
        }
        const std::string key = cache_key(p, t);
        if (cache.contains(key)) {
            const auto v = cache[key]["y"].get<std::vector<double>>();
            return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
        }
    }

    const Vector y = self_reference(p, t);

    if (!cache_path.empty()) {
        const std::string key = cache_key(p, t);
        cache[key] = {{"y", std::vector<double>(y.data(), y.data() + y.size())},
                      {"provenance", "self-reference rtol=1e-12 k=8, checked against k=6"}};
        std::ofstream outf(cache_path);
        outf << cache.dump(2) << '\n';
    }
    return y;
}

} // namespace bglm::problems
