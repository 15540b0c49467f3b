// Command-line front end: tableau construction, iteration/stability analysis,
// integration runs and work-precision sweeps. Exit codes: 0 success,
// 1 internal error, 2 invalid configuration, 3 solver failure.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bglm/analysis.hpp"
#include "bglm/blended.hpp"
#include "bglm/catalogue.hpp"
#include "bglm/construction.hpp"
#include "bglm/problems.hpp"
#include "bglm/solver.hpp"

namespace {

using namespace bglm;

void print_matrix(std::ostream& os, const std::string& name, const linalg::Matrix& m) {
    os << name << " =\n";
    os.precision(15);
    for (int i = 0; i < m.rows(); ++i) {
        os << "  ";
        for (int j = 0; j < m.cols(); ++j) os << m(i, j) << (j + 1 < m.cols() ? "  " : "\n");
    }
}

double scd_of(const linalg::Vector& y, const linalg::Vector& ref, double atol) {
    double worst = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        const double denom = std::max(std::abs(ref(i)), atol);
        worst = std::max(worst, std::abs(y(i) - ref(i)) / denom);
    }
    return -std::log10(std::max(worst, 1e-300));
}

int cmd_tabulate(int k, int r, int ell, int choice_num, const std::string& out) {
    construction::GlmTableau t = blended::make_method(k, r, ell, choice_num);
    print_matrix(std::cout, "A", t.A);
    print_matrix(std::cout, "U", t.U);
    std::cout << "c = ";
    std::cout.precision(15);
    for (int i = 0; i < t.r; ++i) std::cout << t.c(i) << (i + 1 < t.r ? ", " : "\n");
    std::cout << "gamma = " << t.gamma << "\n";
    if (!out.empty()) {
        std::ofstream f(out);
        f << construction::tableau_to_json(t) << '\n';
    }
    return 0;
}

int cmd_analyze(const std::vector<int>& ks, int choice_num, bool check,
                const std::string& out_csv, const std::string& out_report) {
    std::ostringstream csv;
    csv << "k,r,r_minus_ell,choice,gamma,rho_tilde,rho_inf,rho_star\n";
    nlohmann::json reports = nlohmann::json::array();
    bool ok = true;
    for (int k : ks) {
        const catalogue::Entry e = catalogue::entry_for_order(k);
        construction::GlmTableau t = blended::make_method(e.k, e.r, e.ell, choice_num);
        const blended::BlendedParams bp = blended::convergence_params(t.A, t.gamma);
        csv.precision(4);
        csv << std::fixed;
        csv << e.k << ',' << e.r << ',' << (e.r - e.ell) << ',' << choice_num << ','
            << bp.gamma << ',' << bp.rho_tilde << ',' << bp.rho_inf << ',' << bp.rho_star
            << '\n';

        const analysis::StabilityReport rep = analysis::check_stability(t);
        reports.push_back(nlohmann::json::parse(analysis::report_to_json(rep)));
        if (!rep.l_stable) {
            std::cerr << "method k=" << k << " failed the L-stability check\n";
            ok = false;
        }
        if (bp.rho_star > 1.0) {
            std::cerr << "method k=" << k << " failed the L-convergence check (rho* > 1)\n";
            ok = false;
        }
        if (check) {
            for (const auto& ref : catalogue::reference_rows(choice_num)) {
                if (ref.k != k) continue;
                const double tol = 5e-5;
                if (std::abs(bp.gamma - ref.gamma) > tol ||
                    std::abs(bp.rho_tilde - ref.rho_tilde) > tol ||
                    std::abs(bp.rho_inf - ref.rho_inf) > tol ||
                    std::abs(bp.rho_star - ref.rho_star) > tol) {
                    std::cerr << "method k=" << k
                              << " disagrees with the embedded reference values\n";
                    ok = false;
                }
            }
        }
    }
    std::cout << csv.str();
    if (!out_csv.empty()) {
        std::ofstream f(out_csv);
        f << csv.str();
    }
    if (!out_report.empty()) {
        std::ofstream f(out_report);
        f << reports.dump(2) << '\n';
    }
    return ok ? 0 : 1;
}

int cmd_locus(int k, int r, int ell, int choice_num, const std::vector<double>& window,
              int res, const std::string& out) {
    construction::GlmTableau t = blended::make_method(k, r, ell, choice_num);
    const analysis::BoundaryLocus loc = analysis::boundary_locus(
        t, window[0], window[1], window[2], window[3], res, res);
    std::ofstream grid(out + "_grid.csv");
    grid << analysis::locus_grid_csv(loc.grid);
    std::ofstream contour(out + "_contour.csv");
    contour << analysis::contour_csv(loc.contour);
    std::cout << "wrote " << out << "_grid.csv and " << out << "_contour.csv ("
              << loc.contour.size() << " contour segments)\n";
    return 0;
}

problems::OdeProblem load_problem(const std::string& name, const std::string& file) {
    if (!file.empty()) return problems::ingest(file);
    return problems::builtin(name);
}

int cmd_solve(const std::string& problem, const std::string& file, int k, int choice_num,
              double rtol, double atol, double h0, bool fixed_h, const std::string& out,
              const std::string& refcache) {
    const problems::OdeProblem p = load_problem(problem, file);
    solver::SolverOptions o;
    o.k = k;
    o.choice = choice_num;
    o.rtol = rtol;
    o.atol = atol;
    o.h0 = h0;
    o.fixed_h = fixed_h;
    solver::IntegrationResult res = solver::integrate(p, o);

    nlohmann::json j = nlohmann::json::parse(solver::result_to_json(res));
    try {
        const linalg::Vector ref = problems::reference_solution(p, res.t_final, refcache);
        j["scd"] = scd_of(res.y_final, ref, atol);
    } catch (const NoReference&) {
    }
    const std::string text = j.dump(2);
    if (!out.empty()) {
        std::ofstream f(out);
        f << text << '\n';
    }
    std::cout << text << '\n';
    return res.success ? 0 : 3;
}

struct WpRecord {
    std::string problem;
    int k, r, r_minus_ell, choice;
    double rtol, atol, scd, cost, wall_time;
    bool ok;
};

int cmd_wp(const std::string& problem, const std::string& file, std::vector<int> ks,
           std::vector<double> tols, int choice_num, const std::string& out,
           const std::string& refcache) {
    const problems::OdeProblem p = load_problem(problem, file);
    const linalg::Vector ref = problems::reference_solution(p, p.t_end, refcache);

    struct Job { int k; double tol; };
    std::vector<Job> jobs;
    for (int k : ks)
        for (double tol : tols) jobs.push_back({k, tol});
    std::vector<WpRecord> records(jobs.size());

    int nthreads = 1;
    if (const char* env = std::getenv("BLENDED_GBDF_THREADS"))
        nthreads = std::max(1, std::atoi(env));
    nthreads = std::min<int>(nthreads, static_cast<int>(jobs.size()));

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            const Job& job = jobs[i];
            const catalogue::Entry e = catalogue::entry_for_order(job.k);
            WpRecord rec;
            rec.problem = p.name;
            rec.k = e.k;
            rec.r = e.r;
            rec.r_minus_ell = e.r - e.ell;
            rec.choice = choice_num;
            rec.rtol = job.tol;
            rec.atol = std::min(job.tol * 1e-2, 1e-8);
            solver::SolverOptions o;
            o.k = job.k;
            o.choice = choice_num;
            o.rtol = rec.rtol;
            o.atol = rec.atol;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const solver::IntegrationResult res = solver::integrate(p, o);
                rec.ok = res.success;
                rec.cost = res.stats.cost;
                rec.scd = res.success ? scd_of(res.y_final, ref, rec.atol)
                                      : std::nan("");
            } catch (const std::exception&) {
                rec.ok = false;
                rec.cost = 0.0;
                rec.scd = std::nan("");
            }
            rec.wall_time =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            records[i] = rec;
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ostringstream csv;
    csv << "problem,k,r,r_minus_ell,choice,rtol,atol,scd,cost,wall_time\n";
    for (const auto& rec : records) {
        csv.precision(10);
        csv << rec.problem << ',' << rec.k << ',' << rec.r << ',' << rec.r_minus_ell << ','
            << rec.choice << ',' << rec.rtol << ',' << rec.atol << ',' << rec.scd << ','
            << rec.cost << ',' << rec.wall_time << '\n';
    }
    std::cout << csv.str();
    if (!out.empty()) {
        std::ofstream f(out);
        f << csv.str();
    }

    // Monotonicity: fraction of consecutive tolerance steps where scd increased.
    for (int k : ks) {
        int up = 0, total = 0;
        const WpRecord* prev = nullptr;
        for (const auto& rec : records) {
            if (rec.k != k || !rec.ok) { prev = nullptr; continue; }
            if (prev) {
                ++total;
                if (rec.scd > prev->scd) ++up;
            }
            prev = &rec;
        }
        if (total > 0)
            std::cout << "k=" << k << ": scd increased in " << up << "/" << total
                      << " consecutive tolerance steps\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blended GBDF general linear method toolkit"};
    app.require_subcommand(1);

    // tabulate
    auto* tab = app.add_subcommand("tabulate", "assemble and print a method tableau");
    int tk = 0, tr = -1, tell = -1, tchoice = 2;
    std::string tout;
    tab->add_option("--k", tk, "order")->required();
    tab->add_option("--r", tr, "blocksize (default: catalogue)");
    tab->add_option("--ell", tell, "carried points (default: catalogue)");
    tab->add_option("--choice", tchoice, "auxiliary-point scheme, 1 or 2");
    tab->add_option("--out", tout, "tableau JSON output path");

    // analyze
    auto* ana = app.add_subcommand("analyze", "iteration parameters and stability report");
    bool acat = false, acheck = false;
    std::vector<int> aks;
    int achoice = 2;
    std::string acsv, areport;
    ana->add_flag("--catalogue", acat, "run the full catalogue");
    ana->add_option("--k", aks, "orders to analyze");
    ana->add_option("--choice", achoice, "auxiliary-point scheme, 1 or 2");
    ana->add_flag("--check", acheck, "verify against the embedded reference values");
    ana->add_option("--out", acsv, "CSV output path");
    ana->add_option("--report", areport, "stability report JSON path");

    // locus
    auto* loc = app.add_subcommand("locus", "boundary-locus scan of a method");
    int lk = 0, lr = -1, lell = -1, lchoice = 2, lres = 400;
    std::vector<double> lwindow{-10, 10, -10, 10};
    std::string lout = "locus";
    loc->add_option("--k", lk, "order")->required();
    loc->add_option("--r", lr, "blocksize (default: catalogue)");
    loc->add_option("--ell", lell, "carried points (default: catalogue)");
    loc->add_option("--choice", lchoice, "auxiliary-point scheme, 1 or 2");
    loc->add_option("--window", lwindow, "re0 re1 im0 im1")->expected(4);
    loc->add_option("--res", lres, "grid resolution per axis");
    loc->add_option("--out", lout, "output file prefix");

    // solve
    auto* sol = app.add_subcommand("solve", "integrate a problem");
    std::string sproblem, sfile, sout, srefcache;
    int sk = 6, schoice = 2;
    double srtol = 1e-6, satol = 1e-8, sh0 = 0.0;
    bool sfixed = false;
    sol->add_option("--problem", sproblem, "builtin problem name");
    sol->add_option("--file", sfile, "problem JSON file (overrides --problem)");
    sol->add_option("--k", sk, "method order");
    sol->add_option("--choice", schoice, "auxiliary-point scheme, 1 or 2");
    sol->add_option("--rtol", srtol, "relative tolerance");
    sol->add_option("--atol", satol, "absolute tolerance");
    sol->add_option("--h0", sh0, "initial stepsize (0: problem default)");
    sol->add_flag("--fixed-h", sfixed, "disable the stepsize controller");
    sol->add_option("--out", sout, "result JSON output path");
    sol->add_option("--refcache", srefcache, "reference cache JSON path");

    // wp
    auto* wp = app.add_subcommand("wp", "work-precision sweep");
    std::string wproblem, wfile, wout, wrefcache;
    std::vector<int> wks;
    std::vector<double> wtols;
    int wchoice = 2;
    wp->add_option("--problem", wproblem, "builtin problem name");
    wp->add_option("--file", wfile, "problem JSON file (overrides --problem)");
    wp->add_option("--k-list", wks, "method orders")->required();
    wp->add_option("--tol-list", wtols, "rtol values")->required();
    wp->add_option("--choice", wchoice, "auxiliary-point scheme, 1 or 2");
    wp->add_option("--out", wout, "CSV output path");
    wp->add_option("--refcache", wrefcache, "reference cache JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (tab->parsed()) {
            if (tr < 0 || tell < 0) {
                const bglm::catalogue::Entry e = bglm::catalogue::entry_for_order(tk);
                if (tr < 0) tr = e.r;
                if (tell < 0) tell = e.ell;
            }
            return cmd_tabulate(tk, tr, tell, tchoice, tout);
        }
        if (ana->parsed()) {
            if (acat) {
                aks.clear();
                for (const auto& e : bglm::catalogue::triples()) aks.push_back(e.k);
            }
            if (aks.empty()) {
                std::cerr << "analyze: select methods with --catalogue or --k\n";
                return 2;
            }
            return cmd_analyze(aks, achoice, acheck, acsv, areport);
        }
        if (loc->parsed()) {
            if (lr < 0 || lell < 0) {
                const bglm::catalogue::Entry e = bglm::catalogue::entry_for_order(lk);
                if (lr < 0) lr = e.r;
                if (lell < 0) lell = e.ell;
            }
            return cmd_locus(lk, lr, lell, lchoice, lwindow, lres, lout);
        }
        if (sol->parsed()) {
            if (sproblem.empty() && sfile.empty()) {
                std::cerr << "solve: give --problem or --file\n";
                return 2;
            }
            return cmd_solve(sproblem, sfile, sk, schoice, srtol, satol, sh0, sfixed,
                             sout, srefcache);
        }
        if (wp->parsed()) {
            if (wproblem.empty() && wfile.empty()) {
                std::cerr << "wp: give --problem or --file\n";
                return 2;
            }
            if (wtols.empty()) {
                std::cerr << "wp: empty tolerance list\n";
                return 2;
            }
            return cmd_wp(wproblem, wfile, wks, wtols, wchoice, wout, wrefcache);
        }
    } catch (const bglm::InvalidTriple& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const bglm::UnknownProblem& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const bglm::ParseError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const bglm::ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const bglm::IterationFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const bglm::StepsizeUnderflow& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
