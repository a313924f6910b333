// Command-line front end for the descent Newton NEP solver and its baselines.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nep/harness.hpp"

namespace {

using namespace nep;
using namespace nep::harness;

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void add_config_flags(CLI::App& app, CommonOptions& opt) {
    auto& c = opt.config;
    app.add_option("--grad-tol", c.grad_tol, "stopping tolerance on ||g||")->capture_default_str();
    app.add_option("--max-iter", c.max_iter, "iteration cap")->capture_default_str();
    app.add_option("--alpha", c.alpha, "Armijo constant")->capture_default_str();
    app.add_option("--theta", c.theta, "angle constant")->capture_default_str();
    app.add_option("--gamma", c.gamma, "direction/gradient ratio constant")->capture_default_str();
    app.add_option("--tau", c.tau, "safeguard threshold")->capture_default_str();
    app.add_option("--out-dir", opt.out_dir, "output directory (default $NEP_OUT_DIR, then .)");
}

void add_solve_flags(CLI::App& app, SolveOptions& opt, std::string& solver) {
    app.add_option("--problem", opt.problem, "problem id, e.g. examp1 or quadratic:7:2x2")->required();
    app.add_option("--solver", solver, "descent-newton | newton-kkt | exact-jacobi")
        ->check(CLI::IsMember({"descent-newton", "newton-kkt", "exact-jacobi"}))
        ->capture_default_str();
    app.add_option("--x0", opt.x0, "comma-separated start or 'default'")->capture_default_str();
    add_config_flags(app, opt.common);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jacobi-type descent Newton solver for two-player Nash equilibrium problems"};
    app.require_subcommand(1);

    SolveOptions solve_opt;
    std::string solve_solver = "descent-newton";
    auto* solve_cmd = app.add_subcommand("solve", "run one solver on one problem");
    add_solve_flags(*solve_cmd, solve_opt, solve_solver);

    CommonOptions table_opt;
    auto* table_cmd = app.add_subcommand("table1", "compare the solvers on the five illustrative examples");
    add_config_flags(*table_cmd, table_opt);

    BenchOptions bench_opt;
    bench_opt.common.config.grad_tol = 1e-6;
    std::vector<std::string> bench_solvers{"descent-newton", "newton-kkt"};
    auto* bench_cmd = app.add_subcommand("facility-bench", "random-start study on the 2D facility game");
    bench_cmd->add_option("--runs", bench_opt.runs, "number of starts")->capture_default_str();
    bench_cmd->add_option("--seed", bench_opt.seed, "start generator seed")->capture_default_str();
    bench_cmd->add_option("--solvers", bench_solvers, "solvers to compare")
        ->check(CLI::IsMember({"descent-newton", "newton-kkt", "exact-jacobi"}))
        ->delimiter(',');
    bench_cmd->add_option("--threads", bench_opt.threads, "worker threads (0: all cores)");
    add_config_flags(*bench_cmd, bench_opt.common);

    DiagnoseOptions diag_opt;
    std::string diag_solver = "descent-newton";
    auto* diag_cmd = app.add_subcommand("diagnose", "solve, then certify assumptions and lemma bounds");
    add_solve_flags(*diag_cmd, diag_opt.solve, diag_solver);
    diag_cmd->add_option("--seed", diag_opt.seed, "sampling seed")->capture_default_str();
    diag_cmd->add_option("--box", diag_opt.box, "half-width of the sampling box")->capture_default_str();
    diag_cmd->add_option("--samples", diag_opt.samples, "sample count")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    const std::string stamp = utc_now();
    try {
        if (*solve_cmd) {
            solve_opt.solver = parse_solver(solve_solver);
            solve_opt.common.timestamp = stamp;
            solve_opt.common.config.validate();
            return cmd_solve(solve_opt, std::cout);
        }
        if (*table_cmd) {
            table_opt.timestamp = stamp;
            table_opt.config.validate();
            return cmd_table1(table_opt, std::cout);
        }
        if (*bench_cmd) {
            bench_opt.solvers.clear();
            for (const auto& s : bench_solvers) bench_opt.solvers.push_back(parse_solver(s));
            bench_opt.common.timestamp = stamp;
            bench_opt.common.config.validate();
            return cmd_facility_bench(bench_opt, std::cout);
        }
        if (*diag_cmd) {
            diag_opt.solve.solver = parse_solver(diag_solver);
            diag_opt.solve.common.config.validate();
            return cmd_diagnose(diag_opt, std::cout);
        }
    } catch (const UnknownProblem& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnknownProblem;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
