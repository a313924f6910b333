// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nep/baselines.hpp"
#include "nep/diagnostics.hpp"
#include "nep/harness.hpp"
#include "nep/problems.hpp"

using namespace nep;

namespace {

struct Run {
    NepProblem problem;
    SolveReport report;
    SolverConfig config;
};

Vector v1(double a) { return Vector::Constant(1, a); }

double dist(const SolveReport& r, double a, double b) {
    return std::hypot(r.final_x1(0) - a, r.final_x2(0) - b);
}

std::size_t backtracks(const SolveReport& r) {
    std::size_t n = 0;
    for (const auto& rec : r.trajectory)
        if (rec.certificate) n += rec.certificate->backtracks;
    return n;
}

double t_min(const SolveReport& r) {
    double t = 1.0;
    for (const auto& rec : r.trajectory) t = std::min(t, rec.t);
    return t;
}

std::string point(const SolveReport& r) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", r.final_x1(0), r.final_x2(0));
    return buf;
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %d: %s [%s]\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    if (!ok) ++failures;
}

Run reference_run(int example, harness::SolverKind kind) {
    const NepProblem p = problems::make_example(example);
    const SolverConfig c;
    return {p, harness::run_solver(kind, p, v1(-5), v1(1), c), c};
}

} // namespace

int main() {
    using harness::SolverKind;
    std::vector<Run> alg_runs;  // descent Newton runs of criteria 1-4
    char buf[512];

    {
        bool ok = true;
        std::string detail;
        const struct {
            int id;
            double a, b;
        } rows[] = {{1, 2.0, 1.0}, {2, 4.0 / 7, 33.0 / 7}, {4, 0.7, 0.6}};
        for (const auto& row : rows) {
            Run r = reference_run(row.id, SolverKind::DescentNewton);
            const auto& s = r.report;
            const bool row_ok = s.status == Status::Converged && s.iterations == 1 && backtracks(s) == 0 &&
                                s.final_residual <= 1e-4 && dist(s, row.a, row.b) <= 1e-3;
            ok = ok && row_ok;
            std::snprintf(buf, sizeof buf, "examp%d %s %s |g|=%.3g it=%zu bt=%zu; ", row.id, to_string(s.status),
                          point(s).c_str(), s.final_residual, s.iterations, backtracks(s));
            detail += buf;
            alg_runs.push_back(std::move(r));
        }
        report(1, ok, "quadratic examples solved in one full step", detail);
    }

    {
        Run a3 = reference_run(3, SolverKind::DescentNewton);
        const Run j2 = reference_run(2, SolverKind::ExactJacobi);
        const Run j4 = reference_run(4, SolverKind::ExactJacobi);
        const Run n3 = reference_run(3, SolverKind::NewtonKkt);
        const Run n5 = reference_run(5, SolverKind::NewtonKkt);
        const bool ok_a3 = a3.report.status == Status::Diverged;
        const bool ok_j2 = j2.report.status == Status::Diverged;
        const bool ok_j4 = j4.report.status == Status::InnerSolveFailure;
        const bool ok_n3 = dist(n3.report, 3.2, -1.4) <= 1e-3 && n3.report.iterations == 1;
        const bool ok_n5 = dist(n5.report, -1.0, -1.0) <= 1e-3;
        std::snprintf(buf, sizeof buf,
                      "alg1 examp3 %s; jacobi examp2 %s; jacobi examp4 %s; newton examp3 %s it=%zu; "
                      "newton examp5 %s it=%zu%s",
                      to_string(a3.report.status), to_string(j2.report.status), to_string(j4.report.status),
                      point(n3.report).c_str(), n3.report.iterations, point(n5.report).c_str(),
                      n5.report.iterations, ok_n5 ? "" : " (expected (-1, -1))");
        report(2, ok_a3 && ok_j2 && ok_j4 && ok_n3 && ok_n5, "divergent and undefined cases", buf);
        alg_runs.push_back(std::move(a3));
    }

    {
        Run r = reference_run(5, SolverKind::DescentNewton);
        const auto& s = r.report;
        const bool conv = s.status == Status::Converged && dist(s, 0, 0) <= 1e-3 && s.final_residual <= 1e-4;
        const bool iters = s.iterations >= 5 && s.iterations <= 13;
        const bool steps = t_min(s) >= 0.5;
        std::snprintf(buf, sizeof buf, "%s %s |g|=%.3g it=%zu min t=%.6g%s", to_string(s.status), point(s).c_str(),
                      s.final_residual, s.iterations, t_min(s), steps ? "" : " (needs >= 0.5)");
        report(3, conv && iters && steps, "cubic example converges to the equilibrium", buf);
        alg_runs.push_back(std::move(r));
    }

    {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::size_t passed = 0;
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 50; ++i) {
            const std::size_t n1 = 1 + i % 5, n2 = 1 + (i / 5) % 5;
            const auto q = problems::random_quadratic_nep(n1, n2, 1000 + i);
            const NepProblem p = problems::make_quadratic(q);
            SolverConfig c;
            c.alpha = 1e-6;
            c.hessian_strategy = HessianStrategy::UserSupplied;
            c.user_surrogates = [q](std::size_t, const Vector&, const Vector&) {
                return std::pair<Matrix, Matrix>{q.a1, q.a2};
            };
            Vector x1(n1), x2(n2);
            for (auto& v : x1) v = u(rng);
            for (auto& v : x2) v = u(rng);
            SolveReport s = solve(p, x1, x2, c);
            if (s.trajectory.empty()) continue;
            const auto& rec = s.trajectory[0];
            const double after = evaluate_residual(p, rec.x1 + rec.t * rec.d1, rec.x2 + rec.t * rec.d2).norm;
            worst = std::max(worst, after);
            if (rec.t == 1.0 && rec.certificate->backtracks == 0 && after <= 1e-8) ++passed;
            alg_runs.push_back({p, std::move(s), c});
        }
        std::snprintf(buf, sizeof buf, "%zu/50 instances, worst post-step |g|=%.3g", passed, worst);
        report(4, passed == 50, "strictly convex quadratics solved in a single iteration", buf);
    }

    std::vector<Run> bench_runs;
    harness::BenchOptions bench;
    bench.runs = 100;
    bench.seed = 42;
    bench.common.config.grad_tol = 1e-6;
    const auto results = harness::facility_bench(bench);
    const NepProblem facility2d = problems::make_facility_2d();
    std::size_t eq_alg = 0, eq_newton = 0;
    for (const auto& b : results) {
        if (b.outcome == harness::Outcome::Equilibrium)
            ++(b.solver == SolverKind::DescentNewton ? eq_alg : eq_newton);
        if (b.solver == SolverKind::DescentNewton) bench_runs.push_back({facility2d, b.report, bench.common.config});
    }
    const NepProblem facility1d = problems::resolve("facility1d");
    const SolveReport f1d = solve(facility1d, v1(2), v1(1));
    bench_runs.push_back({facility1d, f1d, SolverConfig{}});

    {
        std::size_t checked = 0, bad = 0;
        for (const auto* set : {&alg_runs, &bench_runs}) {
            for (const Run& r : *set) {
                checked += r.report.trajectory.size();
                bad += diagnostics::recheck_line_search(r.problem, r.report, r.config).size();
            }
        }
        std::snprintf(buf, sizeof buf, "%zu accepted iterates, %zu failed inequalities", checked, bad);
        report(5, bad == 0, "line-search certificates re-verify", buf);
    }

    {
        std::size_t checked = 0, skipped = 0, bad = 0;
        for (const Run& r : alg_runs) {
            if (r.report.trajectory.empty()) continue;
            auto est = diagnostics::estimate_assumptions(
                r.problem, diagnostics::Box::cube(r.problem.n1(), r.problem.n2(), 5.0), 200, 7);
            diagnostics::observe_run(est, r.problem, r.report);
            const auto rep = diagnostics::verify_lemma_bounds(r.problem, r.report, est, r.config);
            checked += rep.checked;
            skipped += rep.skipped;
            bad += rep.violations.size();
        }
        std::snprintf(buf, sizeof buf, "%zu checks, %zu gated skips, %zu violations", checked, skipped, bad);
        report(6, bad == 0, "lemma certificates hold where their hypotheses do", buf);
    }

    {
        const bool ok2d = eq_alg >= 90 && eq_newton < eq_alg;
        const bool ok1d = std::hypot(f1d.final_x1(0) - 1.901, f1d.final_x2(0) - 0.915) <= 1e-2;
        std::snprintf(buf, sizeof buf, "2D equilibria: descent-newton %zu/100, newton %zu/100; 1D from (2,1): %s %s%s",
                      eq_alg, eq_newton, to_string(f1d.status), point(f1d).c_str(),
                      ok1d ? "" : " (expected (1.901, 0.915))");
        report(7, ok2d && ok1d, "facility location benchmark", buf);
    }

    {
        double worst = 0.0;
        std::string detail;
        std::vector<std::string> ids = problems::builtin_ids();
        ids.push_back("quadratic:11:3x2");
        for (const auto& id : ids) {
            const NepProblem p = problems::resolve(id);
            const double e = diagnostics::gradient_fd_error(p, diagnostics::Box::cube(p.n1(), p.n2(), 3.0), 50, 99);
            worst = std::max(worst, e);
            std::snprintf(buf, sizeof buf, "%s %.2g; ", id.c_str(), e);
            detail += buf;
        }
        report(8, worst <= 1e-5, "analytic gradients match central differences", detail);
    }

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
