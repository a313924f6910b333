#include "nep/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nep/baselines.hpp"
#include "nep/problems.hpp"

namespace nep::harness {
namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string point_text(const Vector& x1, const Vector& x2) {
    std::string s = "(";
    const Vector x = stack(x1, x2);
    for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? ", " : "") + fmt_short(x(i));
    return s + ")";
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::runtime_error("malformed number '" + s + "'");
    return v;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

std::string file_stem(const std::string& id) {
    std::string s = id;
    std::replace_if(s.begin(), s.end(), [](char c) { return c == ':' || c == '/' || c == '\\'; }, '_');
    return s;
}

std::string header_comment(const CommonOptions& opt) {
    return opt.timestamp.empty() ? std::string() : "generated " + opt.timestamp;
}

double t_min_of(const SolveReport& run) {
    double t = 1.0;
    for (const auto& rec : run.trajectory) t = std::min(t, rec.t);
    return t;
}

} // namespace

const char* to_string(SolverKind kind) {
    switch (kind) {
    case SolverKind::DescentNewton: return "descent-newton";
    case SolverKind::NewtonKkt: return "newton-kkt";
    case SolverKind::ExactJacobi: return "exact-jacobi";
    }
    return "unknown";
}

SolverKind parse_solver(const std::string& name) {
    for (auto k : {SolverKind::DescentNewton, SolverKind::NewtonKkt, SolverKind::ExactJacobi})
        if (name == to_string(k)) return k;
    throw std::invalid_argument("unknown solver '" + name + "'");
}

SolveReport run_solver(SolverKind kind, const NepProblem& problem, const Vector& x1,
                       const Vector& x2, const SolverConfig& config) {
    switch (kind) {
    case SolverKind::DescentNewton: return solve(problem, x1, x2, config);
    case SolverKind::NewtonKkt: return baselines::solve_newton_kkt(problem, x1, x2, config);
    case SolverKind::ExactJacobi: return baselines::solve_exact_jacobi(problem, x1, x2, config);
    }
    throw std::logic_error("unhandled solver kind");
}

int exit_code(Status status) {
    switch (status) {
    case Status::Converged: return 0;
    case Status::Diverged: return 2;
    case Status::MaxIterations: return 3;
    case Status::LineSearchFailure: return 4;
    case Status::SingularSystem:
    case Status::InnerSolveFailure: return 5;
    }
    return 1;
}

std::pair<Vector, Vector> default_start(const NepProblem& problem) {
    const std::string& id = problem.name();
    if (id.rfind("examp", 0) == 0) return {Vector::Constant(1, -5.0), Vector::Constant(1, 1.0)};
    if (id == "facility1d") return {Vector::Constant(1, 2.0), Vector::Constant(1, 1.0)};
    if (id == "nodescent") return {Vector::Zero(1), Vector::Zero(1)};
    throw std::invalid_argument("problem '" + id + "' has no published start; pass --x0");
}

std::pair<Vector, Vector> parse_start(const std::string& text, const NepProblem& problem) {
    if (text == "default") return default_start(problem);
    std::vector<double> vals;
    try {
        for (const auto& s : split(text, ',')) vals.push_back(parse_double(s));
    } catch (const std::exception&) {
        throw std::invalid_argument("--x0 expects comma-separated numbers or 'default'");
    }
    const std::size_t n1 = problem.n1(), n2 = problem.n2();
    if (vals.size() != n1 + n2)
        throw std::invalid_argument("--x0 needs " + std::to_string(n1 + n2) + " components");
    const Eigen::Map<const Vector> all(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return {all.head(static_cast<Eigen::Index>(n1)), all.tail(static_cast<Eigen::Index>(n2))};
}

std::string resolve_out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("NEP_OUT_DIR"); env && *env) return env;
    return ".";
}

std::vector<TrajectoryRow> trajectory_rows(const NepProblem& problem, const SolveReport& run) {
    std::vector<TrajectoryRow> rows;
    for (const auto& rec : run.trajectory) {
        TrajectoryRow r;
        r.k = rec.k;
        r.x = stack(rec.x1, rec.x2);
        r.g1_norm = rec.g1.norm();
        r.g2_norm = rec.g2.norm();
        r.t = rec.t;
        r.backtracks = rec.certificate ? rec.certificate->backtracks : 0;
        r.f1 = rec.f1;
        r.f2 = rec.f2;
        rows.push_back(std::move(r));
    }
    TrajectoryRow last;
    last.k = run.trajectory.size();
    last.x = stack(run.final_x1, run.final_x2);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        const Residual res = evaluate_residual(problem, run.final_x1, run.final_x2);
        last.g1_norm = res.g1.norm();
        last.g2_norm = res.g2.norm();
    } catch (const NonFiniteEvaluation&) {
        last.g1_norm = last.g2_norm = nan;
    }
    try {
        last.f1 = problem.f1(run.final_x1, run.final_x2);
    } catch (const NonFiniteEvaluation&) {
        last.f1 = nan;
    }
    try {
        last.f2 = problem.f2(run.final_x1, run.final_x2);
    } catch (const NonFiniteEvaluation&) {
        last.f2 = nan;
    }
    rows.push_back(std::move(last));
    return rows;
}

std::string write_trajectory_csv(const std::vector<TrajectoryRow>& rows, std::size_t n1,
                                 std::size_t n2, const std::string& comment) {
    std::string out;
    if (!comment.empty()) out += "# " + comment + "\n";
    out += "k";
    for (std::size_t i = 0; i < n1; ++i) out += ",x1_" + std::to_string(i);
    for (std::size_t i = 0; i < n2; ++i) out += ",x2_" + std::to_string(i);
    out += ",g1_norm,g2_norm,t,backtracks,f1,f2\n";
    for (const auto& r : rows) {
        if (r.x.size() != static_cast<Eigen::Index>(n1 + n2))
            throw DimensionMismatch("trajectory row has the wrong dimension");
        out += std::to_string(r.k);
        for (Eigen::Index i = 0; i < r.x.size(); ++i) out += "," + fmt17(r.x(i));
        out += "," + fmt17(r.g1_norm) + "," + fmt17(r.g2_norm) + ",";
        if (r.t) out += fmt17(*r.t);
        out += ",";
        if (r.backtracks) out += std::to_string(*r.backtracks);
        out += "," + fmt17(r.f1) + "," + fmt17(r.f2) + "\n";
    }
    return out;
}

std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    std::vector<TrajectoryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (header.empty()) {
            header = cells;
            if (header.size() < 7 || header.front() != "k" || header.back() != "f2")
                throw std::runtime_error("unexpected trajectory header");
            continue;
        }
        if (cells.size() != header.size()) throw std::runtime_error("ragged trajectory row");
        const std::size_t dim = header.size() - 7;
        TrajectoryRow r;
        r.k = static_cast<std::size_t>(std::stoull(cells[0]));
        r.x.resize(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) r.x(static_cast<Eigen::Index>(i)) = parse_double(cells[1 + i]);
        r.g1_norm = parse_double(cells[1 + dim]);
        r.g2_norm = parse_double(cells[2 + dim]);
        if (!cells[3 + dim].empty()) r.t = parse_double(cells[3 + dim]);
        if (!cells[4 + dim].empty()) r.backtracks = static_cast<std::size_t>(std::stoull(cells[4 + dim]));
        r.f1 = parse_double(cells[5 + dim]);
        r.f2 = parse_double(cells[6 + dim]);
        rows.push_back(std::move(r));
    }
    if (header.empty()) throw std::runtime_error("trajectory CSV has no header");
    return rows;
}

nlohmann::json report_json(const NepProblem& problem, SolverKind solver, const SolveReport& run) {
    nlohmann::json j;
    j["problem"] = problem.name();
    j["solver"] = to_string(solver);
    j["status"] = to_string(run.status);
    j["iterations"] = run.iterations;
    j["final_x1"] = to_std(run.final_x1);
    j["final_x2"] = to_std(run.final_x2);
    j["final_residual"] = run.final_residual;
    std::size_t backtracks = 0;
    for (const auto& rec : run.trajectory)
        if (rec.certificate) backtracks += rec.certificate->backtracks;
    j["total_backtracks"] = backtracks;
    j["t_min"] = t_min_of(run);
    if (run.classification) {
        j["classification"] = {{"kind", to_string(run.classification->kind)},
                               {"min_eig_1", run.classification->min_eig_1},
                               {"min_eig_2", run.classification->min_eig_2}};
    } else {
        j["classification"] = nullptr;
    }
    return j;
}

const char* to_string(Outcome outcome) {
    switch (outcome) {
    case Outcome::Equilibrium: return "equilibrium";
    case Outcome::NonEquilibriumStationary: return "non-equilibrium-stationary";
    case Outcome::Failed: return "diverged-or-max-iter";
    }
    return "unknown";
}

Outcome classify_outcome(const SolveReport& run, double escape_radius) {
    if (run.status != Status::Converged || !run.classification) return Outcome::Failed;
    if (std::max(inf_norm(run.final_x1), inf_norm(run.final_x2)) > escape_radius) return Outcome::Failed;
    switch (run.classification->kind) {
    case PointKind::EquilibriumCandidate: return Outcome::Equilibrium;
    case PointKind::NonEquilibriumStationary: return Outcome::NonEquilibriumStationary;
    case PointKind::NonStationary: return Outcome::Failed;
    }
    return Outcome::Failed;
}

int cmd_solve(const SolveOptions& opt, std::ostream& out) {
    const NepProblem problem = problems::resolve(opt.problem);
    const auto [x1, x2] = parse_start(opt.x0, problem);
    const SolveReport run = run_solver(opt.solver, problem, x1, x2, opt.common.config);

    const std::filesystem::path dir = resolve_out_dir(opt.common.out_dir);
    std::filesystem::create_directories(dir);
    const std::string stem = file_stem(opt.problem) + "_" + to_string(opt.solver);
    write_file(dir / (stem + ".json"), report_json(problem, opt.solver, run).dump(2) + "\n");
    write_file(dir / (stem + ".csv"), write_trajectory_csv(trajectory_rows(problem, run), problem.n1(),
                                                           problem.n2(), header_comment(opt.common)));

    out << opt.problem << " " << to_string(opt.solver) << ": " << to_string(run.status) << " at "
        << point_text(run.final_x1, run.final_x2) << ", |g| = " << fmt_short(run.final_residual)
        << ", " << run.iterations << " iterations\n";
    return exit_code(run.status);
}

int cmd_table1(const CommonOptions& opt, std::ostream& out) {
    const std::filesystem::path dir = resolve_out_dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    std::string csv;
    if (const auto c = header_comment(opt); !c.empty()) csv += "# " + c + "\n";
    csv += "problem,solver,status,x1,x2,residual,iterations,t_min\n";

    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-15s %-20s %-28s %-12s %s\n", "problem", "solver", "status",
                  "point", "|g|", "iter");
    out << line;
    for (int id = 1; id <= 5; ++id) {
        const NepProblem problem = problems::make_example(id);
        const auto [x1, x2] = default_start(problem);
        for (auto kind : {SolverKind::DescentNewton, SolverKind::NewtonKkt, SolverKind::ExactJacobi}) {
            const SolveReport run = run_solver(kind, problem, x1, x2, opt.config);
            std::string point = point_text(run.final_x1, run.final_x2);
            if (run.status == Status::Diverged) point = "(inf, inf)";
            if (run.status == Status::InnerSolveFailure || run.status == Status::SingularSystem) point = "-";
            std::snprintf(line, sizeof line, "%-8s %-15s %-20s %-28s %-12s %zu\n", problem.name().c_str(),
                          to_string(kind), to_string(run.status), point.c_str(),
                          fmt_short(run.final_residual).c_str(), run.iterations);
            out << line;
            csv += problem.name() + "," + to_string(kind) + "," + to_string(run.status) + "," +
                   fmt17(run.final_x1(0)) + "," + fmt17(run.final_x2(0)) + "," + fmt17(run.final_residual) +
                   "," + std::to_string(run.iterations) + "," + fmt17(t_min_of(run)) + "\n";
        }
    }
    write_file(dir / "table1.csv", csv);
    return 0;
}

std::vector<BenchRun> facility_bench(const BenchOptions& opt) {
    if (opt.runs == 0) throw std::invalid_argument("runs must be at least 1");
    const NepProblem problem = problems::make_facility_2d();
    const auto dim = static_cast<Eigen::Index>(problem.n1() + problem.n2());

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(-opt.box, opt.box);
    std::vector<Vector> starts(opt.runs);
    for (auto& s : starts) {
        s.resize(dim);
        for (Eigen::Index i = 0; i < dim; ++i) s(i) = u(rng);
    }

    std::vector<BenchRun> results;
    for (auto kind : opt.solvers)
        for (std::size_t r = 0; r < opt.runs; ++r) results.push_back({r, kind, starts[r], {}, Outcome::Failed});

    const auto n1 = static_cast<Eigen::Index>(problem.n1());
    const auto n2 = static_cast<Eigen::Index>(problem.n2());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < results.size(); i = next++) {
            BenchRun& b = results[i];
            b.report = run_solver(b.solver, problem, b.x0.head(n1), b.x0.tail(n2), opt.common.config);
            b.outcome = classify_outcome(b.report, opt.escape_radius);
        }
    };
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, results.size()));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return results;
}

int cmd_facility_bench(const BenchOptions& opt, std::ostream& out) {
    const auto results = facility_bench(opt);
    const std::filesystem::path dir = resolve_out_dir(opt.common.out_dir);
    std::filesystem::create_directories(dir);

    const std::string comment = header_comment(opt.common);
    std::string runs_csv = comment.empty() ? "" : "# " + comment + "\n";
    const Eigen::Index dim = results.front().x0.size();
    runs_csv += "solver,run";
    for (Eigen::Index i = 0; i < dim; ++i) runs_csv += ",x0_" + std::to_string(i);
    runs_csv += ",status,outcome,iterations";
    for (Eigen::Index i = 0; i < dim; ++i) runs_csv += ",final_" + std::to_string(i);
    runs_csv += ",residual\n";
    for (const auto& b : results) {
        runs_csv += std::string(to_string(b.solver)) + "," + std::to_string(b.run);
        for (Eigen::Index i = 0; i < b.x0.size(); ++i) runs_csv += "," + fmt17(b.x0(i));
        runs_csv += std::string(",") + to_string(b.report.status) + "," + to_string(b.outcome) + "," +
                    std::to_string(b.report.iterations);
        const Vector fin = stack(b.report.final_x1, b.report.final_x2);
        for (Eigen::Index i = 0; i < fin.size(); ++i) runs_csv += "," + fmt17(fin(i));
        runs_csv += "," + fmt17(b.report.final_residual) + "\n";
    }
    write_file(dir / "facility_bench_runs.csv", runs_csv);

    std::string hist = comment.empty() ? "" : "# " + comment + "\n";
    hist += "solver,equilibrium,non_equilibrium_stationary,diverged_or_max_iter,mean_iterations_converged\n";
    for (auto kind : opt.solvers) {
        std::size_t counts[3] = {0, 0, 0};
        std::size_t conv = 0, iters = 0;
        for (const auto& b : results) {
            if (b.solver != kind) continue;
            ++counts[static_cast<int>(b.outcome)];
            if (b.outcome != Outcome::Failed) {
                ++conv;
                iters += b.report.iterations;
            }
        }
        const double mean = conv ? static_cast<double>(iters) / static_cast<double>(conv) : 0.0;
        hist += std::string(to_string(kind)) + "," + std::to_string(counts[0]) + "," + std::to_string(counts[1]) +
                "," + std::to_string(counts[2]) + "," + fmt17(mean) + "\n";
        out << to_string(kind) << ": equilibrium " << counts[0] << ", non-equilibrium stationary " << counts[1]
            << ", diverged/max-iter " << counts[2] << ", mean iterations " << fmt_short(mean) << "\n";
    }
    write_file(dir / "facility_bench.csv", hist);
    return 0;
}

DiagnoseResult diagnose(const NepProblem& problem, SolverKind solver, const Vector& x1,
                        const Vector& x2, const SolverConfig& config, double box,
                        std::size_t samples, std::uint64_t seed) {
    DiagnoseResult r;
    r.run = run_solver(solver, problem, x1, x2, config);
    r.estimates = diagnostics::estimate_assumptions(
        problem, diagnostics::Box::cube(problem.n1(), problem.n2(), box), samples, seed);
    if (!r.run.trajectory.empty()) {
        diagnostics::observe_run(r.estimates, problem, r.run);
        r.lemmas = diagnostics::verify_lemma_bounds(problem, r.run, r.estimates, config);
        r.steps = diagnostics::monitor_stepsizes(r.run);
        r.line_search = diagnostics::recheck_line_search(problem, r.run, config);
    }
    return r;
}

nlohmann::json diagnose_json(const DiagnoseResult& r) {
    const auto& e = r.estimates;
    nlohmann::json j;
    j["status"] = to_string(r.run.status);
    j["iterations"] = r.run.iterations;
    j["one_iteration_convergence"] = r.run.status == Status::Converged && r.run.iterations == 1;
    j["estimates"] = {{"C_H", e.c_h},          {"L", e.l},           {"C_R", e.c_r},
                      {"lambda_min", e.lambda_min}, {"lambda_max", e.lambda_max},
                      {"mu_min", e.mu_min},    {"mu_max", e.mu_max}, {"C_k", e.c_k},
                      {"samples", e.samples},
                      {"note", "C_H, L and C_R are sampled on a box; certificates hold relative to that region"}};
    nlohmann::json viol = nlohmann::json::array();
    for (const auto& v : r.lemmas.violations) viol.push_back({{"k", v.k}, {"check", v.check}, {"margin", v.margin}});
    j["lemma_checks"] = {{"checked", r.lemmas.checked}, {"skipped", r.lemmas.skipped}, {"violations", viol}};
    if (r.steps) {
        j["stepsizes"] = {{"t_min_observed", r.steps->t_min_observed},
                          {"bounded_away", r.steps->bounded_away},
                          {"sum_d1", r.steps->sum_d1},
                          {"sum_d2", r.steps->sum_d2}};
    } else {
        j["stepsizes"] = nullptr;
    }
    nlohmann::json ls = nlohmann::json::array();
    for (const auto& v : r.line_search) ls.push_back({{"k", v.k}, {"inequality", v.which}});
    j["line_search_violations"] = ls;
    return j;
}

int cmd_diagnose(const DiagnoseOptions& opt, std::ostream& out) {
    const NepProblem problem = problems::resolve(opt.solve.problem);
    const auto [x1, x2] = parse_start(opt.solve.x0, problem);
    const DiagnoseResult r =
        diagnose(problem, opt.solve.solver, x1, x2, opt.solve.common.config, opt.box, opt.samples, opt.seed);

    nlohmann::json j = diagnose_json(r);
    j["problem"] = problem.name();
    j["solver"] = to_string(opt.solve.solver);
    const std::filesystem::path dir = resolve_out_dir(opt.solve.common.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / (file_stem(opt.solve.problem) + "_" + to_string(opt.solve.solver) + "_diagnose.json"),
               j.dump(2) + "\n");

    out << problem.name() << ": " << to_string(r.run.status) << ", " << r.lemmas.checked << " lemma checks, "
        << r.lemmas.violations.size() << " violations, " << r.line_search.size()
        << " line-search violations";
    if (r.steps)
        out << ", t_min " << fmt_short(r.steps->t_min_observed) << ", sum |d2| " << fmt_short(r.steps->sum_d2);
    out << "\n";
    return exit_code(r.run.status);
}

} // namespace nep::harness
