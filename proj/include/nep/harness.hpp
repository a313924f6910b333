#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nep/descent_newton.hpp"
#include "nep/diagnostics.hpp"

namespace nep::harness {

enum class SolverKind { DescentNewton, NewtonKkt, ExactJacobi };

const char* to_string(SolverKind kind);
/// "descent-newton", "newton-kkt", "exact-jacobi". Throws std::invalid_argument.
SolverKind parse_solver(const std::string& name);

SolveReport run_solver(SolverKind kind, const NepProblem& problem, const Vector& x1,
                       const Vector& x2, const SolverConfig& config);

/// Process exit code for a terminal status.
int exit_code(Status status);

constexpr int kExitUsage = 64;
constexpr int kExitUnknownProblem = 65;

/// Start used by the illustrative examples.
std::pair<Vector, Vector> default_start(const NepProblem& problem);

/// One CSV line. The last row of a trajectory is the final point and has no
/// step or backtrack count.
struct TrajectoryRow {
    std::size_t k = 0;
    Vector x;  // stacked (x1, x2)
    double g1_norm = 0.0;
    double g2_norm = 0.0;
    std::optional<double> t;
    std::optional<std::size_t> backtracks;
    double f1 = 0.0;
    double f2 = 0.0;
};

std::vector<TrajectoryRow> trajectory_rows(const NepProblem& problem, const SolveReport& run);

/// Header line, then one row per record, 17 significant digits. A non-empty
/// comment becomes a leading "# ..." line.
std::string write_trajectory_csv(const std::vector<TrajectoryRow>& rows, std::size_t n1,
                                 std::size_t n2, const std::string& comment = "");

/// Inverse of write_trajectory_csv. Throws std::runtime_error on malformed input.
std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text);

nlohmann::json report_json(const NepProblem& problem, SolverKind solver, const SolveReport& run);

/// Final-point buckets used by the facility benchmark.
enum class Outcome { Equilibrium, NonEquilibriumStationary, Failed };
const char* to_string(Outcome outcome);
/// Converged runs that end beyond escape_radius count as Failed: the
/// gradients of the facility objectives vanish at infinity.
Outcome classify_outcome(const SolveReport& run, double escape_radius);

struct CommonOptions {
    SolverConfig config;
    std::string out_dir;  // empty: NEP_OUT_DIR, then "."
    std::string timestamp;  // header comment; empty for none
};

struct SolveOptions {
    CommonOptions common;
    std::string problem;
    SolverKind solver = SolverKind::DescentNewton;
    std::string x0 = "default";  // comma list or "default"
};

struct BenchOptions {
    CommonOptions common;
    std::size_t runs = 100;
    std::uint64_t seed = 42;
    std::vector<SolverKind> solvers{SolverKind::DescentNewton, SolverKind::NewtonKkt};
    double box = 2.0;
    double escape_radius = 10.0;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct DiagnoseOptions {
    SolveOptions solve;
    double box = 5.0;
    std::size_t samples = 200;
    std::uint64_t seed = 42;
};

/// Parses "a,b,c" or "default" into (x1, x2). Throws std::invalid_argument.
std::pair<Vector, Vector> parse_start(const std::string& text, const NepProblem& problem);

std::string resolve_out_dir(const std::string& flag);

// Commands print a human summary to `out` and return the exit code.
int cmd_solve(const SolveOptions& opt, std::ostream& out);
int cmd_table1(const CommonOptions& opt, std::ostream& out);
int cmd_facility_bench(const BenchOptions& opt, std::ostream& out);
int cmd_diagnose(const DiagnoseOptions& opt, std::ostream& out);

struct BenchRun {
    std::size_t run = 0;
    SolverKind solver = SolverKind::DescentNewton;
    Vector x0;
    SolveReport report;
    Outcome outcome = Outcome::Failed;
};

/// The benchmark body: starts drawn in seed order, runs possibly parallel,
/// results ordered by (solver, run).
std::vector<BenchRun> facility_bench(const BenchOptions& opt);

struct DiagnoseResult {
    SolveReport run;
    diagnostics::AssumptionEstimates estimates;
    diagnostics::LemmaReport lemmas;
    std::optional<diagnostics::StepsizeMonitor> steps;
    std::vector<diagnostics::InequalityViolation> line_search;
};

DiagnoseResult diagnose(const NepProblem& problem, SolverKind solver, const Vector& x1,
                        const Vector& x2, const SolverConfig& config, double box,
                        std::size_t samples, std::uint64_t seed);

nlohmann::json diagnose_json(const DiagnoseResult& result);

} // namespace nep::harness
