#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nep/descent_newton.hpp"

namespace nep::diagnostics {

/// Axis-aligned box over the stacked point (x1, x2).
struct Box {
    Vector lower;
    Vector upper;

    /// [-r, r]^(n1+n2).
    static Box cube(std::size_t n1, std::size_t n2, double r);
};

struct AssumptionEstimates {
    double c_h = 0.0;         // max mixed-block spectral norm
    double l = 0.0;           // per-player gradient Lipschitz estimate
    double c_r = 0.0;         // second-order remainder constant
    double lambda_min = 0.0;  // surrogate eigenvalue extremes (from a run)
    double lambda_max = 0.0;
    double mu_min = 0.0;      // sqrt(2) / lambda_min
    double mu_max = 0.0;      // sqrt(lambda_max^2 + 4 lambda_max C_H + C_H^2)
    std::vector<double> c_k;  // mu_min (||g1|| + ||g2||) per iterate
    std::size_t samples = 0;
};

/// Samples C_H, L and C_R on the box. Sample i consumes the same random
/// draws whatever the total count, so more samples never lower an estimate.
AssumptionEstimates estimate_assumptions(const NepProblem& problem, const Box& box,
                                         std::size_t samples, std::uint64_t seed);

/// Fills lambda_min/max from the surrogates stored in the run, raises C_H to
/// cover the mixed blocks met along the run, and sets mu_min, mu_max, C_k.
void observe_run(AssumptionEstimates& est, const NepProblem& problem, const SolveReport& run);

struct LemmaViolation {
    std::size_t k = 0;
    std::string check;
    double margin = 0.0;  // amount by which the bound is exceeded
};

struct LemmaReport {
    std::vector<LemmaViolation> violations;
    std::size_t checked = 0;
    std::size_t skipped = 0;
};

/// Re-derives the lemma conclusions from raw trajectory data wherever the
/// accepted t meets the lemma's hypothesis. Needs observe_run first.
LemmaReport verify_lemma_bounds(const NepProblem& problem, const SolveReport& run,
                                const AssumptionEstimates& est, const SolverConfig& config);

struct StepsizeMonitor {
    double t_min_observed = 1.0;
    bool bounded_away = true;  // min over the last half equals min over all
    double sum_d1 = 0.0;
    double sum_d2 = 0.0;
};

StepsizeMonitor monitor_stepsizes(const SolveReport& run);

struct InequalityViolation {
    std::size_t k = 0;
    int which = 0;  // 0..5: Armijo, angle, ratio for player 1 then player 2
};

/// Re-evaluates the six acceptance inequalities at every accepted iterate.
std::vector<InequalityViolation> recheck_line_search(const NepProblem& problem,
                                                     const SolveReport& run,
                                                     const SolverConfig& config);

/// Largest relative gap between the analytic gradients and central
/// differences of f1, f2 over random points of the box. Points where an
/// evaluation is non-finite are redrawn.
double gradient_fd_error(const NepProblem& problem, const Box& box, std::size_t samples,
                         std::uint64_t seed);

} // namespace nep::diagnostics
