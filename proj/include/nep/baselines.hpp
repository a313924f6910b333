#pragma once

#include <optional>
#include <utility>

#include "nep/descent_newton.hpp"

namespace nep::baselines {

enum class BaselineKind { NewtonKkt, ExactJacobi };

/// Full Newton step on the stacked stationarity system using the true
/// (possibly indefinite) per-player Hessians. nullopt when singular.
std::optional<std::pair<Vector, Vector>> newton_kkt_step(const NepProblem& problem, const Vector& x1,
                                                         const Vector& x2);

/// One simultaneous best-response (stationarity) update: x1 solves
/// grad1(., x2) = 0 and x2 solves grad2(x1, .) = 0, both by damped Newton
/// started from the current coordinate. Throws InnerSolveFailure.
std::pair<Vector, Vector> exact_jacobi_step(const NepProblem& problem, const Vector& x1,
                                            const Vector& x2, double inner_tol = 1e-10);

/// Iterates the unit-step Newton baseline. Uses grad_tol, max_iter,
/// divergence_radius and eps_psd from config.
SolveReport solve_newton_kkt(const NepProblem& problem, const Vector& x0_1, const Vector& x0_2,
                             const SolverConfig& config = {});

/// Iterates the exact Jacobi baseline with the same termination rules.
SolveReport solve_exact_jacobi(const NepProblem& problem, const Vector& x0_1, const Vector& x0_2,
                               const SolverConfig& config = {});

} // namespace nep::baselines
