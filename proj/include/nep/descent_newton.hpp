#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nep/core.hpp"
#include "nep/linalg.hpp"

namespace nep {

enum class HessianStrategy { ModifiedExact, Identity, UserSupplied };

/// Supplies (H1, H2) for iteration k at the current point.
using SurrogateProvider =
    std::function<std::pair<Matrix, Matrix>(std::size_t k, const Vector& x1, const Vector& x2)>;

struct SolverConfig {
    double alpha = 1e-6;  // Armijo constant
    double theta = 0.01;  // angle constant
    double gamma = 1e-6;  // direction/gradient ratio constant
    double tau = 0.99;    // safeguard threshold on t
    double grad_tol = 1e-4;
    std::size_t max_iter = 1000;
    double t_min = 1e-18;
    double divergence_radius = 1e8;
    double eps_stationary = 1e-12;
    double chol_floor = 1e-8;
    double eps_psd = 1e-8;
    HessianStrategy hessian_strategy = HessianStrategy::ModifiedExact;
    SurrogateProvider user_surrogates;  // required for UserSupplied

    /// Throws std::invalid_argument when a parameter is out of range.
    void validate() const;
};

enum class Status {
    Converged,
    Diverged,
    MaxIterations,
    LineSearchFailure,
    SingularSystem,     // Newton-KKT baseline only
    InnerSolveFailure,  // exact Jacobi baseline only
};

const char* to_string(Status status);

struct Direction {
    Vector d1;
    Vector d2;
    double t_used_in_system = 1.0;
};

/// Truth values of the six acceptance inequalities, in order:
/// player 1 Armijo, angle, ratio; player 2 Armijo, angle, ratio.
struct LineSearchCertificate {
    double t = 1.0;
    std::array<bool, 6> checks{};
    std::size_t backtracks = 0;
    std::size_t singular_halvings = 0;

    bool all_hold() const;
};

struct IterateRecord {
    std::size_t k = 0;
    Vector x1;
    Vector x2;
    Vector g1;
    Vector g2;
    double t = 1.0;
    Vector d1;
    Vector d2;
    double f1 = 0.0;
    double f2 = 0.0;
    std::optional<LineSearchCertificate> certificate;  // empty for baseline solvers
    // Surrogates actually used (descent Newton only).
    Matrix h1;
    Matrix h2;
};

struct SolveReport {
    Status status = Status::MaxIterations;
    Vector final_x1;
    Vector final_x2;
    double final_residual = 0.0;
    std::size_t iterations = 0;
    std::vector<IterateRecord> trajectory;
    std::optional<PointClass> classification;
};

/// Mixed blocks after the stationarity safeguard: block i is kept when
/// ||g_i|| > eps_stationary or t > tau, otherwise replaced by zero.
std::pair<Matrix, Matrix> safeguard_mixed_blocks(double g1_norm, double g2_norm, double t,
                                                 const SolverConfig& config, const Matrix& mixed1,
                                                 const Matrix& mixed2);

/// Solves [[H1, t M1], [t M2, H2]] d = -g with the safeguarded mixed blocks of
/// the problem at (x1, x2). Returns nullopt when the system is singular.
std::optional<Direction> compute_direction(const NepProblem& problem, const Vector& x1,
                                           const Vector& x2, const Vector& g1, const Vector& g2,
                                           const linalg::SpdSurrogate& h1,
                                           const linalg::SpdSurrogate& h2, double t,
                                           const SolverConfig& config);

/// Evaluates the six line-search inequalities at the predicted points
/// (x1, x2 + t d2) and (x1 + t d1, x2). Throws NonFiniteEvaluation.
LineSearchCertificate check_inequalities(const NepProblem& problem, const Vector& x1,
                                         const Vector& x2, const Vector& g1, const Vector& g2,
                                         const Direction& d, double t, const SolverConfig& config);

/// Jacobi-type descent Newton method with prediction-based simultaneous backtracking.
SolveReport solve(const NepProblem& problem, const Vector& x0_1, const Vector& x0_2,
                  const SolverConfig& config = {});

} // namespace nep
