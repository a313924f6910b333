#include "nep/baselines.hpp"

#include <cmath>
#include <limits>

#include "nep/linalg.hpp"

namespace nep::baselines {
namespace {

constexpr int kInnerMaxIter = 100;
constexpr int kInnerMaxHalvings = 40;
constexpr double kInnerArmijo = 1e-4;

/// Damped Newton root find of grad(y) = 0, with Armijo on 1/2 ||grad||^2.
Vector stationary_point(const std::function<Vector(const Vector&)>& grad,
                        const std::function<Matrix(const Vector&)>& hess, Vector y, double tol) {
    Vector g = grad(y);
    for (int it = 0; it < kInnerMaxIter; ++it) {
        if (g.norm() <= tol) return y;
        const auto step = linalg::lu_solve(hess(y), -g);
        if (!step) throw InnerSolveFailure("per-player Hessian is singular");
        if (step->norm() <= 1e-14 * std::max(1.0, inf_norm(y))) return y;

        const double merit = 0.5 * g.squaredNorm();
        double a = 1.0;
        bool accepted = false;
        for (int h = 0; h < kInnerMaxHalvings; ++h) {
            const Vector trial = y + a * *step;
            const Vector gt = grad(trial);
            // d/da merit = -2 merit along a Newton step.
            if (0.5 * gt.squaredNorm() <= (1.0 - 2.0 * kInnerArmijo * a) * merit) {
                y = trial;
                g = gt;
                accepted = true;
                break;
            }
            a *= 0.5;
        }
        if (!accepted) throw InnerSolveFailure("inner line search stalled");
    }
    if (g.norm() <= tol) return y;
    throw InnerSolveFailure("inner Newton did not converge");
}

bool outside(const Vector& x1, const Vector& x2, double radius) {
    if (!all_finite(x1) || !all_finite(x2)) return true;
    return std::max(inf_norm(x1), inf_norm(x2)) > radius;
}

using StepFn = std::function<std::optional<std::pair<Vector, Vector>>(const Vector&, const Vector&)>;

/// Shared loop: unit steps x <- step(x), with the descent-Newton termination rules.
SolveReport iterate(const NepProblem& problem, const Vector& x0_1, const Vector& x0_2,
                    const SolverConfig& config, const StepFn& step, Status failure_status) {
    config.validate();
    problem.check_dims(x0_1, x0_2);

    SolveReport report;
    report.final_residual = std::numeric_limits<double>::infinity();
    Vector x1 = x0_1;
    Vector x2 = x0_2;

    auto finish = [&](Status status) {
        report.status = status;
        report.final_x1 = x1;
        report.final_x2 = x2;
        report.iterations = report.trajectory.size();
        if (status != Status::Diverged) {
            try {
                report.classification = classify_point(problem, x1, x2, config.grad_tol, config.eps_psd);
            } catch (const NepError&) {
            }
        }
        return report;
    };

    for (std::size_t k = 0;; ++k) {
        if (outside(x1, x2, config.divergence_radius)) return finish(Status::Diverged);
        Residual res;
        IterateRecord rec;
        try {
            res = evaluate_residual(problem, x1, x2);
            rec.f1 = problem.f1(x1, x2);
            rec.f2 = problem.f2(x1, x2);
        } catch (const NonFiniteEvaluation&) {
            return finish(Status::Diverged);
        }
        report.final_residual = res.norm;
        if (res.norm <= config.grad_tol) return finish(Status::Converged);
        if (k >= config.max_iter) return finish(Status::MaxIterations);

        std::optional<std::pair<Vector, Vector>> next;
        try {
            next = step(x1, x2);
        } catch (const NonFiniteEvaluation&) {
            return finish(Status::Diverged);
        } catch (const InnerSolveFailure&) {
            return finish(Status::InnerSolveFailure);
        }
        if (!next) return finish(failure_status);

        rec.k = k;
        rec.x1 = x1;
        rec.x2 = x2;
        rec.g1 = res.g1;
        rec.g2 = res.g2;
        rec.t = 1.0;
        rec.d1 = next->first - x1;
        rec.d2 = next->second - x2;
        report.trajectory.push_back(std::move(rec));
        x1 = std::move(next->first);
        x2 = std::move(next->second);
    }
}

} // namespace

std::optional<std::pair<Vector, Vector>> newton_kkt_step(const NepProblem& problem, const Vector& x1,
                                                         const Vector& x2) {
    const Residual res = evaluate_residual(problem, x1, x2);
    const Matrix system = linalg::assemble_block_system(problem.hess11(x1, x2), problem.hess22(x1, x2),
                                                        problem.hess12_f1(x1, x2),
                                                        problem.hess21_f2(x1, x2), 1.0);
    const auto d = linalg::lu_solve(system, -stack(res.g1, res.g2));
    if (!d) return std::nullopt;
    return std::pair<Vector, Vector>{d->head(x1.size()), d->tail(x2.size())};
}

std::pair<Vector, Vector> exact_jacobi_step(const NepProblem& problem, const Vector& x1,
                                            const Vector& x2, double inner_tol) {
    if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
    Vector next1 = stationary_point([&](const Vector& y) { return problem.grad1(y, x2); },
                                    [&](const Vector& y) { return problem.hess11(y, x2); }, x1, inner_tol);
    Vector next2 = stationary_point([&](const Vector& y) { return problem.grad2(x1, y); },
                                    [&](const Vector& y) { return problem.hess22(x1, y); }, x2, inner_tol);
    return {std::move(next1), std::move(next2)};
}

SolveReport solve_newton_kkt(const NepProblem& problem, const Vector& x0_1, const Vector& x0_2,
                             const SolverConfig& config) {
    return iterate(
        problem, x0_1, x0_2, config,
        [&](const Vector& x1, const Vector& x2) -> std::optional<std::pair<Vector, Vector>> {
            auto d = newton_kkt_step(problem, x1, x2);
            if (!d) return std::nullopt;
            return std::pair<Vector, Vector>{x1 + d->first, x2 + d->second};
        },
        Status::SingularSystem);
}

SolveReport solve_exact_jacobi(const NepProblem& problem, const Vector& x0_1, const Vector& x0_2,
                               const SolverConfig& config) {
    return iterate(
        problem, x0_1, x0_2, config,
        [&](const Vector& x1, const Vector& x2) -> std::optional<std::pair<Vector, Vector>> {
            return exact_jacobi_step(problem, x1, x2);
        },
        Status::InnerSolveFailure);
}

} // namespace nep::baselines
