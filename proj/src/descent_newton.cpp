#include "nep/descent_newton.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nep {
namespace {

bool diverged(const Vector& x1, const Vector& x2, double radius) {
    if (!all_finite(x1) || !all_finite(x2)) return true;
    return std::max(inf_norm(x1), inf_norm(x2)) > radius;
}

std::pair<linalg::SpdSurrogate, linalg::SpdSurrogate> build_surrogates(const NepProblem& problem,
                                                                       std::size_t k,
                                                                       const Vector& x1,
                                                                       const Vector& x2,
                                                                       const SolverConfig& config) {
    switch (config.hessian_strategy) {
    case HessianStrategy::ModifiedExact:
        return {linalg::modified_cholesky(problem.hess11(x1, x2), config.chol_floor),
                linalg::modified_cholesky(problem.hess22(x1, x2), config.chol_floor)};
    case HessianStrategy::Identity:
        return {linalg::as_surrogate(Matrix::Identity(problem.n1(), problem.n1())),
                linalg::as_surrogate(Matrix::Identity(problem.n2(), problem.n2()))};
    case HessianStrategy::UserSupplied: {
        auto [h1, h2] = config.user_surrogates(k, x1, x2);
        if (h1.rows() != static_cast<Eigen::Index>(problem.n1()) ||
            h2.rows() != static_cast<Eigen::Index>(problem.n2()))
            throw DimensionMismatch("user-supplied surrogate has the wrong dimension");
        return {linalg::as_surrogate(h1), linalg::as_surrogate(h2)};
    }
    }
    throw std::logic_error("unhandled hessian strategy");
}

} // namespace

void SolverConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0,1]");
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(grad_tol > 0.0) || !(t_min > 0.0) || !(divergence_radius > 0.0) || !(chol_floor > 0.0))
        throw std::invalid_argument("tolerances must be positive");
    if (!(eps_stationary >= 0.0) || !(eps_psd >= 0.0))
        throw std::invalid_argument("stationarity thresholds must be nonnegative");
    if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");
    if (hessian_strategy == HessianStrategy::UserSupplied && !user_surrogates)
        throw std::invalid_argument("UserSupplied strategy needs a surrogate provider");
}

const char* to_string(Status status) {
    switch (status) {
    case Status::Converged: return "converged";
    case Status::Diverged: return "diverged";
    case Status::MaxIterations: return "max-iterations";
    case Status::LineSearchFailure: return "line-search-failure";
    case Status::SingularSystem: return "singular-system";
    case Status::InnerSolveFailure: return "inner-solve-failure";
    }
    return "unknown";
}

bool LineSearchCertificate::all_hold() const {
    for (bool c : checks)
        if (!c) return false;
    return true;
}

std::pair<Matrix, Matrix> safeguard_mixed_blocks(double g1_norm, double g2_norm, double t,
                                                 const SolverConfig& config, const Matrix& mixed1,
                                                 const Matrix& mixed2) {
    const bool keep1 = g1_norm > config.eps_stationary || t > config.tau;
    const bool keep2 = g2_norm > config.eps_stationary || t > config.tau;
    Matrix m1 = keep1 ? mixed1 : Matrix(Matrix::Zero(mixed1.rows(), mixed1.cols()));
    Matrix m2 = keep2 ? mixed2 : Matrix(Matrix::Zero(mixed2.rows(), mixed2.cols()));
    return {std::move(m1), std::move(m2)};
}

std::optional<Direction> compute_direction(const NepProblem& problem, const Vector& x1,
                                           const Vector& x2, const Vector& g1, const Vector& g2,
                                           const linalg::SpdSurrogate& h1,
                                           const linalg::SpdSurrogate& h2, double t,
                                           const SolverConfig& config) {
    const auto [m1, m2] = safeguard_mixed_blocks(g1.norm(), g2.norm(), t, config,
                                                 problem.hess12_f1(x1, x2),
                                                 problem.hess21_f2(x1, x2));
    const Matrix system = linalg::assemble_block_system(h1.matrix, h2.matrix, m1, m2, t);
    const auto d = linalg::lu_solve(system, -stack(g1, g2));
    if (!d) return std::nullopt;
    const auto n1 = static_cast<Eigen::Index>(problem.n1());
    const auto n2 = static_cast<Eigen::Index>(problem.n2());
    return Direction{d->head(n1), d->tail(n2), t};
}

LineSearchCertificate check_inequalities(const NepProblem& problem, const Vector& x1,
                                         const Vector& x2, const Vector& g1, const Vector& g2,
                                         const Direction& d, double t, const SolverConfig& config) {
    const Vector x1_new = x1 + t * d.d1;
    const Vector x2_new = x2 + t * d.d2;

    LineSearchCertificate cert;
    cert.t = t;

    // Player 1 against the predicted decision of player 2.
    const double f1_new = problem.f1(x1_new, x2_new);
    const double f1_pred = problem.f1(x1, x2_new);
    const Vector p1 = problem.grad1(x1, x2_new);
    const double slope1 = p1.dot(d.d1);
    cert.checks[0] = f1_new <= f1_pred + config.alpha * t * slope1;
    cert.checks[1] = slope1 <= -config.theta * p1.norm() * d.d1.norm();
    cert.checks[2] = config.gamma * p1.norm() * g1.norm() <= d.d1.norm() * g1.norm();

    // Player 2 against the predicted decision of player 1.
    const double f2_new = problem.f2(x1_new, x2_new);
    const double f2_pred = problem.f2(x1_new, x2);
    const Vector p2 = problem.grad2(x1_new, x2);
    const double slope2 = p2.dot(d.d2);
    cert.checks[3] = f2_new <= f2_pred + config.alpha * t * slope2;
    cert.checks[4] = slope2 <= -config.theta * p2.norm() * d.d2.norm();
    cert.checks[5] = config.gamma * p2.norm() * g2.norm() <= d.d2.norm() * g2.norm();
    return cert;
}

SolveReport solve(const NepProblem& problem, const Vector& x0_1, const Vector& x0_2,
                  const SolverConfig& config) {
    config.validate();
    problem.check_dims(x0_1, x0_2);

    SolveReport report;
    Vector x1 = x0_1;
    Vector x2 = x0_2;
    report.final_residual = std::numeric_limits<double>::infinity();

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
        if (diverged(x1, x2, config.divergence_radius)) return finish(Status::Diverged);

        // Step 1
        Residual res;
        double f1_k = 0.0;
        double f2_k = 0.0;
        try {
            res = evaluate_residual(problem, x1, x2);
            f1_k = problem.f1(x1, x2);
            f2_k = problem.f2(x1, x2);
        } catch (const NonFiniteEvaluation&) {
            return finish(Status::Diverged);
        }
        report.final_residual = res.norm;
        if (res.norm <= config.grad_tol) return finish(Status::Converged);
        if (k >= config.max_iter) return finish(Status::MaxIterations);

        std::optional<std::pair<linalg::SpdSurrogate, linalg::SpdSurrogate>> surrogates;
        Matrix mixed1;
        Matrix mixed2;
        try {
            surrogates = build_surrogates(problem, k, x1, x2, config);
            mixed1 = problem.hess12_f1(x1, x2);
            mixed2 = problem.hess21_f2(x1, x2);
        } catch (const NonFiniteEvaluation&) {
            return finish(Status::Diverged);
        } catch (const ShiftOverflow&) {
            return finish(Status::Diverged);
        }
        const auto& [h1, h2] = *surrogates;
        const double g1_norm = res.g1.norm();
        const double g2_norm = res.g2.norm();
        const Vector rhs = -stack(res.g1, res.g2);

        double t = 1.0;
        std::size_t backtracks = 0;
        std::size_t singular_halvings = 0;
        bool saw_non_finite = false;
        std::optional<Direction> accepted;
        LineSearchCertificate cert;

        while (!accepted) {
            // Step 2
            const auto [m1, m2] = safeguard_mixed_blocks(g1_norm, g2_norm, t, config, mixed1, mixed2);
            // Step 3 halves t with the Step-2 blocks fixed.
            std::optional<Vector> d;
            while (t >= config.t_min) {
                d = linalg::lu_solve(linalg::assemble_block_system(h1.matrix, h2.matrix, m1, m2, t), rhs);
                if (d) break;
                t *= 0.5;
                ++singular_halvings;
            }
            if (!d) return finish(saw_non_finite ? Status::Diverged : Status::LineSearchFailure);

            // Step 4
            Direction dir{d->head(static_cast<Eigen::Index>(problem.n1())),
                          d->tail(static_cast<Eigen::Index>(problem.n2())), t};

            // Step 5
            try {
                cert = check_inequalities(problem, x1, x2, res.g1, res.g2, dir, t, config);
            } catch (const NonFiniteEvaluation&) {
                saw_non_finite = true;
                cert.checks.fill(false);
            }
            if (cert.all_hold()) {
                accepted = std::move(dir);
                break;
            }
            t *= 0.5;
            ++backtracks;
            if (t < config.t_min)
                return finish(saw_non_finite ? Status::Diverged : Status::LineSearchFailure);
        }

        cert.t = t;
        cert.backtracks = backtracks;
        cert.singular_halvings = singular_halvings;

        // Step 6
        IterateRecord rec;
        rec.k = k;
        rec.x1 = x1;
        rec.x2 = x2;
        rec.g1 = res.g1;
        rec.g2 = res.g2;
        rec.t = t;
        rec.d1 = accepted->d1;
        rec.d2 = accepted->d2;
        rec.f1 = f1_k;
        rec.f2 = f2_k;
        rec.certificate = cert;
        rec.h1 = h1.matrix;
        rec.h2 = h2.matrix;
        report.trajectory.push_back(std::move(rec));

        x1 = x1 + t * accepted->d1;
        x2 = x2 + t * accepted->d2;
    }
}

} // namespace nep
