#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "nep/types.hpp"

namespace nep {

using ScalarOracle = std::function<double(const Vector& x1, const Vector& x2)>;
using GradientOracle = std::function<Vector(const Vector& x1, const Vector& x2)>;
using BlockOracle = std::function<Matrix(const Vector& x1, const Vector& x2)>;

/// Two-player unconstrained Nash equilibrium problem.
///
/// Player 1 minimizes f1(., x2) over x1 in R^n1, player 2 minimizes
/// f2(x1, .) over x2 in R^n2. Only the objectives are mandatory; missing
/// derivative oracles are filled in by finite differences. Oracles must be
/// pure: the solvers call them from several threads.
///
/// Block conventions:
///   hess11    = d2 f1 / dx1 dx1   (n1 x n1)
///   hess22    = d2 f2 / dx2 dx2   (n2 x n2)
///   hess12_f1 = d/dx2 grad1       (n1 x n2)
///   hess21_f2 = d/dx1 grad2       (n2 x n1)
class NepProblem {
public:
    NepProblem(std::string name, std::size_t n1, std::size_t n2, ScalarOracle f1, ScalarOracle f2);

    NepProblem& with_gradients(GradientOracle grad1, GradientOracle grad2);
    NepProblem& with_hessians(BlockOracle hess11, BlockOracle hess22, BlockOracle hess12_f1,
                              BlockOracle hess21_f2);

    const std::string& name() const { return name_; }
    std::size_t n1() const { return n1_; }
    std::size_t n2() const { return n2_; }

    bool has_analytic_gradients() const { return static_cast<bool>(grad1_); }
    bool has_analytic_hessians() const { return static_cast<bool>(hess11_); }

    // All evaluators check dimensions and throw NonFiniteEvaluation on NaN/Inf.
    double f1(const Vector& x1, const Vector& x2) const;
    double f2(const Vector& x1, const Vector& x2) const;
    Vector grad1(const Vector& x1, const Vector& x2) const;
    Vector grad2(const Vector& x1, const Vector& x2) const;
    Matrix hess11(const Vector& x1, const Vector& x2) const;
    Matrix hess22(const Vector& x1, const Vector& x2) const;
    Matrix hess12_f1(const Vector& x1, const Vector& x2) const;
    Matrix hess21_f2(const Vector& x1, const Vector& x2) const;

    void check_dims(const Vector& x1, const Vector& x2) const;

private:
    std::string name_;
    std::size_t n1_;
    std::size_t n2_;
    ScalarOracle f1_;
    ScalarOracle f2_;
    GradientOracle grad1_;
    GradientOracle grad2_;
    BlockOracle hess11_;
    BlockOracle hess22_;
    BlockOracle hess12_f1_;
    BlockOracle hess21_f2_;
};

/// Stacked first-order residual (grad_x1 f1, grad_x2 f2).
struct Residual {
    Vector g1;
    Vector g2;
    double norm = 0.0;
};

Residual evaluate_residual(const NepProblem& problem, const Vector& x1, const Vector& x2);

/// Default central-difference step: 1e-6 * max(1, ||x||_inf).
double default_gradient_step(const Vector& x);
/// Default forward-difference step for Jacobians of gradients: sqrt(eps) * max(1, ||x||_inf).
double default_jacobian_step(const Vector& x);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                            double h);
Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& x);

/// Forward-difference Jacobian of a vector oracle with respect to x_block.
/// Pass symmetrize = true for per-player Hessian blocks.
Matrix finite_diff_hessian_block(const std::function<Vector(const Vector&)>& g,
                                 const Vector& x_block, double h, bool symmetrize);

enum class PointKind { EquilibriumCandidate, NonEquilibriumStationary, NonStationary };

struct PointClass {
    PointKind kind = PointKind::NonStationary;
    double min_eig_1 = 0.0;
    double min_eig_2 = 0.0;
};

const char* to_string(PointKind kind);

/// Stationary points whose per-player Hessian blocks are PSD (to eps_psd) are
/// equilibrium candidates; other stationary points are not.
PointClass classify_point(const NepProblem& problem, const Vector& x1, const Vector& x2, double tol,
                          double eps_psd = 1e-8);

} // namespace nep
