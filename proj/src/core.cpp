#include "nep/core.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "nep/linalg.hpp"

namespace nep {
namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw NonFiniteEvaluation(std::string(what) + " returned a non-finite value");
    return v;
}

Vector checked(Vector v, std::size_t n, const char* what) {
    if (static_cast<std::size_t>(v.size()) != n)
        throw DimensionMismatch(std::string(what) + " returned a vector of the wrong length");
    if (!all_finite(v)) throw NonFiniteEvaluation(std::string(what) + " returned a non-finite value");
    return v;
}

Matrix checked(Matrix m, std::size_t rows, std::size_t cols, const char* what) {
    if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols)
        throw DimensionMismatch(std::string(what) + " returned a block of the wrong shape");
    if (!all_finite(m)) throw NonFiniteEvaluation(std::string(what) + " returned a non-finite value");
    return m;
}

double scaled_step(double base, const Vector& x) { return base * std::max(1.0, inf_norm(x)); }

// Jacobian of a differenced gradient: central, step near the cube root of its ~1e-10 noise.
Matrix nested_fd_block(const std::function<Vector(const Vector&)>& g, const Vector& x, bool symmetrize) {
    const double h = scaled_step(5e-4, x);
    Matrix jac;
    Vector probe = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        probe(j) = x(j) + h;
        const Vector gp = g(probe);
        probe(j) = x(j) - h;
        const Vector gm = g(probe);
        probe(j) = x(j);
        if (j == 0) jac.resize(gp.size(), x.size());
        jac.col(j) = (gp - gm) / (2.0 * h);
    }
    if (symmetrize) return 0.5 * (jac + jac.transpose());
    return jac;
}

} // namespace

NepProblem::NepProblem(std::string name, std::size_t n1, std::size_t n2, ScalarOracle f1,
                       ScalarOracle f2)
    : name_(std::move(name)), n1_(n1), n2_(n2), f1_(std::move(f1)), f2_(std::move(f2)) {
    if (n1_ == 0 || n2_ == 0) throw DimensionMismatch("player dimensions must be positive");
    if (!f1_ || !f2_) throw std::invalid_argument("both objective oracles are required");
}

NepProblem& NepProblem::with_gradients(GradientOracle grad1, GradientOracle grad2) {
    grad1_ = std::move(grad1);
    grad2_ = std::move(grad2);
    return *this;
}

NepProblem& NepProblem::with_hessians(BlockOracle hess11, BlockOracle hess22, BlockOracle hess12_f1,
                                      BlockOracle hess21_f2) {
    hess11_ = std::move(hess11);
    hess22_ = std::move(hess22);
    hess12_f1_ = std::move(hess12_f1);
    hess21_f2_ = std::move(hess21_f2);
    return *this;
}

void NepProblem::check_dims(const Vector& x1, const Vector& x2) const {
    if (static_cast<std::size_t>(x1.size()) != n1_ || static_cast<std::size_t>(x2.size()) != n2_)
        throw DimensionMismatch("point dimensions do not match problem '" + name_ + "'");
}

double NepProblem::f1(const Vector& x1, const Vector& x2) const {
    check_dims(x1, x2);
    return checked(f1_(x1, x2), "f1");
}

double NepProblem::f2(const Vector& x1, const Vector& x2) const {
    check_dims(x1, x2);
    return checked(f2_(x1, x2), "f2");
}

Vector NepProblem::grad1(const Vector& x1, const Vector& x2) const {
    check_dims(x1, x2);
    if (grad1_) return checked(grad1_(x1, x2), n1_, "grad1");
    return checked(finite_diff_gradient([&](const Vector& y) { return f1(y, x2); }, x1), n1_, "grad1");
}

Vector NepProblem::grad2(const Vector& x1, const Vector& x2) const {
    check_dims(x1, x2);
    if (grad2_) return checked(grad2_(x1, x2), n2_, "grad2");
    return checked(finite_diff_gradient([&](const Vector& y) { return f2(x1, y); }, x2), n2_, "grad2");
}

Matrix NepProblem::hess11(const Vector& x1, const Vector& x2) const {
    check_dims(x1, x2);
    if (hess11_) return checked(hess11_(x1, x2), n1_, n1_, "hess11");
    if (!grad1_) return nested_fd_block([&](const Vector& y) { return grad1(y, x2); }, x1, true);
    return finite_diff_hessian_block([&](const Vector& y) { return grad1(y, x2); }, x1,
                                     default_jacobian_step(x1), true);
}

Matrix NepProblem::hess22(const Vector& x1, const Vector& x2) const {
    check_dims(x1, x2);
    if (hess22_) return checked(hess22_(x1, x2), n2_, n2_, "hess22");
    if (!grad2_) return nested_fd_block([&](const Vector& y) { return grad2(x1, y); }, x2, true);
    return finite_diff_hessian_block([&](const Vector& y) { return grad2(x1, y); }, x2,
                                     default_jacobian_step(x2), true);
}

Matrix NepProblem::hess12_f1(const Vector& x1, const Vector& x2) const {
    check_dims(x1, x2);
    if (hess12_f1_) return checked(hess12_f1_(x1, x2), n1_, n2_, "hess12_f1");
    if (!grad1_) return nested_fd_block([&](const Vector& y) { return grad1(x1, y); }, x2, false);
    return finite_diff_hessian_block([&](const Vector& y) { return grad1(x1, y); }, x2,
                                     default_jacobian_step(x2), false);
}

Matrix NepProblem::hess21_f2(const Vector& x1, const Vector& x2) const {
    check_dims(x1, x2);
    if (hess21_f2_) return checked(hess21_f2_(x1, x2), n2_, n1_, "hess21_f2");
    if (!grad2_) return nested_fd_block([&](const Vector& y) { return grad2(y, x2); }, x1, false);
    return finite_diff_hessian_block([&](const Vector& y) { return grad2(y, x2); }, x1,
                                     default_jacobian_step(x1), false);
}

Residual evaluate_residual(const NepProblem& problem, const Vector& x1, const Vector& x2) {
    Residual r;
    r.g1 = problem.grad1(x1, x2);
    r.g2 = problem.grad2(x1, x2);
    r.norm = std::sqrt(r.g1.squaredNorm() + r.g2.squaredNorm());
    return r;
}

double default_gradient_step(const Vector& x) { return scaled_step(1e-6, x); }

double default_jacobian_step(const Vector& x) {
    return scaled_step(std::sqrt(std::numeric_limits<double>::epsilon()), x);
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                            double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be positive");
    Vector g(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + h;
        const double fp = checked(f(probe), "objective");
        probe(i) = x(i) - h;
        const double fm = checked(f(probe), "objective");
        probe(i) = x(i);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& x) {
    return finite_diff_gradient(f, x, default_gradient_step(x));
}

Matrix finite_diff_hessian_block(const std::function<Vector(const Vector&)>& g,
                                 const Vector& x_block, double h, bool symmetrize) {
    if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be positive");
    const Vector g0 = g(x_block);
    if (!all_finite(g0)) throw NonFiniteEvaluation("gradient returned a non-finite value");
    Matrix jac(g0.size(), x_block.size());
    Vector probe = x_block;
    for (Eigen::Index j = 0; j < x_block.size(); ++j) {
        probe(j) = x_block(j) + h;
        const Vector gp = g(probe);
        if (!all_finite(gp)) throw NonFiniteEvaluation("gradient returned a non-finite value");
        probe(j) = x_block(j);
        jac.col(j) = (gp - g0) / h;
    }
    if (symmetrize) {
        if (jac.rows() != jac.cols()) throw DimensionMismatch("cannot symmetrize a non-square block");
        const Matrix sym = 0.5 * (jac + jac.transpose());
        return sym;
    }
    return jac;
}

const char* to_string(PointKind kind) {
    switch (kind) {
    case PointKind::EquilibriumCandidate: return "equilibrium";
    case PointKind::NonEquilibriumStationary: return "non-equilibrium-stationary";
    case PointKind::NonStationary: return "non-stationary";
    }
    return "unknown";
}

PointClass classify_point(const NepProblem& problem, const Vector& x1, const Vector& x2, double tol,
                          double eps_psd) {
    if (!(tol > 0.0)) throw std::invalid_argument("classification tolerance must be positive");
    PointClass out;
    out.min_eig_1 = linalg::spectral_bounds_sym(problem.hess11(x1, x2)).first;
    out.min_eig_2 = linalg::spectral_bounds_sym(problem.hess22(x1, x2)).first;
    const Residual r = evaluate_residual(problem, x1, x2);
    if (r.norm > tol) {
        out.kind = PointKind::NonStationary;
    } else if (out.min_eig_1 >= -eps_psd && out.min_eig_2 >= -eps_psd) {
        out.kind = PointKind::EquilibriumCandidate;
    } else {
        out.kind = PointKind::NonEquilibriumStationary;
    }
    return out;
}

} // namespace nep
