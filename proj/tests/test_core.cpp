#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "nep/core.hpp"
#include "nep/linalg.hpp"
#include "nep/problems.hpp"

using namespace nep;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

// f1 = x1' x1 * x2(0), f2 = sin(x2(0)) + x1(1) x2(0)^2; no derivative oracles.
NepProblem bare_problem() {
    return NepProblem("bare", 2, 1,
                      [](const Vector& x1, const Vector& x2) { return x1.squaredNorm() * x2(0); },
                      [](const Vector& x1, const Vector& x2) {
                          return std::sin(x2(0)) + x1(1) * x2(0) * x2(0);
                      });
}

} // namespace

TEST_CASE("finite-difference fallbacks match hand derivatives") {
    const NepProblem p = bare_problem();
    const Vector x1{{0.3, -1.2}};
    const Vector x2{{0.7}};

    const Vector g1 = p.grad1(x1, x2);
    CHECK(g1(0) == doctest::Approx(2 * 0.3 * 0.7).epsilon(1e-8));
    CHECK(g1(1) == doctest::Approx(2 * -1.2 * 0.7).epsilon(1e-8));
    CHECK(p.grad2(x1, x2)(0) == doctest::Approx(std::cos(0.7) + 2 * -1.2 * 0.7).epsilon(1e-8));

    const Matrix h11 = p.hess11(x1, x2);
    CHECK(h11(0, 0) == doctest::Approx(1.4).epsilon(1e-6));
    CHECK(std::abs(h11(0, 1)) < 1e-6);
    CHECK(h11(0, 1) == h11(1, 0));
    const Matrix m1 = p.hess12_f1(x1, x2);
    REQUIRE(m1.rows() == 2);
    REQUIRE(m1.cols() == 1);
    CHECK(m1(0, 0) == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(m1(1, 0) == doctest::Approx(-2.4).epsilon(1e-6));
    const Matrix m2 = p.hess21_f2(x1, x2);
    REQUIRE(m2.rows() == 1);
    REQUIRE(m2.cols() == 2);
    CHECK(std::abs(m2(0, 0)) < 1e-6);
    CHECK(m2(0, 1) == doctest::Approx(1.4).epsilon(1e-6));
    CHECK(p.hess22(x1, x2)(0, 0) == doctest::Approx(-std::sin(0.7) + 2 * -1.2).epsilon(1e-6));
}

TEST_CASE("evaluate_residual stacks both partial gradients") {
    const NepProblem p = problems::make_example(1);
    const Residual r = evaluate_residual(p, v1(-5), v1(1));
    // grad1 = 2 x1 + x2 - 5, grad2 = 3 x2 - x1 - 1.
    CHECK(r.g1(0) == doctest::Approx(-14));
    CHECK(r.g2(0) == doctest::Approx(7));
    CHECK(r.norm == doctest::Approx(std::sqrt(14.0 * 14 + 49)));
}

TEST_CASE("evaluators reject bad shapes and non-finite values") {
    const NepProblem p = problems::make_example(1);
    CHECK_THROWS_AS(p.f1(Vector::Zero(2), v1(0)), DimensionMismatch);
    const NepProblem nan_problem("nan", 1, 1,
                                 [](const Vector&, const Vector&) { return std::numeric_limits<double>::quiet_NaN(); },
                                 [](const Vector&, const Vector&) { return 0.0; });
    CHECK_THROWS_AS(nan_problem.f1(v1(0), v1(0)), NonFiniteEvaluation);
    CHECK_THROWS_AS(nan_problem.grad1(v1(0), v1(0)), NonFiniteEvaluation);
}

TEST_CASE("default finite-difference steps scale with the point") {
    CHECK(default_gradient_step(Vector{{0.5}}) == doctest::Approx(1e-6));
    CHECK(default_gradient_step(Vector{{-300.0, 2.0}}) == doctest::Approx(3e-4));
    CHECK(default_jacobian_step(Vector{{10.0}}) ==
          doctest::Approx(10 * std::sqrt(std::numeric_limits<double>::epsilon())));
}

TEST_CASE("classify_point separates equilibria from other stationary points") {
    const auto eq = classify_point(problems::make_example(1), v1(2), v1(1), 1e-8);
    CHECK(eq.kind == PointKind::EquilibriumCandidate);
    CHECK(eq.min_eig_1 == doctest::Approx(2));
    CHECK(eq.min_eig_2 == doctest::Approx(3));

    // Example 3 is stationary at (3.2, -1.4) but f2 is concave in x2 there.
    const auto saddle = classify_point(problems::make_example(3), v1(3.2), v1(-1.4), 1e-8);
    CHECK(saddle.kind == PointKind::NonEquilibriumStationary);
    CHECK(saddle.min_eig_2 == doctest::Approx(-3));

    const auto moving = classify_point(problems::make_example(1), v1(0), v1(0), 1e-8);
    CHECK(moving.kind == PointKind::NonStationary);

    // Example 5: (-1,-1) is stationary but both per-player curvatures are -1.
    const auto cubic = classify_point(problems::make_example(5), v1(-1), v1(-1), 1e-8);
    CHECK(cubic.kind == PointKind::NonEquilibriumStationary);
    CHECK(to_string(cubic.kind) == std::string("non-equilibrium-stationary"));
}

TEST_CASE("the undamped prediction direction need not be a descent direction") {
    const NepProblem p = problems::make_non_descent_example();
    const Vector x1 = v1(0), x2 = v1(0);
    const Residual r = evaluate_residual(p, x1, x2);
    CHECK(r.g1(0) == doctest::Approx(1));
    CHECK(r.g2(0) == doctest::Approx(2));

    const Matrix full = linalg::assemble_block_system(p.hess11(x1, x2), p.hess22(x1, x2), p.hess12_f1(x1, x2),
                                                      p.hess21_f2(x1, x2), 1.0);
    const auto d = linalg::lu_solve(full, -stack(r.g1, r.g2));
    REQUIRE(d);
    CHECK((*d)(0) == doctest::Approx(3));
    CHECK((*d)(1) == doctest::Approx(-2));

    // Gradient of f1 at the predicted point of player 2 is still 1, so d1 = 3 ascends.
    const Vector pred = p.grad1(x1, x2 + v1((*d)(1)));
    CHECK(pred(0) == doctest::Approx(1));
    CHECK(pred(0) * (*d)(0) > 0.0);
}
