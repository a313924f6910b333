#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nep/core.hpp"

namespace nep::problems {

/// f1 = 1/2 x1' A1 x1 + (B1 x2 - c1)' x1,  f2 = 1/2 x2' A2 x2 + (B2 x1 - c2)' x2.
struct QuadraticNep {
    Matrix a1;
    Matrix a2;
    Matrix b1;  // n1 x n2
    Matrix b2;  // n2 x n1
    Vector c1;
    Vector c2;

    /// The matrix [[A1, B1], [B2, A2]] whose solve gives the equilibrium.
    Matrix full_matrix() const;
};

/// Client positions and per-player profits of a Hotelling-type location game.
struct FacilityInstance {
    std::size_t dim = 1;
    std::vector<Vector> clients;
    std::vector<double> profits1;
    std::vector<double> profits2;

    void validate() const;
};

/// The five one-dimensional illustrative examples (id 1..5). Throws UnknownProblem.
NepProblem make_example(int id);

/// The two-player game where the undamped prediction direction is not a descent direction.
NepProblem make_non_descent_example();

NepProblem make_quadratic(const QuadraticNep& q, std::string name = "quadratic");

/// Expected-revenue facility game: analytic gradients, finite-difference Hessian blocks.
NepProblem make_facility(const FacilityInstance& instance, std::string name = "facility");

/// 1D instance with clients {1, -1, 3} and unit profits.
FacilityInstance facility_1d_instance();
/// 2D instance with clients on the unit axes and profits (1,2,1,1) / (1,2,2,3).
FacilityInstance facility_2d_instance();
NepProblem make_facility_2d();

/// Random strictly convex quadratic NEP: A_i SPD with eigenvalues in
/// [1, spd_conditioning], B_i and c_i uniform in [-1, 1], full matrix
/// well conditioned. Deterministic in seed. Throws GenerationFailure.
QuadraticNep random_quadratic_nep(std::size_t n1, std::size_t n2, std::uint64_t seed,
                                  double spd_conditioning = 10.0);

/// Resolves "examp1".."examp5", "nodescent", "facility1d", "facility2d" and
/// "quadratic:<seed>:<n1>x<n2>". Throws UnknownProblem.
NepProblem resolve(const std::string& id);

/// Ids resolvable without parameters.
std::vector<std::string> builtin_ids();

} // namespace nep::problems
