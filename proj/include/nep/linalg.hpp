#pragma once

#include <optional>
#include <utility>

#include "nep/types.hpp"

namespace nep::linalg {

/// Partial-pivoting LU solve. Returns nullopt when some pivot has magnitude
/// <= 1e-12 * ||A||_inf. Throws DimensionMismatch on shape errors.
std::optional<Vector> lu_solve(const Matrix& a, const Vector& b);

/// Positive definite surrogate H + shift * I.
struct SpdSurrogate {
    Matrix matrix;
    double shift = 0.0;
    double min_eig_floor = 0.0;
};

/// Plain Cholesky test: true when every pivot (before the square root) is >= pivot_floor.
bool cholesky_succeeds(const Matrix& h, double pivot_floor);

/// Smallest shift in {0, floor, 2 floor, 4 floor, ...} for which Cholesky of
/// H + shift I has all pivots >= floor * 1e-2. Throws ShiftOverflow past 1e12.
SpdSurrogate modified_cholesky(const Matrix& h, double floor);

/// Wraps a matrix already known to be SPD (user-supplied surrogates).
SpdSurrogate as_surrogate(const Matrix& h);

/// [[H1, t M1], [t M2, H2]].
Matrix assemble_block_system(const Matrix& h1, const Matrix& h2, const Matrix& m1,
                             const Matrix& m2, double t);

/// Extreme eigenvalues of a symmetric matrix.
std::pair<double, double> spectral_bounds_sym(const Matrix& h);

/// Largest singular value.
double spectral_norm(const Matrix& m);

} // namespace nep::linalg
