#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace nep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class NepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An objective or derivative oracle produced NaN/Inf (divergence signal).
class NonFiniteEvaluation : public NepError {
public:
    using NepError::NepError;
};

class DimensionMismatch : public NepError {
public:
    using NepError::NepError;
};

/// Modified Cholesky needed a diagonal shift beyond 1e12.
class ShiftOverflow : public NepError {
public:
    using NepError::NepError;
};

/// Exact Jacobi could not solve a per-player stationarity system.
class InnerSolveFailure : public NepError {
public:
    using NepError::NepError;
};

class UnknownProblem : public NepError {
public:
    using NepError::NepError;
};

class GenerationFailure : public NepError {
public:
    using NepError::NepError;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

inline Vector stack(const Vector& a, const Vector& b) {
    Vector out(a.size() + b.size());
    out << a, b;
    return out;
}

} // namespace nep
