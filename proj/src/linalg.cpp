#include "nep/linalg.hpp"

#include <cmath>
#include <utility>

namespace nep::linalg {

std::optional<Vector> lu_solve(const Matrix& a, const Vector& b) {
    if (a.rows() != a.cols()) throw DimensionMismatch("lu_solve: matrix is not square");
    if (a.rows() != b.size()) throw DimensionMismatch("lu_solve: right-hand side length mismatch");

    const Eigen::Index n = a.rows();
    const double threshold = 1e-12 * a.cwiseAbs().rowwise().sum().maxCoeff();

    Matrix lu = a;
    Vector x = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index p = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
        // <= so that the zero matrix (threshold 0) is still reported singular.
        if (!(std::abs(lu(p, k)) > threshold)) return std::nullopt;
        if (p != k) {
            lu.row(k).swap(lu.row(p));
            std::swap(x(k), x(p));
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const double m = lu(i, k) / lu(k, k);
            lu(i, k) = m;
            lu.block(i, k + 1, 1, n - k - 1) -= m * lu.block(k, k + 1, 1, n - k - 1);
            x(i) -= m * x(k);
        }
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = x(i);
        for (Eigen::Index j = i + 1; j < n; ++j) s -= lu(i, j) * x(j);
        x(i) = s / lu(i, i);
    }
    return x;
}

bool cholesky_succeeds(const Matrix& h, double pivot_floor) {
    const Eigen::Index n = h.rows();
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = h(j, j);
        for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot >= pivot_floor) || !std::isfinite(pivot)) return false;
        l(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = h(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return true;
}

SpdSurrogate modified_cholesky(const Matrix& h, double floor) {
    if (h.rows() != h.cols()) throw DimensionMismatch("modified_cholesky: matrix is not square");
    if (!(floor > 0.0)) throw std::invalid_argument("modified_cholesky: floor must be positive");
    if (!all_finite(h)) throw NonFiniteEvaluation("modified_cholesky: non-finite input");

    const Matrix sym = 0.5 * (h + h.transpose());
    const double pivot_floor = floor * 1e-2;
    const Matrix eye = Matrix::Identity(h.rows(), h.cols());

    double shift = 0.0;
    while (!cholesky_succeeds(sym + shift * eye, pivot_floor)) {
        shift = shift == 0.0 ? floor : 2.0 * shift;
        if (shift > 1e12) throw ShiftOverflow("modified_cholesky: diagonal shift exceeded 1e12");
    }
    return {sym + shift * eye, shift, floor};
}

SpdSurrogate as_surrogate(const Matrix& h) {
    const double lo = spectral_bounds_sym(h).first;
    if (!(lo > 0.0)) throw std::invalid_argument("surrogate matrix is not positive definite");
    return {h, 0.0, lo};
}

Matrix assemble_block_system(const Matrix& h1, const Matrix& h2, const Matrix& m1,
                             const Matrix& m2, double t) {
    const Eigen::Index n1 = h1.rows();
    const Eigen::Index n2 = h2.rows();
    if (h1.cols() != n1 || h2.cols() != n2 || m1.rows() != n1 || m1.cols() != n2 ||
        m2.rows() != n2 || m2.cols() != n1)
        throw DimensionMismatch("assemble_block_system: block shapes do not conform");
    Matrix out(n1 + n2, n1 + n2);
    out.topLeftCorner(n1, n1) = h1;
    out.topRightCorner(n1, n2) = t * m1;
    out.bottomLeftCorner(n2, n1) = t * m2;
    out.bottomRightCorner(n2, n2) = h2;
    return out;
}

std::pair<double, double> spectral_bounds_sym(const Matrix& h) {
    if (h.rows() != h.cols()) throw DimensionMismatch("spectral_bounds_sym: matrix is not square");
    if (!all_finite(h)) throw NonFiniteEvaluation("spectral_bounds_sym: non-finite input");
    const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.transpose()), Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    if (!all_finite(m)) throw NonFiniteEvaluation("spectral_norm: non-finite input");
    const Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

} // namespace nep::linalg
