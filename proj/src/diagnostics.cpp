#include "nep/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace nep::diagnostics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-10;
constexpr int kSegmentPoints = 8;

Vector draw_in(const Box& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector x(box.lower.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) = box.lower(i) + u(rng) * (box.upper(i) - box.lower(i));
    return x;
}

Vector draw_normal(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = z(rng);
    return v;
}

void check_box(const NepProblem& problem, const Box& box) {
    const auto n = static_cast<Eigen::Index>(problem.n1() + problem.n2());
    if (box.lower.size() != n || box.upper.size() != n)
        throw DimensionMismatch("box dimension differs from n1 + n2");
    if (!(box.lower.array() <= box.upper.array()).all())
        throw std::invalid_argument("box lower bound exceeds upper bound");
}

double mixed_norm(const NepProblem& problem, const Vector& x1, const Vector& x2) {
    return std::max(linalg::spectral_norm(problem.hess12_f1(x1, x2)),
                    linalg::spectral_norm(problem.hess21_f2(x1, x2)));
}

double ratio_or_inf(double num, double den) { return den > 0.0 ? num / den : kInf; }

struct Recorder {
    LemmaReport& report;
    std::size_t k;

    // Records lhs <= rhs with a relative slack.
    void expect_le(const char* check, double lhs, double rhs) {
        ++report.checked;
        const double tol = kSlack * std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (!(lhs <= rhs + tol)) report.violations.push_back({k, check, lhs - rhs});
    }
};

} // namespace

Box Box::cube(std::size_t n1, std::size_t n2, double r) {
    const auto n = static_cast<Eigen::Index>(n1 + n2);
    return {Vector::Constant(n, -r), Vector::Constant(n, r)};
}

AssumptionEstimates estimate_assumptions(const NepProblem& problem, const Box& box,
                                         std::size_t samples, std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("estimate_assumptions needs at least 2 samples");
    check_box(problem, box);
    const auto n1 = static_cast<Eigen::Index>(problem.n1());
    const auto n2 = static_cast<Eigen::Index>(problem.n2());

    AssumptionEstimates est;
    est.samples = samples;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit_t(0.0, 1.0);
    for (std::size_t s = 0; s < samples; ++s) {
        // Fixed draw order per sample.
        const Vector x = draw_in(box, rng);
        const Vector y = draw_in(box, rng);
        const double t = 1.0 - unit_t(rng);
        const Vector d1 = draw_normal(n1, rng);
        const Vector d2 = draw_normal(n2, rng);

        const Vector x1 = x.head(n1), x2 = x.tail(n2);
        const Vector y1 = y.head(n1), y2 = y.tail(n2);
        try {
            const Matrix m1 = problem.hess12_f1(x1, x2);
            const Matrix m2 = problem.hess21_f2(x1, x2);
            est.c_h = std::max({est.c_h, linalg::spectral_norm(m1), linalg::spectral_norm(m2)});

            const Vector g1 = problem.grad1(x1, x2);
            const Vector g2 = problem.grad2(x1, x2);
            if ((x1 - y1).norm() > 0.0)
                est.l = std::max(est.l, (g1 - problem.grad1(y1, x2)).norm() / (x1 - y1).norm());
            if ((x2 - y2).norm() > 0.0)
                est.l = std::max(est.l, (g2 - problem.grad2(x1, y2)).norm() / (x2 - y2).norm());

            const Vector r1 = problem.grad1(x1, x2 + t * d2) - g1 - t * m1 * d2;
            const Vector r2 = problem.grad2(x1 + t * d1, x2) - g2 - t * m2 * d1;
            if (d2.norm() > 0.0) est.c_r = std::max(est.c_r, r1.norm() / (t * t * d2.squaredNorm()));
            if (d1.norm() > 0.0) est.c_r = std::max(est.c_r, r2.norm() / (t * t * d1.squaredNorm()));
        } catch (const NonFiniteEvaluation&) {
        }
    }
    return est;
}

void observe_run(AssumptionEstimates& est, const NepProblem& problem, const SolveReport& run) {
    double lo = kInf;
    double hi = 0.0;
    for (const auto& rec : run.trajectory) {
        for (const Matrix* h : {&rec.h1, &rec.h2}) {
            if (h->size() == 0) continue;
            const auto [a, b] = linalg::spectral_bounds_sym(*h);
            lo = std::min(lo, a);
            hi = std::max(hi, b);
        }
        // Mixed blocks at the iterate and along the predicted segments.
        for (int j = 0; j <= kSegmentPoints; ++j) {
            const double s = rec.t * static_cast<double>(j) / kSegmentPoints;
            try {
                est.c_h = std::max(est.c_h, mixed_norm(problem, rec.x1, rec.x2 + s * rec.d2));
                est.c_h = std::max(est.c_h, mixed_norm(problem, rec.x1 + s * rec.d1, rec.x2));
            } catch (const NonFiniteEvaluation&) {
            }
        }
    }
    if (hi > 0.0) {
        est.lambda_min = lo;
        est.lambda_max = hi;
        est.mu_min = std::sqrt(2.0) / lo;
        est.mu_max = std::sqrt(hi * hi + 4.0 * hi * est.c_h + est.c_h * est.c_h);
    }
    est.c_k.clear();
    for (const auto& rec : run.trajectory) est.c_k.push_back(est.mu_min * (rec.g1.norm() + rec.g2.norm()));
}

LemmaReport verify_lemma_bounds(const NepProblem& problem, const SolveReport& run,
                                const AssumptionEstimates& est, const SolverConfig& config) {
    LemmaReport report;
    if (run.trajectory.empty()) throw std::invalid_argument("verify_lemma_bounds needs a trajectory");
    if (est.c_k.size() != run.trajectory.size())
        throw std::invalid_argument("estimates were not observed on this run");

    for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
        const IterateRecord& rec = run.trajectory[i];
        if (!rec.certificate || rec.h1.size() == 0 || !(est.lambda_min > 0.0)) {
            ++report.skipped;
            continue;
        }
        Recorder rc{report, rec.k};
        const double t = rec.t;
        const double lmin = est.lambda_min;
        const double lmax = est.lambda_max;
        const double ch = est.c_h;
        const double ck = est.c_k[i];
        const double g1n = rec.g1.norm();
        const double g2n = rec.g2.norm();

        const auto [m1, m2] = safeguard_mixed_blocks(g1n, g2n, t, config, problem.hess12_f1(rec.x1, rec.x2),
                                                     problem.hess21_f2(rec.x1, rec.x2));
        const Matrix ht = linalg::assemble_block_system(rec.h1, rec.h2, m1, m2, t);
        const Vector d = stack(rec.d1, rec.d2);

        rc.expect_le("block-norm-upper", linalg::spectral_norm(ht), est.mu_max);
        rc.expect_le("gradient-by-direction", stack(rec.g1, rec.g2).norm(), est.mu_max * d.norm());

        const double t_block = ratio_or_inf(lmin * lmin, 8.0 * lmax * ch);
        if (t > t_block) {
            ++report.skipped;
            continue;
        }
        Eigen::JacobiSVD<Matrix> svd(ht);
        const double smin = svd.singularValues().minCoeff();
        rc.expect_le("block-inverse-norm", 1.0, est.mu_min * smin);
        rc.expect_le("direction-bound", d.norm(), ck);

        const Vector* g[2] = {&rec.g1, &rec.g2};
        const Vector* di[2] = {&rec.d1, &rec.d2};
        const Matrix* hi[2] = {&rec.h1, &rec.h2};
        for (int p = 0; p < 2; ++p) {
            const double gn = g[p]->norm();
            if (t <= ratio_or_inf(gn, 2.0 * ch * ck)) {
                const double hd = (*hi[p] * *di[p]).norm();
                rc.expect_le(p == 0 ? "scaled-direction-lower-1" : "scaled-direction-lower-2", 0.5 * gn, hd);
                rc.expect_le(p == 0 ? "scaled-direction-upper-1" : "scaled-direction-upper-2", hd, 1.5 * gn);
            } else {
                ++report.skipped;
            }
            if (t <= ratio_or_inf(gn, 8.0 * ch * ck)) {
                const Vector pred = p == 0 ? problem.grad1(rec.x1, rec.x2 + t * rec.d2)
                                           : problem.grad2(rec.x1 + t * rec.d1, rec.x2);
                const double dn = di[p]->norm();
                rc.expect_le(p == 0 ? "direction-ratio-lower-1" : "direction-ratio-lower-2",
                             2.0 / (3.0 * lmax) * pred.norm(), dn);
                rc.expect_le(p == 0 ? "direction-ratio-upper-1" : "direction-ratio-upper-2", dn,
                             2.0 / lmin * pred.norm());
            } else {
                ++report.skipped;
            }
        }
    }
    return report;
}

StepsizeMonitor monitor_stepsizes(const SolveReport& run) {
    StepsizeMonitor m;
    const auto& tr = run.trajectory;
    if (tr.empty()) throw std::invalid_argument("monitor_stepsizes needs a trajectory");
    const std::size_t half = tr.size() / 2;
    double first = kInf;
    double last = kInf;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        (i < half ? first : last) = std::min(i < half ? first : last, tr[i].t);
        m.sum_d1 += tr[i].d1.norm();
        m.sum_d2 += tr[i].d2.norm();
    }
    m.t_min_observed = std::min(first, last);
    // A new minimum in the second half hints at t drifting to zero.
    m.bounded_away = !(last < first) || half == 0;
    return m;
}

std::vector<InequalityViolation> recheck_line_search(const NepProblem& problem,
                                                     const SolveReport& run,
                                                     const SolverConfig& config) {
    std::vector<InequalityViolation> out;
    for (const auto& rec : run.trajectory) {
        if (!rec.certificate) continue;
        const double t = rec.t;
        const Vector y1 = rec.x1 + t * rec.d1;
        const Vector y2 = rec.x2 + t * rec.d2;

        const Vector p1 = problem.grad1(rec.x1, y2);
        const Vector p2 = problem.grad2(y1, rec.x2);
        const double s1 = p1.dot(rec.d1);
        const double s2 = p2.dot(rec.d2);
        const bool ok[6] = {
            problem.f1(y1, y2) <= problem.f1(rec.x1, y2) + config.alpha * t * s1,
            s1 <= -config.theta * p1.norm() * rec.d1.norm(),
            config.gamma * p1.norm() * rec.g1.norm() <= rec.d1.norm() * rec.g1.norm(),
            problem.f2(y1, y2) <= problem.f2(y1, rec.x2) + config.alpha * t * s2,
            s2 <= -config.theta * p2.norm() * rec.d2.norm(),
            config.gamma * p2.norm() * rec.g2.norm() <= rec.d2.norm() * rec.g2.norm(),
        };
        for (int j = 0; j < 6; ++j)
            if (!ok[j]) out.push_back({rec.k, j});
    }
    return out;
}

double gradient_fd_error(const NepProblem& problem, const Box& box, std::size_t samples,
                         std::uint64_t seed) {
    check_box(problem, box);
    const auto n1 = static_cast<Eigen::Index>(problem.n1());
    const auto n2 = static_cast<Eigen::Index>(problem.n2());
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    std::size_t done = 0;
    for (std::size_t attempts = 0; done < samples && attempts < 100 * samples; ++attempts) {
        const Vector x = draw_in(box, rng);
        const Vector x1 = x.head(n1), x2 = x.tail(n2);
        try {
            const Vector a1 = problem.grad1(x1, x2);
            const Vector a2 = problem.grad2(x1, x2);
            const Vector fd1 = finite_diff_gradient([&](const Vector& y) { return problem.f1(y, x2); }, x1);
            const Vector fd2 = finite_diff_gradient([&](const Vector& y) { return problem.f2(x1, y); }, x2);
            worst = std::max(worst, (a1 - fd1).norm() / std::max(1.0, a1.norm()));
            worst = std::max(worst, (a2 - fd2).norm() / std::max(1.0, a2.norm()));
            ++done;
        } catch (const NonFiniteEvaluation&) {
        }
    }
    if (done < samples) return kInf;
    return worst;
}

} // namespace nep::diagnostics
