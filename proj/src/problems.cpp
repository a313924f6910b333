#include "nep/problems.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <utility>

#include "nep/linalg.hpp"

namespace nep::problems {
namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }
Matrix block(double v) { return Matrix::Constant(1, 1, v); }

// One-dimensional games are written in terms of the two scalars.
struct Scalar2d {
    std::function<double(double, double)> f1, f2, g1, g2, h11, h22, h12, h21;
};

NepProblem from_scalars(std::string name, Scalar2d s) {
    NepProblem p(std::move(name), 1, 1,
                 [f = s.f1](const Vector& a, const Vector& b) { return f(a(0), b(0)); },
                 [f = s.f2](const Vector& a, const Vector& b) { return f(a(0), b(0)); });
    p.with_gradients([f = s.g1](const Vector& a, const Vector& b) { return scalar(f(a(0), b(0))); },
                     [f = s.g2](const Vector& a, const Vector& b) { return scalar(f(a(0), b(0))); });
    p.with_hessians([f = s.h11](const Vector& a, const Vector& b) { return block(f(a(0), b(0))); },
                    [f = s.h22](const Vector& a, const Vector& b) { return block(f(a(0), b(0))); },
                    [f = s.h12](const Vector& a, const Vector& b) { return block(f(a(0), b(0))); },
                    [f = s.h21](const Vector& a, const Vector& b) { return block(f(a(0), b(0))); });
    return p;
}

std::size_t parse_size(const std::string& text, const std::string& id) {
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) throw UnknownProblem("malformed problem id '" + id + "'");
    return v;
}

} // namespace

Matrix QuadraticNep::full_matrix() const {
    const auto n1 = a1.rows();
    const auto n2 = a2.rows();
    Matrix m(n1 + n2, n1 + n2);
    m << a1, b1, b2, a2;
    return m;
}

void FacilityInstance::validate() const {
    if (dim == 0) throw std::invalid_argument("facility dimension must be positive");
    if (clients.empty()) throw std::invalid_argument("facility instance needs at least one client");
    if (profits1.size() != clients.size() || profits2.size() != clients.size())
        throw std::invalid_argument("profit lists must match the client count");
    for (const auto& z : clients)
        if (static_cast<std::size_t>(z.size()) != dim)
            throw std::invalid_argument("client position has the wrong dimension");
}

NepProblem make_example(int id) {
    switch (id) {
    case 1:
        return from_scalars("examp1",
                            {[](double a, double b) { return a * a + a * b - 5 * a; },
                             [](double a, double b) { return 1.5 * b * b - a * b - b; },
                             [](double a, double b) { return 2 * a + b - 5; },
                             [](double a, double b) { return 3 * b - a - 1; },
                             [](double, double) { return 2.0; }, [](double, double) { return 3.0; },
                             [](double, double) { return 1.0; }, [](double, double) { return -1.0; }});
    case 2:
        return from_scalars("examp2",
                            {[](double a, double b) { return a * a / 4 + a * b - 5 * a; },
                             [](double a, double b) { return b * b / 6 - a * b - b; },
                             [](double a, double b) { return a / 2 + b - 5; },
                             [](double a, double b) { return b / 3 - a - 1; },
                             [](double, double) { return 0.5; }, [](double, double) { return 1.0 / 3.0; },
                             [](double, double) { return 1.0; }, [](double, double) { return -1.0; }});
    case 3:
        return from_scalars("examp3",
                            {[](double a, double b) { return a * a + a * b - 5 * a; },
                             [](double a, double b) { return -1.5 * b * b - a * b - b; },
                             [](double a, double b) { return 2 * a + b - 5; },
                             [](double a, double b) { return -3 * b - a - 1; },
                             [](double, double) { return 2.0; }, [](double, double) { return -3.0; },
                             [](double, double) { return 1.0; }, [](double, double) { return -1.0; }});
    case 4:
        return from_scalars("examp4",
                            {[](double a, double b) { return -a * (0.6 - b); },
                             [](double a, double b) { return b * (0.7 - a); },
                             [](double, double b) { return b - 0.6; },
                             [](double a, double) { return 0.7 - a; },
                             [](double, double) { return 0.0; }, [](double, double) { return 0.0; },
                             [](double, double) { return 1.0; }, [](double, double) { return -1.0; }});
    case 5:
        return from_scalars("examp5",
                            {[](double a, double b) { return a * a * a * b * b / 3 + a * a / 2; },
                             [](double a, double b) { return a * a * b * b * b / 3 + b * b / 2; },
                             [](double a, double b) { return a * a * b * b + a; },
                             [](double a, double b) { return a * a * b * b + b; },
                             [](double a, double b) { return 2 * a * b * b + 1; },
                             [](double a, double b) { return 2 * a * a * b + 1; },
                             [](double a, double b) { return 2 * a * a * b; },
                             [](double a, double b) { return 2 * a * b * b; }});
    default:
        throw UnknownProblem("no illustrative example with id " + std::to_string(id));
    }
}

NepProblem make_non_descent_example() {
    return from_scalars("nodescent",
                        {[](double a, double b) { return 0.5 * a * a + (b * b + 2 * b + 1) * a; },
                         [](double, double b) { return 0.5 * (b + 2) * (b + 2); },
                         [](double a, double b) { return a + b * b + 2 * b + 1; },
                         [](double, double b) { return b + 2; },
                         [](double, double) { return 1.0; }, [](double, double) { return 1.0; },
                         [](double, double b) { return 2 * b + 2; }, [](double, double) { return 0.0; }});
}

NepProblem make_quadratic(const QuadraticNep& q, std::string name) {
    const auto n1 = static_cast<std::size_t>(q.a1.rows());
    const auto n2 = static_cast<std::size_t>(q.a2.rows());
    NepProblem p(std::move(name), n1, n2,
                 [q](const Vector& x1, const Vector& x2) {
                     return 0.5 * x1.dot(q.a1 * x1) + (q.b1 * x2 - q.c1).dot(x1);
                 },
                 [q](const Vector& x1, const Vector& x2) {
                     return 0.5 * x2.dot(q.a2 * x2) + (q.b2 * x1 - q.c2).dot(x2);
                 });
    // grad1 uses the symmetric part of A1, matching the Hessian below.
    p.with_gradients(
        [q](const Vector& x1, const Vector& x2) -> Vector {
            return 0.5 * (q.a1 + q.a1.transpose()) * x1 + q.b1 * x2 - q.c1;
        },
        [q](const Vector& x1, const Vector& x2) -> Vector {
            return 0.5 * (q.a2 + q.a2.transpose()) * x2 + q.b2 * x1 - q.c2;
        });
    p.with_hessians([q](const Vector&, const Vector&) -> Matrix { return 0.5 * (q.a1 + q.a1.transpose()); },
                    [q](const Vector&, const Vector&) -> Matrix { return 0.5 * (q.a2 + q.a2.transpose()); },
                    [q](const Vector&, const Vector&) -> Matrix { return q.b1; },
                    [q](const Vector&, const Vector&) -> Matrix { return q.b2; });
    return p;
}

NepProblem make_facility(const FacilityInstance& instance, std::string name) {
    instance.validate();
    const std::size_t n = instance.dim;

    // f_i = sum_j b_j ||x_i - z_j||^2 / (||x_i - z_j||^2 + ||x_other - z_j||^2).
    // A zero denominator yields NaN, which the problem reports as NonFiniteEvaluation.
    auto objective = [instance](const std::vector<double>& profits, const Vector& own,
                                const Vector& other) {
        double sum = 0.0;
        for (std::size_t j = 0; j < instance.clients.size(); ++j) {
            const double a = (own - instance.clients[j]).squaredNorm();
            const double c = (other - instance.clients[j]).squaredNorm();
            sum += profits[j] * a / (a + c);
        }
        return sum;
    };
    // grad_own f_i = sum_j b_j 2 (x_i - z_j) ||x_other - z_j||^2 / (a + c)^2.
    auto gradient = [instance](const std::vector<double>& profits, const Vector& own,
                               const Vector& other) {
        Vector g = Vector::Zero(own.size());
        for (std::size_t j = 0; j < instance.clients.size(); ++j) {
            const Vector diff = own - instance.clients[j];
            const double a = diff.squaredNorm();
            const double c = (other - instance.clients[j]).squaredNorm();
            const double denom = (a + c) * (a + c);
            g += profits[j] * 2.0 * c / denom * diff;
        }
        return g;
    };

    NepProblem p(std::move(name), n, n,
                 [objective, b = instance.profits1](const Vector& x1, const Vector& x2) {
                     return objective(b, x1, x2);
                 },
                 [objective, b = instance.profits2](const Vector& x1, const Vector& x2) {
                     return objective(b, x2, x1);
                 });
    p.with_gradients([gradient, b = instance.profits1](const Vector& x1,
                                                       const Vector& x2) { return gradient(b, x1, x2); },
                     [gradient, b = instance.profits2](const Vector& x1,
                                                       const Vector& x2) { return gradient(b, x2, x1); });
    return p;
}

FacilityInstance facility_1d_instance() {
    FacilityInstance f;
    f.dim = 1;
    f.clients = {scalar(1.0), scalar(-1.0), scalar(3.0)};
    f.profits1 = {1.0, 1.0, 1.0};
    f.profits2 = {1.0, 1.0, 1.0};
    return f;
}

FacilityInstance facility_2d_instance() {
    FacilityInstance f;
    f.dim = 2;
    f.clients = {Vector{{1.0, 0.0}}, Vector{{0.0, 1.0}}, Vector{{-1.0, 0.0}}, Vector{{0.0, -1.0}}};
    f.profits1 = {1.0, 2.0, 1.0, 1.0};
    f.profits2 = {1.0, 2.0, 2.0, 3.0};
    return f;
}

NepProblem make_facility_2d() { return make_facility(facility_2d_instance(), "facility2d"); }

QuadraticNep random_quadratic_nep(std::size_t n1, std::size_t n2, std::uint64_t seed,
                                  double spd_conditioning) {
    if (n1 == 0 || n2 == 0) throw DimensionMismatch("quadratic NEP dimensions must be positive");
    if (!(spd_conditioning >= 1.0)) throw std::invalid_argument("spd_conditioning must be >= 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> eig(1.0, spd_conditioning);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto random_matrix = [&](Eigen::Index r, Eigen::Index c, auto& dist) {
        Matrix m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) m(i, j) = dist(rng);
        return m;
    };
    auto random_spd = [&](std::size_t n) {
        const auto dim = static_cast<Eigen::Index>(n);
        const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(dim, dim, normal)).householderQ();
        Vector lambda(dim);
        for (Eigen::Index i = 0; i < dim; ++i) lambda(i) = eig(rng);
        lambda(0) = 1.0;
        if (dim > 1) lambda(dim - 1) = spd_conditioning;
        Matrix a = q * lambda.asDiagonal() * q.transpose();
        return Matrix(0.5 * (a + a.transpose()));
    };

    QuadraticNep out;
    out.a1 = random_spd(n1);
    out.a2 = random_spd(n2);
    out.c1 = random_matrix(static_cast<Eigen::Index>(n1), 1, unit);
    out.c2 = random_matrix(static_cast<Eigen::Index>(n2), 1, unit);
    for (int attempt = 0; attempt < 100; ++attempt) {
        out.b1 = random_matrix(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2), unit);
        out.b2 = random_matrix(static_cast<Eigen::Index>(n2), static_cast<Eigen::Index>(n1), unit);
        const Eigen::JacobiSVD<Matrix> svd(out.full_matrix());
        const Vector& s = svd.singularValues();
        if (s(s.size() - 1) >= 1e-6 * s(0)) return out;
    }
    throw GenerationFailure("could not draw a nonsingular quadratic NEP in 100 attempts");
}

NepProblem resolve(const std::string& id) {
    if (id.size() == 6 && id.rfind("examp", 0) == 0 && id[5] >= '1' && id[5] <= '5')
        return make_example(id[5] - '0');
    if (id == "nodescent") return make_non_descent_example();
    if (id == "facility1d") return make_facility(facility_1d_instance(), "facility1d");
    if (id == "facility2d") return make_facility_2d();
    if (id.rfind("quadratic:", 0) == 0) {
        const auto rest = id.substr(10);
        const auto colon = rest.find(':');
        if (colon == std::string::npos) throw UnknownProblem("malformed problem id '" + id + "'");
        const auto dims = rest.substr(colon + 1);
        const auto x = dims.find('x');
        if (x == std::string::npos) throw UnknownProblem("malformed problem id '" + id + "'");
        const std::uint64_t seed = parse_size(rest.substr(0, colon), id);
        const std::size_t n1 = parse_size(dims.substr(0, x), id);
        const std::size_t n2 = parse_size(dims.substr(x + 1), id);
        if (n1 == 0 || n2 == 0) throw UnknownProblem("malformed problem id '" + id + "'");
        return make_quadratic(random_quadratic_nep(n1, n2, seed), id);
    }
    throw UnknownProblem("unknown problem '" + id + "'");
}

std::vector<std::string> builtin_ids() {
    return {"examp1", "examp2", "examp3", "examp4", "examp5", "nodescent", "facility1d", "facility2d"};
}

} // namespace nep::problems
