#include "subquad/instances.hpp"

#include "subquad/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace subquad::instances {

namespace {

double eigen_cubic_value(const Vector& diag, const Vector& b, double rho,
                         const Vector& x) {
    double f = 0.0;
    for (Index i = 0; i < x.size(); ++i)
        f += 0.5 * diag(i) * x(i) * x(i) + b(i) * x(i);
    return f + (rho / 3.0) * std::pow(x.norm(), 3);
}

}  // namespace

CubicProblem generate_finite_kappa(const FiniteKappaSpec& spec) {
    if (spec.d < 2) throw std::invalid_argument("generate_finite_kappa: d >= 2 required");
    if (spec.kappa <= 1.0)
        throw std::invalid_argument("generate_finite_kappa: kappa > 1 required");

    Rng rng(spec.seed);
    const Index d = spec.d;
    const double lam_max = 1.0;
    const double lam_min = rng.uniform(-1.0, -0.1);

    Vector diag(d);
    diag(0) = lam_min;
    for (Index i = 1; i < d - 1; ++i) diag(i) = rng.uniform(lam_min, lam_max);
    diag(d - 1) = lam_max;

    const double lam_tr = (lam_max - spec.kappa * lam_min) / (spec.kappa - 1.0);

    const Vector v = rng.gaussian_vector(d);
    double s1 = 0.0, s2 = 0.0;
    for (Index i = 0; i < d; ++i) {
        const double den = diag(i) + lam_tr;
        s1 += v(i) * v(i) / den;
        s2 += v(i) * v(i) / (den * den);
    }
    const double scale = std::sqrt(2.0 / (s1 + (lam_tr / 3.0) * s2));
    Vector b = scale * v;

    const double sol_norm = scale * std::sqrt(s2);  // |A_ltr^-1 b|
    const double rho = lam_tr / sol_norm;

    Vector solution(d);
    for (Index i = 0; i < d; ++i) solution(i) = -b(i) / (diag(i) + lam_tr);

    CubicProblem p = make_cubic_diagonal(diag, b, rho);
    InstanceInfo info;
    info.kappa = spec.kappa;
    info.lambda_tr = lam_tr;
    info.seed = spec.seed;
    info.f_star = eigen_cubic_value(diag, b, rho, solution);
    info.solution = std::move(solution);
    p.info = std::move(info);
    return p;
}

CubicProblem generate_hard_case(const HardCaseSpec& spec) {
    if (spec.d < 2) throw std::invalid_argument("generate_hard_case: d >= 2 required");
    if (spec.gap <= 0.0 || spec.gap >= 1.0)
        throw std::invalid_argument(
            "generate_hard_case: gap must lie in (0, lambda_max - lambda_min)");
    if (spec.tau < 0.0) throw std::invalid_argument("generate_hard_case: tau >= 0 required");

    Rng rng(spec.seed);
    const Index d = spec.d;
    const double lam_min = -0.5;
    const double lam_max = 0.5;
    const double lam_tr = -lam_min;

    Vector diag(d);
    diag(0) = lam_min;
    for (Index i = 1; i < d - 1; ++i) diag(i) = rng.uniform(lam_min + spec.gap, lam_max);
    diag(d - 1) = lam_max;

    const Vector v = rng.gaussian_vector(d - 1);
    double s1 = 0.0, s2 = 0.0;
    for (Index i = 1; i < d; ++i) {
        const double den = diag(i) + lam_tr;
        const double vi = v(i - 1);
        s1 += vi * vi / den;
        s2 += vi * vi / (den * den);
    }
    const double tau2 = spec.tau * spec.tau;
    const double scale = std::sqrt(2.0 / (s1 + (1.0 + tau2) * (lam_tr / 3.0) * s2));

    Vector b = Vector::Zero(d);
    for (Index i = 1; i < d; ++i) b(i) = scale * v(i - 1);

    const double w = scale * std::sqrt(s2);  // |Ahat_ltr^-1 b_{2:d}|
    const double rho = lam_tr / (w * std::sqrt(1.0 + tau2));

    Vector solution(d);
    solution(0) = spec.tau * w;  // + sign fixed for determinism
    for (Index i = 1; i < d; ++i) solution(i) = -b(i) / (diag(i) + lam_tr);

    CubicProblem p = make_cubic_diagonal(diag, b, rho);
    InstanceInfo info;
    info.gap = spec.gap;
    info.tau = spec.tau;
    info.lambda_tr = lam_tr;
    info.seed = spec.seed;
    info.f_star = eigen_cubic_value(diag, b, rho, solution);
    info.solution = std::move(solution);
    p.info = std::move(info);
    return p;
}

TrustRegionProblem to_trust_region(const CubicProblem& p) {
    if (!p.info || !p.info->solution)
        throw std::invalid_argument("to_trust_region: stored solution required");
    const Vector& s = *p.info->solution;
    const double radius = s.norm();

    TrustRegionProblem tr;
    tr.A = p.A;
    tr.b = p.b;
    tr.radius = radius;
    tr.meta = p.meta;
    InstanceInfo info = *p.info;
    if (info.f_star)
        info.f_star = *info.f_star - (p.rho / 3.0) * radius * radius * radius;
    info.lambda_tr = p.rho * radius;
    tr.info = std::move(info);
    return tr;
}

}  // namespace subquad::instances
