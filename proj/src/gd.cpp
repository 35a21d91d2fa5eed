#include "subquad/gd.hpp"

#include "subquad/reference_solve.hpp"
#include "subquad/rng.hpp"

#include <cmath>
#include <limits>

namespace subquad::gd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double beta_from_meta_or_estimate(const OperatorPtr& A,
                                  const std::optional<SpectrumMeta>& meta,
                                  double requested) {
    if (requested > 0.0) return requested;
    if (meta) return std::max(std::abs(meta->lambda_min()), std::abs(meta->lambda_max()));
    return 1.5 * estimate_op_norm(*A);
}

double solution_norm(const CubicProblem& p) {
    if (p.info && p.info->solution) return p.info->solution->norm();
    return reference_solve(p).x.norm();
}

}  // namespace

double resolve_beta(const CubicProblem& p, const GdConfig& cfg) {
    return beta_from_meta_or_estimate(p.A, p.meta, cfg.beta);
}

double resolve_beta(const TrustRegionProblem& p, const GdConfig& cfg) {
    return beta_from_meta_or_estimate(p.A, p.meta, cfg.beta);
}

double default_step_size(const CubicProblem& p, double beta) {
    const RadiusBounds rb = radius_bounds(p, beta);
    return 1.0 / (4.0 * (beta + p.rho * rb.upper));
}

double default_step_size(const TrustRegionProblem& p, double beta) {
    (void)p;
    return 1.0 / beta;
}

SolveReport solve_cubic(const CubicProblem& p, const GdConfig& cfg) {
    const Index d = p.dim();
    const double beta = resolve_beta(p, cfg);
    const RadiusBounds rb = radius_bounds(p, beta);
    const double eta_max = 1.0 / (4.0 * (beta + p.rho * rb.upper));
    const double eta = cfg.eta > 0.0 ? cfg.eta : eta_max;

    if (!cfg.allow_assumption_violations) {
        if (eta > eta_max * (1.0 + 1e-9))
            throw AssumptionError("gd::solve_cubic: eta exceeds 1/(4(beta + rho R_rho))");
        if (cfg.init_radius < 0.0 || cfg.init_radius > rb.cauchy * (1.0 + 1e-9))
            throw AssumptionError("gd::solve_cubic: init_radius outside [0, R_c]");
    }

    double grad_tol = cfg.grad_tol;
    if (grad_tol < 0.0) grad_tol = 1e-8 * (beta + 2.0 * p.rho * rb.upper) * rb.upper;

    // Optional data perturbation: iterate on b + sigma*u, trace original f.
    Vector b_eff = p.b;
    if (cfg.perturbation) {
        const Perturbation& pert = *cfg.perturbation;
        auto [pp, sigma] = perturb_problem(p, beta, pert.epsilon, pert.sigma_bar, pert.seed);
        b_eff = std::move(pp.b);
        (void)sigma;
    }

    const double f_star = (p.info && p.info->f_star)
                              ? *p.info->f_star
                              : std::numeric_limits<double>::quiet_NaN();

    Vector x = Vector::Zero(d);
    const double bn = p.b.norm();
    if (cfg.init_radius > 0.0 && bn > 0.0) x = (-cfg.init_radius / bn) * p.b;

    SolveReport rep;
    rep.status = Status::MaxIters;

    Vector w(d), grad(d), x_next(d);
    for (std::int64_t t = 0; t <= cfg.max_iters; ++t) {
        p.A->apply_into(x, w);
        const double xn = x.norm();
        grad = w + b_eff + (p.rho * xn) * x;
        const double gn = grad.norm();
        const double f = 0.5 * x.dot(w) + p.b.dot(x) + (p.rho / 3.0) * xn * xn * xn;

        if (!std::isfinite(f) || !std::isfinite(gn)) {
            rep.status = Status::Diverged;
            break;
        }

        const bool last = (t == cfg.max_iters) || gn <= grad_tol;
        if (t % cfg.trace_every == 0 || last)
            rep.trace.push_back({t, t, f, f - f_star, gn, xn, 0});
        rep.x = x;
        rep.f_final = f;
        rep.matvecs = t + 1;

        if (gn <= grad_tol) {
            rep.status = Status::Converged;
            break;
        }
        if (t == cfg.max_iters) break;

        x_next = x - eta * grad;
        if (x_next == x) {
            rep.status = Status::Stalled;
            break;
        }
        x.swap(x_next);
    }

    rep.lambda = p.rho * rep.x.norm();
    return rep;
}

SolveReport solve_tr(const TrustRegionProblem& p, const GdConfig& cfg) {
    const Index d = p.dim();
    const double beta = resolve_beta(p, cfg);
    const double eta_max = 1.0 / beta;
    const double eta = cfg.eta > 0.0 ? cfg.eta : eta_max;

    if (!cfg.allow_assumption_violations) {
        if (eta > eta_max * (1.0 + 1e-9))
            throw AssumptionError("gd::solve_tr: eta exceeds 1/beta");
        if (cfg.init_radius < 0.0 || cfg.init_radius > p.radius * (1.0 + 1e-9))
            throw AssumptionError("gd::solve_tr: init_radius outside [0, R]");
    }

    double grad_tol = cfg.grad_tol;
    if (grad_tol < 0.0) grad_tol = 1e-8 * beta * std::max(p.radius, 1.0);

    const double f_star = (p.info && p.info->f_star)
                              ? *p.info->f_star
                              : std::numeric_limits<double>::quiet_NaN();

    Vector x = Vector::Zero(d);
    const double bn = p.b.norm();
    if (cfg.init_radius > 0.0 && bn > 0.0) x = (-cfg.init_radius / bn) * p.b;

    SolveReport rep;
    rep.status = Status::MaxIters;

    Vector w(d), x_next(d);
    for (std::int64_t t = 0; t <= cfg.max_iters; ++t) {
        p.A->apply_into(x, w);
        const double f = 0.5 * x.dot(w) + p.b.dot(x);

        x_next = x - eta * (w + p.b);
        const double nn = x_next.norm();
        if (nn > p.radius) x_next *= p.radius / nn;
        // Gradient mapping G_eta(x) = (x - Pi_R(x - eta grad f(x)))/eta;
        // equals grad f at interior points.
        const double gn = (x - x_next).norm() / eta;

        if (!std::isfinite(f) || !std::isfinite(gn)) {
            rep.status = Status::Diverged;
            break;
        }

        const bool last = (t == cfg.max_iters) || gn <= grad_tol;
        if (t % cfg.trace_every == 0 || last)
            rep.trace.push_back({t, t, f, f - f_star, gn, x.norm(), 0});
        rep.x = x;
        rep.f_final = f;
        rep.matvecs = t + 1;

        if (gn <= grad_tol) {
            rep.status = Status::Converged;
            break;
        }
        if (t == cfg.max_iters) break;
        if (x_next == x) {
            rep.status = Status::Stalled;
            break;
        }
        x.swap(x_next);
    }

    // Least-squares multiplier from the stationarity system when the
    // solution sits on the boundary.
    const double xn = rep.x.norm();
    rep.lambda = 0.0;
    if (xn >= p.radius * (1.0 - 1e-8) && xn > 0.0) {
        const Vector Ax = p.A->apply(rep.x);
        rep.lambda = std::max(0.0, -rep.x.dot(Ax + p.b) / (xn * xn));
    }
    return rep;
}

IterationBound iteration_bound_cubic(const CubicProblem& p, double eta, double epsilon) {
    if (!p.meta)
        throw std::invalid_argument("iteration_bound_cubic: spectrum metadata required");
    const SpectrumMeta& meta = *p.meta;
    const double lam_min = meta.lambda_min();
    const double b1 = meta.b_eigen(0);
    if (b1 == 0.0)
        throw HardCaseError("iteration_bound_cubic: b^(1) = 0 (use perturbation)");

    const double beta = std::max(std::abs(lam_min), std::abs(meta.lambda_max()));
    const double s = solution_norm(p);
    const RadiusBounds rb = radius_bounds(p, beta);

    const double hinge = std::max(-lam_min, 0.0);
    IterationBound out;
    out.tau_grow = 6.0 * std::log1p(hinge * hinge / (4.0 * p.rho * std::abs(b1)));
    out.tau_converge = 6.0 * std::log((beta + 2.0 * p.rho * s) * s * s / epsilon);

    const double denom = p.rho * s + lam_min;
    const double branch_lin = denom > 0.0 ? 1.0 / denom : kInf;
    out.bound = (out.tau_grow + out.tau_converge) / eta *
                std::min(branch_lin, 10.0 * s * s / epsilon);

    const double tau_conv_hi =
        6.0 * std::log((beta + 2.0 * p.rho * rb.upper) * rb.upper * rb.upper / epsilon);
    const double denom_c = p.rho * rb.cauchy + lam_min;
    const double branch_lin_c = denom_c > 0.0 ? 1.0 / denom_c : kInf;
    out.bound_conservative = (out.tau_grow + tau_conv_hi) / eta *
                             std::min(branch_lin_c, 10.0 * rb.upper * rb.upper / epsilon);
    return out;
}

std::pair<CubicProblem, double> perturb_problem(const CubicProblem& p, double beta,
                                                double epsilon, double sigma_bar,
                                                std::uint64_t seed) {
    if (sigma_bar <= 0.0 || sigma_bar > 1.0)
        throw std::invalid_argument("perturb_problem: sigma_bar must be in (0, 1]");
    const RadiusBounds rb = radius_bounds(p, beta);
    const double sigma =
        p.rho * epsilon / (beta + 2.0 * p.rho * rb.upper) * (sigma_bar / 12.0);

    Rng rng(seed);
    Vector b_tilde = p.b + sigma * rng.unit_sphere(p.dim());

    CubicProblem out;
    out.A = p.A;
    out.rho = p.rho;
    if (p.meta) {
        SpectrumMeta meta = *p.meta;
        meta.b_eigen = meta.to_eigen(b_tilde);
        out.meta = std::move(meta);
    }
    out.b = std::move(b_tilde);
    // info intentionally dropped: the stored solution belongs to the
    // unperturbed problem.
    return {std::move(out), sigma};
}

double perturbed_iteration_bound_cubic(const CubicProblem& p, double eta,
                                       double epsilon, double sigma_bar,
                                       double delta) {
    if (!p.meta)
        throw std::invalid_argument("perturbed_iteration_bound_cubic: metadata required");
    const SpectrumMeta& meta = *p.meta;
    const double lam_min = meta.lambda_min();
    const double beta = std::max(std::abs(lam_min), std::abs(meta.lambda_max()));
    const double s = solution_norm(p);
    const double d = static_cast<double>(p.dim());

    const double tau_grow =
        lam_min < 0.0 ? std::log1p(3.0 * std::sqrt(d) / (sigma_bar * delta)) : 0.0;
    const double tau_conv = std::log((beta + 2.0 * p.rho * s) * s * s / epsilon);

    const double denom = lam_min + p.rho * s;
    const double branch_lin = denom > 0.0 ? 1.0 / denom : kInf;
    return (6.0 * tau_grow + 14.0 * tau_conv) * (1.0 + sigma_bar) / eta *
           std::min(branch_lin, 10.0 * s * s / epsilon);
}

}  // namespace subquad::gd
