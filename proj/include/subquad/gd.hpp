#pragma once

#include "subquad/problem.hpp"

#include <optional>
#include <stdexcept>

namespace subquad::gd {

/// Data-perturbation settings (b -> b + sigma*u with u uniform on the
/// sphere). sigma is derived from (sigma_bar, epsilon) with the
/// solution-norm upper bound R_rho standing in for the unknown |s_cu|.
struct Perturbation {
    double sigma_bar = 1.0;   // in (0, 1]
    double epsilon = 1e-2;    // target accuracy
    double delta = 0.1;       // confidence (used by the iteration bound)
    std::uint64_t seed = 0;
};

struct GdConfig {
    double eta = 0.0;          // step size; 0 = maximum allowed
    std::int64_t max_iters = 100000;
    double grad_tol = -1.0;    // < 0 = default 1e-8*(beta+2 rho R_rho)*R_rho
    double init_radius = 0.0;  // x0 = -r b/|b|; 0 = origin
    std::int64_t trace_every = 1;
    std::optional<Perturbation> perturbation;
    double beta = 0.0;         // |A| bound; 0 = estimate (inflated by 1.5)
    bool allow_assumption_violations = false;
};

/// Thrown when eta or init_radius violates the step-size/initialization
/// assumptions and violations were not explicitly allowed.
class AssumptionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Maximum admissible step size: 1/beta for TR, 1/(4(beta + rho R_rho))
/// for the cubic problem.
double default_step_size(const CubicProblem& p, double beta);
double default_step_size(const TrustRegionProblem& p, double beta);

/// x_{t+1} = x_t - eta (A x_t + b + rho |x_t| x_t), one matvec per step.
/// With cfg.perturbation set, iterates on the perturbed b but the trace
/// records the objective of the *original* problem.
SolveReport solve_cubic(const CubicProblem& p, const GdConfig& cfg);

/// Projected iteration x_{t+1} = Pi_R(x_t - eta (A x_t + b)); grad_norm
/// traces the gradient-mapping norm |x - T_eta(x)|/eta.
SolveReport solve_tr(const TrustRegionProblem& p, const GdConfig& cfg);

/// Iteration bound of the linear/sublinear convergence guarantee:
///   tau_grow     = 6 log(1 + (-lambda_min)_+^2 / (4 rho |b^(1)|))
///   tau_converge = 6 log((beta + 2 rho |s|) |s|^2 / eps)
///   bound = (tau_grow + tau_converge)/eta * min{1/(rho|s| + lambda_min),
///                                               10 |s|^2 / eps}
/// `bound` uses the exact solution norm; `bound_conservative` substitutes
/// R_rho (certified over-estimate when only bounds are known).
struct IterationBound {
    double tau_grow = 0.0;
    double tau_converge = 0.0;
    double bound = 0.0;
    double bound_conservative = 0.0;
};
IterationBound iteration_bound_cubic(const CubicProblem& p, double eta, double epsilon);

/// Returns the perturbed problem and the sigma actually applied:
/// sigma = rho*eps/(beta + 2 rho R_rho) * sigma_bar/12.
std::pair<CubicProblem, double> perturb_problem(const CubicProblem& p, double beta,
                                                double epsilon, double sigma_bar,
                                                std::uint64_t seed);

/// High-probability iteration bound for perturbed gradient descent
/// (reaching f <= f* + (1+sigma_bar) eps with probability >= 1-delta).
double perturbed_iteration_bound_cubic(const CubicProblem& p, double eta,
                                       double epsilon, double sigma_bar,
                                       double delta);

/// Resolved beta: cfg.beta when positive, else 1.5 * estimate_op_norm
/// (exact spectral value when meta is present).
double resolve_beta(const CubicProblem& p, const GdConfig& cfg);
double resolve_beta(const TrustRegionProblem& p, const GdConfig& cfg);

}  // namespace subquad::gd
