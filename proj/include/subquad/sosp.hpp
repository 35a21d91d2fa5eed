#pragma once

#include "subquad/linear_operator.hpp"
#include "subquad/types.hpp"

#include <functional>
#include <optional>

namespace subquad::sosp {

/// General smooth function accessed through value/gradient/Hessian-vector
/// callbacks. `hvp` may be empty, in which case a forward-difference
/// realization built on the gradient is used.
struct SmoothFunction {
    Index dim = 0;
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    std::function<Vector(const Vector&, const Vector&)> hvp;

    /// Hessian operator at the point y (exact callback or finite-diff).
    OperatorPtr hessian_at(const Vector& y) const;
};

struct SospConfig {
    double beta = 1.0;      // smoothness constant
    double rho = 1.0;       // half the Hessian Lipschitz constant
    double epsilon = 1e-2;  // target accuracy
    double delta = 0.1;     // total failure probability
    std::uint64_t seed = 0;
    std::int64_t max_outer = 0;  // 0 = auto: ceil(12(g(y0)-g_lb)/(rho r^3))+1
                                 // when g_lower_bound given, else 10^6
    std::optional<double> g_lower_bound;
    bool certify = false;  // run verify_sosp on the result (dense, desk scale)
};

struct VerifyRecord {
    double grad_norm = 0.0;
    double min_eig = 0.0;
    double threshold = 0.0;  // sqrt(rho*epsilon)
    bool passed = false;
};

struct InnerCallStats {
    std::int64_t t_inner = 0;     // budgeted block steps
    std::int64_t steps_done = 0;  // actual (breakdown may cut it short)
    std::int64_t hvps = 0;
};

struct SospReport {
    Vector y_final;
    bool converged = false;  // false: max_outer hit (constants misestimated)
    std::int64_t outer_iters = 0;
    std::int64_t value_evals = 0;
    std::int64_t gradient_evals = 0;
    std::int64_t hvp_evals = 0;
    std::vector<InnerCallStats> inner_calls;
    std::int64_t t_fin = 0;
    std::int64_t final_hvps = 0;
    std::vector<double> g_values;  // g(y_0), g(y_1), ...
    std::vector<std::string> warnings;
    std::optional<VerifyRecord> certified;
};

/// Find-SOSP: r = sqrt(eps/(9 rho)); repeatedly take joint-Krylov cubic
/// model steps; when a step fails to decrease g by rho r^3/12, take one
/// final regularized-quadratic corrective step and stop.
SospReport find_sosp(const SmoothFunction& g, const Vector& y0, const SospConfig& cfg);

/// Solve-CR: minimizer of the cubic model over the joint Krylov subspace
/// of order T_inner = ceil(sqrt(24 beta/(rho r) (4 + 1/2 log^2(4d/delta^2)))).
Vector solve_cr_inner(const LinearOperator& A, const Vector& b, double rho,
                      double beta, double r, double delta, std::uint64_t seed,
                      InnerCallStats* stats = nullptr);
std::int64_t t_inner_formula(Index dim, double beta, double rho, double r, double delta);

/// Solve-Quadratic: minimizer of 1/2 x'Ax + b'x + rho r |x|^2 over the
/// order-T_fin Krylov subspace of (A + 2 rho r I, b).
Vector solve_quadratic_final(const LinearOperator& A, const Vector& b, double rho,
                             double beta, double r, double eps_g,
                             InnerCallStats* stats = nullptr);
std::int64_t t_fin_formula(double beta, double rho, double r, double eps_g);

/// Dense verification of the eps-SOSP condition |grad g| <= eps and
/// Hessian >= -sqrt(rho eps) I. Materializes the Hessian through dim hvp
/// calls; requires dim <= desk_cap().
VerifyRecord verify_sosp(const SmoothFunction& g, const Vector& y, double rho,
                         double epsilon);

/// Built-in test functions with valid (beta, rho) on the named region.
struct TestFunction {
    SmoothFunction fn;
    double beta = 0.0;
    double rho = 0.0;
    double g_min = 0.0;
    std::string region;
};

/// g(y) = 1/2 |y|^2 (beta = 1, any rho; minimum 0 at the origin).
TestFunction make_convex_quadratic(Index d);
/// g(y) = 1/4 |y|^4 - 1/2 |y|^2 (beta = 12, rho = 6 on |y| <= 2; strict
/// saddle at the origin, minima on the unit sphere with value -1/4).
TestFunction make_rotational_quartic(Index d);
/// g(y) = sum_i (1/4 y_i^4 - 1/2 y_i^2) (beta = 11, rho = 3 on |y_i| <= 2;
/// 2^d minima at y_i = +-1 with value -d/4).
TestFunction make_separable_quartic(Index d);

}  // namespace subquad::sosp
