#pragma once

#include "subquad/problem.hpp"
#include "subquad/reduced_solve.hpp"

#include <optional>

namespace subquad::krylov {

struct KrylovConfig {
    Index max_dim = 256;        // (block) Lanczos steps
    int solve_cadence = 1;      // reduced solve every k steps
    bool reorthogonalize = true;
    double newton_tol = 1e-12;
    int max_newton_solves = 25;     // 100 recommended for hard-case runs
    double breakdown_tol = 1e-12;   // relative to the running |A| scale
    std::optional<std::uint64_t> joint_seed;
    std::int64_t trace_every = 1;
    double stop_grad_tol = 0.0;  // > 0: stop when the lifted residual drops below
    double stop_gap_tol = 0.0;   // > 0: stop when f - f_star drops below (needs f_star)
    bool compute_kkt = true;     // off: skip the final matvec + KKT residuals
    std::optional<bool> store_basis;  // default: keep Q while max_dim*d <= 2e8,
                                      // else lift by a second Lanczos pass
                                      // (requires reorthogonalize = false)
};

/// Per-iteration Krylov subspace solutions: run Lanczos from b, solve the
/// reduced subproblem every solve_cadence steps with a warm-started
/// multiplier, lift the final iterate. Breakdown before max_dim means the
/// subspace is invariant and the reduced solution exact (status Converged).
/// Throws HardCaseError when b = 0 (use solve_joint).
SolveReport solve_cubic(const CubicProblem& p, const KrylovConfig& cfg);
SolveReport solve_tr(const TrustRegionProblem& p, const KrylovConfig& cfg);

/// Joint-subspace randomization: block Lanczos on {b, u} with u uniform on
/// the sphere (u alone when b = 0). Requires cfg.joint_seed.
SolveReport solve_joint(const CubicProblem& p, const KrylovConfig& cfg);
SolveReport solve_joint(const TrustRegionProblem& p, const KrylovConfig& cfg);

/// Optimality-gap bound calculators.
enum class BoundKind {
    Linear,          // 36 [f(0)-f*] exp(-4 t sqrt((lmin+l*)/(lmax+l*)))
    Sublinear,       // (lmax-lmin)|s|^2/(t-1/2)^2 [4 + 1/8 log^2(4|b|^2/b1^2)]
    SublinearJoint,  // (lmax-lmin)|s|^2/t^2 [4 + 1/2 log^2(4d/delta^2)]
};

struct GapBoundParams {
    double t = 0.0;
    double f0_gap = 0.0;       // f(0) - f*        (Linear)
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double lambda_star = 0.0;  // multiplier       (Linear)
    double sol_norm = 0.0;     // |s*|             (Sublinear*)
    double b_norm = 0.0;       // |b|              (Sublinear)
    double b1 = 0.0;           // b^(1)            (Sublinear)
    double dim = 0.0;          // d                (SublinearJoint)
    double delta = 0.0;        // confidence       (SublinearJoint)
};

struct GapBound {
    double value = 0.0;
    bool hard_case = false;  // bound vacuous (infinite)
};

GapBound gap_bound(BoundKind kind, const GapBoundParams& prm);

}  // namespace subquad::krylov
