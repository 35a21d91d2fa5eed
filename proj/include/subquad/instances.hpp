#pragma once

#include "subquad/problem.hpp"

namespace subquad::instances {

/// Random cubic-regularization ensemble with exact condition number kappa:
/// lambda_max = 1, lambda_min ~ U[-1,-0.1], interior eigenvalues i.i.d.
/// uniform, b scaled so that f(0) - f(s_cu) = 1 and rho chosen so that
/// rho |A_ltr^-1 b| = lambda_tr = (lambda_max - kappa lambda_min)/(kappa-1).
struct FiniteKappaSpec {
    Index d = 2;
    double kappa = 100.0;  // > 1
    std::uint64_t seed = 0;
};

/// kappa = infinity ensemble: lambda in [-0.5, 0.5] with eigen-gap `gap`
/// above lambda_min, b^(1) = 0, and tau weighting the v_min component of
/// the (stored) solution. f(0) - f(s_cu) = 1 by the same scaling.
struct HardCaseSpec {
    Index d = 2;
    double gap = 1e-4;  // in (0, lambda_max - lambda_min)
    double tau = 10.0;  // >= 0
    std::uint64_t seed = 0;
};

CubicProblem generate_finite_kappa(const FiniteKappaSpec& spec);
CubicProblem generate_hard_case(const HardCaseSpec& spec);

/// Equivalent trust-region instance (A, b, R = |s_cu|); requires the
/// stored solution.
TrustRegionProblem to_trust_region(const CubicProblem& p);

}  // namespace subquad::instances
