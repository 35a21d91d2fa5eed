#pragma once

#include "subquad/types.hpp"

#include <stdexcept>

namespace subquad::krylov {

class ReducedSolveError : public std::runtime_error {
  public:
    ReducedSolveError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi) {}
    double bracket_lo;
    double bracket_hi;
};

struct ReducedConstraint {
    enum class Kind { Rho, Radius } kind;
    double value;  // rho or R
    static ReducedConstraint rho(double r) { return {Kind::Rho, r}; }
    static ReducedConstraint radius(double R) { return {Kind::Radius, R}; }
};

struct ReducedOptions {
    double newton_tol = 1e-12;
    int max_newton_solves = 25;
    double warm_lambda = -1.0;  // < 0: no warm start
};

struct ReducedSolution {
    Vector y;
    double lambda = 0.0;
    int newton_solves = 0;
    bool hard_case = false;
    double lambda_min = 0.0;  // smallest eigenvalue of T
};

/// Global minimizer of the reduced subproblem
///   min_y 1/2 y'Ty + br'y + (rho/3)|y|^3      (Kind::Rho)
///   min_y 1/2 y'Ty + br'y  s.t. |y| <= R      (Kind::Radius)
/// for symmetric banded T. Safeguarded Newton on the reformulated secular
/// equation 1/|y(lambda)| = rho/lambda (resp. 1/R), bracketing in
/// [(-lambda_min(T))_+, lambda_hi]; Newton iterates leaving the bracket
/// fall back to bisection. Warm starts come from the caller.
ReducedSolution solve_reduced(Eigen::Ref<const Matrix> T, int bandwidth, const Vector& br,
                              const ReducedConstraint& constraint,
                              const ReducedOptions& opts = {});

}  // namespace subquad::krylov
