#pragma once

#include "subquad/problem.hpp"

#include <stdexcept>

namespace subquad {

/// Thrown when the secular bisection fails to bracket or converge.
class ReferenceSolveError : public std::runtime_error {
  public:
    ReferenceSolveError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi) {}
    double bracket_lo;
    double bracket_hi;
};

struct ReferenceSolution {
    Vector x;
    double lambda = 0.0;
    double f = 0.0;
    bool hard_case = false;
    KktReport kkt;
};

/// Dense/diagonal brute-force oracle. Works in the eigenbasis and solves
/// the secular equation by bisection:
///   cubic: find lambda >= (-lambda_min)_+ with rho*|x(lambda)| = lambda,
///   TR:    |x(lambda)| = R unless the solution is interior,
/// where x(lambda)^(i) = -b^(i)/(eig_i + lambda). The hard case (residual
/// negative at the left endpoint, which requires b^(1) = 0) is resolved by
/// adding a v_min component of the magnitude that restores the constraint.
///
/// Dense operators require d <= desk_cap(); diagonal operators are allowed
/// at any dimension (the eigendecomposition is free).
ReferenceSolution reference_solve(const CubicProblem& p);
ReferenceSolution reference_solve(const TrustRegionProblem& p);

}  // namespace subquad
