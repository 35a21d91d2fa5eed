#pragma once

#include "subquad/problem.hpp"

namespace subquad {

/// Residuals of the optimality system for a candidate solution. For the
/// cubic problem the multiplier is rho*|x| and the `lambda` argument is
/// ignored. lambda_min comes from SpectrumMeta when present, otherwise
/// from estimate_min_eig (min_eig_is_estimate is set).
KktReport kkt_check(const CubicProblem& p, const Vector& x);
KktReport kkt_check(const TrustRegionProblem& p, const Vector& x, double lambda);

}  // namespace subquad
