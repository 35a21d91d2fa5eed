#include "subquad/kkt.hpp"

#include <cmath>

namespace subquad {

namespace {

template <typename Problem>
void fill_min_eig(const Problem& p, KktReport& r) {
    if (p.meta) {
        r.lambda_min = p.meta->lambda_min();
        r.min_eig_is_estimate = false;
    } else {
        const double beta = 1.5 * estimate_op_norm(*p.A);
        r.lambda_min = estimate_min_eig(*p.A, beta);
        r.min_eig_is_estimate = true;
    }
    r.min_eig_slack = r.lambda - std::max(-r.lambda_min, 0.0);
}

}  // namespace

KktReport kkt_check(const CubicProblem& p, const Vector& x) {
    KktReport r;
    r.lambda = p.rho * x.norm();
    r.stationarity_residual = (p.A->apply(x) + p.b + r.lambda * x).norm();
    r.complementarity_residual = 0.0;
    fill_min_eig(p, r);
    return r;
}

KktReport kkt_check(const TrustRegionProblem& p, const Vector& x, double lambda) {
    KktReport r;
    r.lambda = lambda;
    r.stationarity_residual = (p.A->apply(x) + p.b + lambda * x).norm();
    r.complementarity_residual = std::abs(lambda * (p.radius - x.norm()));
    fill_min_eig(p, r);
    return r;
}

}  // namespace subquad
