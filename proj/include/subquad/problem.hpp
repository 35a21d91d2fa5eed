#pragma once

#include "subquad/linear_operator.hpp"
#include "subquad/types.hpp"

#include <optional>

namespace subquad {

/// min_x  1/2 x'Ax + b'x + (rho/3) |x|^3
struct CubicProblem {
    OperatorPtr A;
    Vector b;
    double rho = 0.0;
    std::optional<SpectrumMeta> meta;
    std::optional<InstanceInfo> info;

    Index dim() const { return A->dim(); }
};

/// min_x  1/2 x'Ax + b'x   s.t.  |x| <= R
struct TrustRegionProblem {
    OperatorPtr A;
    Vector b;
    double radius = 0.0;
    std::optional<SpectrumMeta> meta;
    std::optional<InstanceInfo> info;

    Index dim() const { return A->dim(); }
};

/// Builders; diagonal problems always carry SpectrumMeta, dense ones carry
/// it when d <= desk_cap() (the eigendecomposition is O(d^3)).
CubicProblem make_cubic_diagonal(Vector diag, Vector b, double rho);
CubicProblem make_cubic_dense(Matrix A, Vector b, double rho);
CubicProblem make_cubic_operator(OperatorPtr A, Vector b, double rho);
TrustRegionProblem make_tr_diagonal(Vector diag, Vector b, double radius);
TrustRegionProblem make_tr_dense(Matrix A, Vector b, double radius);
TrustRegionProblem make_tr_operator(OperatorPtr A, Vector b, double radius);

SpectrumMeta spectrum_from_diagonal(const Vector& diag, const Vector& b);
SpectrumMeta spectrum_from_dense(const Matrix& A, const Vector& b);

double eval_cubic(const CubicProblem& p, const Vector& x);
Vector grad_cubic(const CubicProblem& p, const Vector& x);
double eval_tr(const TrustRegionProblem& p, const Vector& x);
Vector grad_tr(const TrustRegionProblem& p, const Vector& x);
Vector project(const TrustRegionProblem& p, const Vector& x);

/// Objective/gradient when Ax has already been computed (saves the matvec).
double eval_cubic_with_Ax(const CubicProblem& p, const Vector& x, const Vector& Ax);
double eval_tr_with_Ax(const TrustRegionProblem& p, const Vector& x, const Vector& Ax);

/// Solution-norm bounds for the cubic problem:
///   R_rho  = beta/(2 rho) + sqrt((beta/(2 rho))^2 + |b|/rho)  >= |s_cu|
///   R_c    = Cauchy radius (global minimizer norm within span(b)) <= |s_cu|
/// Requires beta >= |A| (caller-supplied estimate). Costs one matvec.
struct RadiusBounds {
    double cauchy = 0.0;  // R_c
    double upper = 0.0;   // R_rho
    bool degenerate = false;  // b = 0: Cauchy radius defined as 0
};
RadiusBounds radius_bounds(const CubicProblem& p, double beta);

/// -R_c * b/|b|; origin when b = 0.
Vector cauchy_point(const CubicProblem& p);

/// Rayleigh-quotient power iteration estimate of |A| (not a certificate).
double estimate_op_norm(const LinearOperator& A, int iters = 100,
                        std::uint64_t seed = 9001);

/// Smallest-eigenvalue estimate via power iteration on beta*I - A.
double estimate_min_eig(const LinearOperator& A, double beta, int iters = 100,
                        std::uint64_t seed = 9001);

}  // namespace subquad
