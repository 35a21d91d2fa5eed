#pragma once

#include "subquad/types.hpp"

namespace subquad::krylov {

/// Helpers for symmetric banded matrices held in dense storage (the
/// reduced operators are t x t with t at most a few hundred, so dense
/// storage is fine; these routines only touch the band).

/// Number of eigenvalues of B strictly below sigma, via banded symmetric
/// elimination with Kahan-style zero-pivot perturbation.
int eigenvalues_below(Eigen::Ref<const Matrix> B, int bandwidth, double sigma);

/// Smallest eigenvalue to absolute tolerance tol (bisection on inertia
/// counts between Gershgorin bounds).
double smallest_eigenvalue(Eigen::Ref<const Matrix> B, int bandwidth, double tol = 1e-14);

/// Banded LDL^T factorization of B + shift*I.
/// Fails (returns false) on a nonpositive pivot, i.e. when the shifted
/// matrix is not positive definite.
class BandedLdlt {
  public:
    bool factor(Eigen::Ref<const Matrix> B, int bandwidth, double shift);
    void solve_in_place(Vector& rhs) const;
    Vector solve(const Vector& rhs) const {
        Vector x = rhs;
        solve_in_place(x);
        return x;
    }

  private:
    Matrix band_;  // band_(r, k) = L(k+r, k) for r >= 1; band_(0, k) = D(k)
    int bw_ = 0;
    Index n_ = 0;
};

}  // namespace subquad::krylov
