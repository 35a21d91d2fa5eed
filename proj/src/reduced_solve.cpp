#include "subquad/reduced_solve.hpp"

#include "subquad/banded.hpp"

#include <cmath>
#include <limits>

namespace subquad::krylov {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Root of |y + c w|^2 = t^2 in c (positive branch), for unit w.
double norm_restoring_coefficient(const Vector& y, const Vector& w, double t) {
    const double yw = y.dot(w);
    const double disc = yw * yw + t * t - y.squaredNorm();
    return -yw + std::sqrt(std::max(disc, 0.0));
}

// Unit eigenvector for the smallest eigenvalue, by inverse iteration with
// a slightly shifted positive definite factorization.
Vector min_eigenvector(Eigen::Ref<const Matrix> T, int bw, double lam_min, double scale) {
    const Index n = T.rows();
    BandedLdlt ldlt;
    double mu = std::max(1e-14 * scale, 1e-300);
    while (!ldlt.factor(T, bw, -lam_min + mu)) mu *= 16.0;

    Index k = 0;
    T.diagonal().minCoeff(&k);
    Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    v(k) += 1.0;
    v.normalize();
    for (int it = 0; it < 8; ++it) {
        ldlt.solve_in_place(v);
        v.normalize();
    }
    // Deterministic sign: largest-magnitude entry positive.
    v.cwiseAbs().maxCoeff(&k);
    if (v(k) < 0.0) v = -v;
    return v;
}

}  // namespace

ReducedSolution solve_reduced(Eigen::Ref<const Matrix> T, int bandwidth, const Vector& br,
                              const ReducedConstraint& constraint,
                              const ReducedOptions& opts) {
    const Index n = T.rows();
    if (br.size() != n)
        throw std::invalid_argument("solve_reduced: dimension mismatch");
    const bool cubic = constraint.kind == ReducedConstraint::Kind::Rho;
    const double rho = cubic ? constraint.value : 0.0;
    const double R = cubic ? 0.0 : constraint.value;

    const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
    ReducedSolution sol;
    sol.lambda_min = smallest_eigenvalue(T, bandwidth, 1e-14 * scale);
    const double lam_lo = std::max(-sol.lambda_min, 0.0);

    BandedLdlt ldlt;

    // Fully degenerate: no linear term and T positive semidefinite.
    if (br.norm() == 0.0 && sol.lambda_min >= -1e-300) {
        sol.y = Vector::Zero(n);
        sol.lambda = 0.0;
        return sol;
    }

    // Interior trust-region solution.
    if (!cubic && sol.lambda_min > 0.0) {
        ++sol.newton_solves;
        if (ldlt.factor(T, bandwidth, 0.0)) {
            Vector y = ldlt.solve(-br);
            if (y.norm() <= R) {
                sol.y = std::move(y);
                sol.lambda = 0.0;
                return sol;
            }
        }
    }

    // Norm of y(lambda) = -(T + lambda I)^{-1} br; +inf when the shifted
    // matrix is not positive definite (lambda too small).
    Vector y(n);
    auto eval_norm = [&](double lam) -> double {
        ++sol.newton_solves;
        if (!ldlt.factor(T, bandwidth, lam))
            return std::numeric_limits<double>::infinity();
        y = -br;
        ldlt.solve_in_place(y);
        return y.norm();
    };
    auto target = [&](double lam) { return cubic ? lam / rho : R; };

    const double probe = lam_lo + std::max(1e-14 * scale, 1e-300);
    const double n_probe = eval_norm(probe);

    if (n_probe < target(probe)) {
        // Hard case: pin lambda at the left endpoint and add a v_min
        // component restoring the constraint norm.
        sol.hard_case = true;
        sol.lambda = lam_lo;
        const double t = target(lam_lo);
        // y holds the probe solution, a regularized stand-in for the
        // pseudo-inverse solution at lam_lo.
        const Vector w = min_eigenvector(T, bandwidth, sol.lambda_min, scale);
        sol.y = y + norm_restoring_coefficient(y, w, t) * w;
        return sol;
    }

    // Standard case: root of the decreasing phi(lam) = |y(lam)| - target
    // in [probe, hi].
    double lo = probe;
    double hi;
    if (cubic) {
        // Gershgorin-style over-estimate of |T| keeps the bracket valid.
        const double beta_t = (2.0 * bandwidth + 1.0) * scale;
        const double h = beta_t / (2.0 * rho);
        const double r_rho = h + std::sqrt(h * h + br.norm() / rho);
        hi = lam_lo + beta_t + rho * r_rho;
    } else {
        hi = lam_lo + br.norm() / R + 1.0;
    }

    // Feasible-side record (|y| <= target) for the near-hard-case safeguard.
    double lam_feas = -1.0;
    Vector y_feas;

    for (int expand = 0;; ++expand) {
        if (!std::isfinite(hi) || expand > 200)
            throw ReducedSolveError("solve_reduced: cannot bracket the secular root",
                                    lo, hi);
        if (eval_norm(hi) <= target(hi)) {
            lam_feas = hi;
            y_feas = y;
            break;
        }
        hi = 2.0 * hi + 1.0;
    }

    double lam = opts.warm_lambda >= 0.0
                     ? std::min(std::max(opts.warm_lambda, lo), hi)
                     : std::min(std::max(n_probe * (cubic ? rho : 1.0), lo), hi);
    double best_lam = lam;
    Vector best_y;
    double best_res = std::numeric_limits<double>::infinity();
    bool collapsed = false;

    while (true) {
        const double nn = eval_norm(lam);
        if (std::isfinite(nn)) {
            const double res = std::abs(nn - target(lam));
            if (res < best_res) {
                best_res = res;
                best_lam = lam;
                best_y = y;
            }
            if (res <= opts.newton_tol) break;
            if (nn > target(lam)) {
                lo = lam;
            } else {
                hi = lam;
                lam_feas = lam;
                y_feas = y;
            }
        } else {
            lo = lam;  // factorization failed: lambda below -lambda_min(T)
        }
        if (sol.newton_solves >= opts.max_newton_solves) break;
        if (hi - lo <= 8.0 * kEps * std::max(1.0, hi)) {
            collapsed = true;
            break;
        }

        double next;
        if (std::isfinite(nn) && nn > 0.0) {
            // Newton step on psi(lam) = 1/|y(lam)| - 1/target(lam):
            // d|y|/dlam = -y'(T+lam)^{-1}y / |y|.
            Vector z = ldlt.solve(y);
            const double yz = y.dot(z);
            const double dpsi = yz / (nn * nn * nn) +
                                (cubic ? rho / (lam * lam) : 0.0);
            const double psi = 1.0 / nn - (cubic ? rho / lam : 1.0 / R);
            next = lam - psi / dpsi;
        } else {
            next = 0.5 * (lo + hi);
        }
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        lam = next;
    }

    if ((collapsed || best_y.size() == 0) &&
        best_res > 1e-6 * std::max(1.0, target(best_lam))) {
        // Secular root numerically at the pole (near hard case): pin lambda
        // on the feasible side and restore the norm along the reduced v_min,
        // as in the full hard-case branch.
        if (lam_feas < 0.0)
            throw ReducedSolveError("solve_reduced: bracket collapsed", lo, hi);
        sol.hard_case = true;
        sol.lambda = lam_feas;
        const double t = target(lam_feas);
        const Vector w = min_eigenvector(T, bandwidth, sol.lambda_min, scale);
        sol.y = y_feas + norm_restoring_coefficient(y_feas, w, t) * w;
        return sol;
    }

    sol.lambda = best_lam;
    sol.y = std::move(best_y);
    return sol;
}

}  // namespace subquad::krylov
