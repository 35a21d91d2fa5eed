#include "subquad/reference_solve.hpp"

#include <cmath>
#include <limits>

namespace subquad {

namespace {

constexpr int kMaxBisect = 200;
constexpr double kSecularTol = 1e-12;

struct EigenView {
    Vector eig;    // ascending
    Vector beig;   // b in the eigenbasis
    SpectrumMeta meta;
};

template <typename Problem>
EigenView make_view(const Problem& p) {
    EigenView v;
    if (p.meta) {
        v.meta = *p.meta;
    } else if (const Vector* d = p.A->diagonal_entries()) {
        v.meta = spectrum_from_diagonal(*d, p.b);
    } else if (const Matrix* m = p.A->dense_matrix()) {
        if (m->rows() > desk_cap())
            throw std::invalid_argument(
                "reference_solve: dense operator exceeds desk cap");
        v.meta = spectrum_from_dense(*m, p.b);
    } else {
        throw std::invalid_argument(
            "reference_solve: requires a diagonal or dense operator");
    }
    v.eig = v.meta.eigenvalues;
    v.beig = v.meta.b_eigen;
    return v;
}

// |x(lambda)| with x(lambda)^(i) = -b^(i)/(eig_i + lambda); +inf at poles.
double shifted_solution_norm(const EigenView& v, double lambda) {
    double ss = 0.0;
    for (Index i = 0; i < v.eig.size(); ++i) {
        const double den = v.eig(i) + lambda;
        const double bi = v.beig(i);
        if (bi == 0.0) continue;
        if (den <= 0.0) return std::numeric_limits<double>::infinity();
        const double xi = bi / den;
        ss += xi * xi;
    }
    return std::sqrt(ss);
}

Vector shifted_solution(const EigenView& v, double lambda) {
    Vector y(v.eig.size());
    for (Index i = 0; i < v.eig.size(); ++i) {
        const double den = v.eig(i) + lambda;
        y(i) = (v.beig(i) == 0.0 || den == 0.0) ? 0.0 : -v.beig(i) / den;
    }
    return y;
}

double eigen_objective(const EigenView& v, const Vector& y, double rho) {
    double f = 0.0;
    for (Index i = 0; i < y.size(); ++i)
        f += 0.5 * v.eig(i) * y(i) * y(i) + v.beig(i) * y(i);
    if (rho > 0.0) f += (rho / 3.0) * std::pow(y.norm(), 3);
    return f;
}

KktReport eigen_kkt(const EigenView& v, const Vector& y, double lambda,
                    double comp_residual) {
    KktReport r;
    r.lambda = lambda;
    double ss = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
        const double g = (v.eig(i) + lambda) * y(i) + v.beig(i);
        ss += g * g;
    }
    r.stationarity_residual = std::sqrt(ss);
    r.complementarity_residual = comp_residual;
    r.lambda_min = v.eig(0);
    r.min_eig_slack = lambda - std::max(-v.eig(0), 0.0);
    r.min_eig_is_estimate = false;
    return r;
}

// Root of the decreasing function phi on [lo, hi]; phi(lo) >= 0 >= phi(hi).
template <typename Fn>
double bisect(Fn phi, double lo, double hi, double tol_scale) {
    double flo = phi(lo);
    double fhi = phi(hi);
    if (std::isnan(flo) || std::isnan(fhi) || flo < 0.0 || fhi > 0.0)
        throw ReferenceSolveError("reference_solve: bisection bracket invalid", lo, hi);
    double mid = lo;
    for (int it = 0; it < kMaxBisect; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = phi(mid);
        if (std::isnan(fm))
            throw ReferenceSolveError("reference_solve: NaN secular residual", lo, hi);
        if (std::abs(fm) <= kSecularTol * tol_scale) return mid;
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi))
            return 0.5 * (lo + hi);  // lambda resolved to machine precision
    }
    throw ReferenceSolveError("reference_solve: bisection did not converge", lo, hi);
}

ReferenceSolution finish(const EigenView& v, const Vector& y, double lambda,
                         bool hard, double comp, double rho) {
    ReferenceSolution sol;
    sol.x = v.meta.from_eigen(y);
    sol.lambda = lambda;
    sol.f = eigen_objective(v, y, rho);
    sol.hard_case = hard;
    sol.kkt = eigen_kkt(v, y, lambda, comp);
    return sol;
}

}  // namespace

ReferenceSolution reference_solve(const CubicProblem& p) {
    const EigenView v = make_view(p);
    const double lam_min = v.eig(0);
    const double lam_lo = std::max(-lam_min, 0.0);
    const double rho = p.rho;

    auto phi = [&](double lam) { return rho * shifted_solution_norm(v, lam) - lam; };

    const double scale = std::max({1.0, std::abs(lam_min), std::abs(v.eig(v.eig.size() - 1))});
    const double probe = lam_lo + 1e-14 * scale;

    if (phi(probe) < 0.0) {
        // Hard case: no root to the right of the left endpoint. Requires
        // b^(1) = 0; pin lambda = (-lambda_min)_+ and add a v_min component
        // to restore rho*|x| = lambda.
        const double lambda = lam_lo;
        Vector y = shifted_solution(v, lambda);
        const double target = lambda / rho;
        const double c2 = target * target - y.squaredNorm();
        y(0) += std::sqrt(std::max(c2, 0.0));
        return finish(v, y, lambda, true, 0.0, rho);
    }

    // Standard case: bracket upper end from the solution-norm bound
    // R_rho = beta/(2 rho) + sqrt((beta/(2 rho))^2 + |b|/rho).
    const double beta = std::max(std::abs(lam_min), std::abs(v.eig(v.eig.size() - 1)));
    const double h = beta / (2.0 * rho);
    const double r_rho = h + std::sqrt(h * h + v.beig.norm() / rho);
    double hi = lam_lo + beta + rho * r_rho;
    for (int k = 0; k < 200 && phi(hi) > 0.0; ++k) hi = 2.0 * hi + 1.0;

    const double lambda = bisect(phi, probe, hi, 1.0);
    Vector y = shifted_solution(v, lambda);
    return finish(v, y, lambda, false, 0.0, rho);
}

ReferenceSolution reference_solve(const TrustRegionProblem& p) {
    const EigenView v = make_view(p);
    const double lam_min = v.eig(0);
    const double R = p.radius;

    // Interior solution: A positive semidefinite and |A^+ b| <= R.
    if (lam_min >= 0.0) {
        const double n0 = shifted_solution_norm(v, 0.0);
        if (n0 <= R) {
            Vector y = shifted_solution(v, 0.0);
            return finish(v, y, 0.0, false, 0.0, 0.0);
        }
    }

    auto psi = [&](double lam) { return shifted_solution_norm(v, lam) - R; };

    const double scale = std::max({1.0, std::abs(lam_min), std::abs(v.eig(v.eig.size() - 1))});
    const double lam_lo = std::max(-lam_min, 0.0);
    const double probe = lam_lo + 1e-14 * scale;

    if (psi(probe) < 0.0) {
        // Boundary hard case: lambda = -lambda_min, extend along v_min.
        const double lambda = lam_lo;
        Vector y = shifted_solution(v, lambda);
        const double c2 = R * R - y.squaredNorm();
        y(0) += std::sqrt(std::max(c2, 0.0));
        return finish(v, y, lambda, true, std::abs(lambda * (R - y.norm())), 0.0);
    }

    double hi = lam_lo + v.beig.norm() / R + 1.0;
    for (int k = 0; k < 200 && psi(hi) > 0.0; ++k) hi = 2.0 * hi + 1.0;

    const double lambda = bisect(psi, probe, hi, 1.0);
    Vector y = shifted_solution(v, lambda);
    return finish(v, y, lambda, false, std::abs(lambda * (R - y.norm())), 0.0);
}

}  // namespace subquad
