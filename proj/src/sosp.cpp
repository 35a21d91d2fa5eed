#include "subquad/sosp.hpp"

#include "subquad/banded.hpp"
#include "subquad/krylov.hpp"
#include "subquad/lanczos.hpp"
#include "subquad/problem.hpp"
#include "subquad/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace subquad::sosp {

OperatorPtr SmoothFunction::hessian_at(const Vector& y) const {
    if (hvp) {
        auto h = hvp;
        Vector point = y;
        return LinearOperator::callback(
            dim, [h, point](const Vector& v, Vector& out) { out = h(point, v); });
    }
    return LinearOperator::finite_diff_hvp(dim, gradient, y);
}

std::int64_t t_inner_formula(Index dim, double beta, double rho, double r,
                             double delta) {
    const double l = std::log(4.0 * static_cast<double>(dim) / (delta * delta));
    return static_cast<std::int64_t>(
        std::ceil(std::sqrt(24.0 * beta / (rho * r) * (4.0 + 0.5 * l * l))));
}

std::int64_t t_fin_formula(double beta, double rho, double r, double eps_g) {
    const double c = beta + 2.0 * rho * r;
    const double t = std::ceil(0.25 * std::sqrt(c / (rho * r)) *
                               std::log(36.0 * c * c * r * r / (eps_g * eps_g)));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(t));
}

Vector solve_cr_inner(const LinearOperator& A, const Vector& b, double rho,
                      double beta, double r, double delta, std::uint64_t seed,
                      InnerCallStats* stats) {
    if (rho <= 0.0 || beta <= 0.0 || r <= 0.0 || delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("solve_cr_inner: parameters out of range");

    const std::int64_t t_inner = t_inner_formula(A.dim(), beta, rho, r, delta);
    // Non-owning handle: the operator outlives the model by construction.
    OperatorPtr op(std::shared_ptr<LinearOperator>(),
                   const_cast<LinearOperator*>(&A));

    CubicProblem model = make_cubic_operator(op, b, rho);
    krylov::KrylovConfig cfg;
    cfg.max_dim = static_cast<Index>(t_inner);
    cfg.joint_seed = seed;
    cfg.compute_kkt = false;
    cfg.trace_every = std::max<std::int64_t>(1, t_inner);  // final row only

    const std::int64_t mv0 = A.matvec_count();
    SolveReport rep = krylov::solve_joint(model, cfg);
    if (stats) {
        stats->t_inner = t_inner;
        stats->steps_done = rep.trace.empty() ? 0 : rep.trace.back().iter;
        stats->hvps = A.matvec_count() - mv0;
    }
    return rep.x;
}

Vector solve_quadratic_final(const LinearOperator& A, const Vector& b, double rho,
                             double beta, double r, double eps_g,
                             InnerCallStats* stats) {
    const std::int64_t t_fin = t_fin_formula(beta, rho, r, eps_g);
    const std::int64_t mv0 = A.matvec_count();
    if (stats) {
        stats->t_inner = t_fin;
        stats->steps_done = 0;
        stats->hvps = 0;
    }
    if (b.norm() == 0.0) return Vector::Zero(A.dim());

    // K_t(A + 2 rho r I, b) = K_t(A, b): run plain Lanczos on A and solve
    // the shifted strongly convex reduced system (T + 2 rho r I) y = -br.
    krylov::LanczosFactorization fact(A.dim(), 1e-12, true);
    fact.initialize({b});
    for (std::int64_t s = 0; s < t_fin && !fact.breakdown(); ++s) fact.extend(A);

    const Index t = fact.tcols();
    Matrix T = fact.reduced();
    Vector br = fact.reduced_coords(b);

    krylov::BandedLdlt ldlt;
    Vector y;
    if (ldlt.factor(T, fact.bandwidth(), 2.0 * rho * r)) {
        y = ldlt.solve(-br);
    } else {
        // Precondition -rho r I <= A violated; fall back to the pivoted
        // dense factorization for the stationary point.
        Matrix shifted = T + 2.0 * rho * r * Matrix::Identity(t, t);
        y = shifted.ldlt().solve(-br);
    }
    if (stats) {
        stats->steps_done = fact.steps();
        stats->hvps = A.matvec_count() - mv0;
    }
    return fact.lift(y);
}

SospReport find_sosp(const SmoothFunction& g, const Vector& y0, const SospConfig& cfg) {
    if (y0.size() != g.dim)
        throw std::invalid_argument("find_sosp: y0 dimension mismatch");

    const double r = std::sqrt(cfg.epsilon / (9.0 * cfg.rho));
    const double progress = cfg.rho * r * r * r / 12.0;

    SospReport rep;
    if (cfg.epsilon > cfg.beta * cfg.beta / cfg.rho)
        rep.warnings.push_back("epsilon exceeds beta^2/rho; Hessian condition trivial");

    double g_prev = g.value(y0);
    ++rep.value_evals;

    if (cfg.g_lower_bound &&
        cfg.epsilon > std::cbrt(cfg.rho) * std::pow(g_prev - *cfg.g_lower_bound, 2.0 / 3.0))
        rep.warnings.push_back("epsilon exceeds rho^(1/3) (g(y0)-g*)^(2/3)");

    std::int64_t max_outer = cfg.max_outer;
    if (max_outer <= 0) {
        max_outer = 1000000;
        if (cfg.g_lower_bound)
            max_outer = static_cast<std::int64_t>(
                            std::ceil(12.0 * (g_prev - *cfg.g_lower_bound) /
                                      (cfg.rho * r * r * r))) +
                        1;
    }

    Vector y = y0;
    rep.g_values.push_back(g_prev);

    for (std::int64_t k = 1; k <= max_outer; ++k) {
        Vector grad = g.gradient(y);
        ++rep.gradient_evals;
        OperatorPtr H = g.hessian_at(y);

        const double delta_k = cfg.delta / (2.0 * static_cast<double>(k) *
                                            static_cast<double>(k));
        const std::uint64_t call_seed = Rng(cfg.seed + 0x517cc1b727220a95ULL *
                                                           static_cast<std::uint64_t>(k))
                                            .next_u64();

        InnerCallStats stats;
        Vector step = solve_cr_inner(*H, grad, cfg.rho, cfg.beta, r, delta_k,
                                     call_seed, &stats);
        rep.inner_calls.push_back(stats);
        rep.hvp_evals += stats.hvps;
        rep.outer_iters = k;

        Vector y_next = y + step;
        const double g_next = g.value(y_next);
        ++rep.value_evals;

        if (g_next > g_prev - progress) {
            InnerCallStats fin_stats;
            Vector fin = solve_quadratic_final(*H, grad, cfg.rho, cfg.beta, r,
                                               2.0 * cfg.epsilon / 3.0, &fin_stats);
            rep.t_fin = fin_stats.t_inner;
            rep.final_hvps = fin_stats.hvps;
            rep.hvp_evals += fin_stats.hvps;
            rep.y_final = y + fin;
            rep.converged = true;
            break;
        }

        y = std::move(y_next);
        g_prev = g_next;
        rep.g_values.push_back(g_prev);
    }

    if (!rep.converged) rep.y_final = y;  // max_outer hit
    if (cfg.certify && rep.y_final.size() > 0)
        rep.certified = verify_sosp(g, rep.y_final, cfg.rho, cfg.epsilon);
    return rep;
}

VerifyRecord verify_sosp(const SmoothFunction& g, const Vector& y, double rho,
                         double epsilon) {
    const Index d = g.dim;
    if (d > desk_cap())
        throw std::invalid_argument("verify_sosp: dimension exceeds desk cap");

    VerifyRecord rec;
    rec.grad_norm = g.gradient(y).norm();
    rec.threshold = std::sqrt(rho * epsilon);

    OperatorPtr H = g.hessian_at(y);
    Matrix Hd(d, d);
    Vector e = Vector::Zero(d);
    for (Index i = 0; i < d; ++i) {
        e(i) = 1.0;
        Hd.col(i) = H->apply(e);
        e(i) = 0.0;
    }
    Hd = 0.5 * (Hd + Hd.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(Hd, Eigen::EigenvaluesOnly);
    rec.min_eig = es.eigenvalues()(0);

    rec.passed = rec.grad_norm <= epsilon &&
                 rec.min_eig >= -rec.threshold - 1e-8 * std::max(1.0, rec.threshold);
    return rec;
}

TestFunction make_convex_quadratic(Index d) {
    TestFunction t;
    t.fn.dim = d;
    t.fn.value = [](const Vector& y) { return 0.5 * y.squaredNorm(); };
    t.fn.gradient = [](const Vector& y) { return y; };
    t.fn.hvp = [](const Vector&, const Vector& v) { return v; };
    t.beta = 1.0;
    t.rho = 1.0;  // any positive value is valid (constant Hessian)
    t.g_min = 0.0;
    t.region = "all of R^d";
    return t;
}

TestFunction make_rotational_quartic(Index d) {
    TestFunction t;
    t.fn.dim = d;
    t.fn.value = [](const Vector& y) {
        const double n2 = y.squaredNorm();
        return 0.25 * n2 * n2 - 0.5 * n2;
    };
    t.fn.gradient = [](const Vector& y) {
        return ((y.squaredNorm() - 1.0) * y).eval();
    };
    t.fn.hvp = [](const Vector& y, const Vector& v) {
        return ((y.squaredNorm() - 1.0) * v + 2.0 * y.dot(v) * y).eval();
    };
    t.beta = 12.0;
    t.rho = 6.0;
    t.g_min = -0.25;
    t.region = "|y| <= 2";
    return t;
}

TestFunction make_separable_quartic(Index d) {
    TestFunction t;
    t.fn.dim = d;
    t.fn.value = [](const Vector& y) {
        return (0.25 * y.array().square().square() - 0.5 * y.array().square()).sum();
    };
    t.fn.gradient = [](const Vector& y) {
        return (y.array().cube() - y.array()).matrix().eval();
    };
    t.fn.hvp = [](const Vector& y, const Vector& v) {
        return ((3.0 * y.array().square() - 1.0) * v.array()).matrix().eval();
    };
    t.beta = 11.0;
    t.rho = 3.0;
    t.g_min = -0.25 * static_cast<double>(d);
    t.region = "|y_i| <= 2";
    return t;
}

}  // namespace subquad::sosp
