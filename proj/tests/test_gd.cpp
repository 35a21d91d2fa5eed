#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subquad/gd.hpp"
#include "subquad/reference_solve.hpp"
#include "subquad/rng.hpp"

#include <cmath>

using namespace subquad;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

// Figure-style instance: lambda^(1) = -0.2, the rest equispaced on
// [-0.18, 1], b proportional to [0.01, 1, ..., 1] with the given norm.
CubicProblem figure_instance(Index d, double b_norm) {
    Vector diag(d), b(d);
    diag(0) = -0.2;
    b(0) = 0.01;
    for (Index i = 1; i < d; ++i) {
        diag(i) = -0.18 + (1.0 - (-0.18)) * static_cast<double>(i - 1) /
                              static_cast<double>(d - 2);
        b(i) = 1.0;
    }
    b *= b_norm / b.norm();
    return make_cubic_diagonal(diag, b, 0.2);
}

CubicProblem random_diag_cubic(Index d, Rng& rng) {
    Vector diag(d), b(d);
    for (Index i = 0; i < d; ++i) {
        diag(i) = rng.uniform(-1.0, 1.0);
        b(i) = rng.gaussian();
    }
    return make_cubic_diagonal(diag, b, 0.2 + rng.uniform());
}

}  // namespace

TEST_CASE("default_step_size formulas") {
    TrustRegionProblem tr = make_tr_diagonal(vec({1.0}), vec({1.0}), 1.0);
    CHECK(gd::default_step_size(tr, 1.0) == doctest::Approx(1.0));

    // beta=1, rho=1, |b|=2 -> R_rho = 2 -> eta = 1/12.
    CubicProblem p = make_cubic_diagonal(vec({0.5, 0.5}), vec({2.0, 0.0}), 1.0);
    CHECK(gd::default_step_size(p, 1.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));

    // b = 0: R_rho = beta/rho, so eta = 1/(8 beta).
    CubicProblem z = make_cubic_diagonal(vec({1.0, 2.0}), vec({0.0, 0.0}), 2.0);
    CHECK(gd::default_step_size(z, 2.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
}

TEST_CASE("gd solve_cubic: 1-d analytic instance") {
    CubicProblem p = make_cubic_diagonal(vec({1.0}), vec({-1.0}), 2.0);
    gd::GdConfig cfg;
    cfg.eta = 0.1;  // slightly above the Assumption 3.2 maximum of 1/12
    cfg.allow_assumption_violations = true;
    cfg.grad_tol = 1e-10;
    cfg.max_iters = 10000;
    const SolveReport rep = gd::solve_cubic(p, cfg);
    CHECK(rep.status == Status::Converged);
    CHECK(rep.x(0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(rep.f_final == doctest::Approx(-7.0 / 24.0).epsilon(1e-10));
}

TEST_CASE("gd solve_cubic matches the oracle") {
    CubicProblem p = make_cubic_diagonal(vec({-1.0, 1.0}), vec({0.5, 1.0}), 1.0);
    gd::GdConfig cfg;
    cfg.grad_tol = 1e-12;
    cfg.max_iters = 200000;
    const SolveReport rep = gd::solve_cubic(p, cfg);
    const ReferenceSolution sol = reference_solve(p);
    CHECK((rep.x - sol.x).norm() <= 1e-6);
}

TEST_CASE("gd solve_tr examples") {
    TrustRegionProblem p = make_tr_diagonal(vec({2.0}), vec({-4.0}), 1.0);
    gd::GdConfig cfg;
    cfg.eta = 0.5;
    cfg.max_iters = 2000;
    cfg.grad_tol = 1e-12;
    const SolveReport rep = gd::solve_tr(p, cfg);
    CHECK(rep.x(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.lambda == doctest::Approx(2.0).epsilon(1e-6));

    TrustRegionProblem q = make_tr_diagonal(vec({2.0, 4.0}), vec({-2.0, 0.0}), 10.0);
    gd::GdConfig cq;
    cq.grad_tol = 1e-11;
    cq.max_iters = 5000;
    const SolveReport rq = gd::solve_tr(q, cq);
    CHECK((rq.x - vec({1.0, 0.0})).norm() <= 1e-8);
    CHECK(rq.lambda == 0.0);  // interior
    CHECK(rq.trace.back().grad_norm <= 1e-11);

    // Random indefinite instance against the oracle.
    Rng rng(3);
    Vector diag(4), b(4);
    for (Index i = 0; i < 4; ++i) {
        diag(i) = rng.uniform(-1.0, 1.0);
        b(i) = rng.gaussian();
    }
    TrustRegionProblem r = make_tr_diagonal(diag, b, 1.5);
    gd::GdConfig cr;
    cr.grad_tol = 1e-12;
    cr.max_iters = 500000;
    const SolveReport rr = gd::solve_tr(r, cr);
    const ReferenceSolution sol = reference_solve(r);
    CHECK((rr.x - sol.x).norm() <= 1e-6);
}

TEST_CASE("gd assumption validation") {
    CubicProblem p = make_cubic_diagonal(vec({1.0}), vec({-1.0}), 2.0);
    gd::GdConfig cfg;
    cfg.eta = 10.0;  // way above 1/(4(beta + rho R_rho))
    CHECK_THROWS_AS(gd::solve_cubic(p, cfg), gd::AssumptionError);
    cfg.allow_assumption_violations = true;
    cfg.max_iters = 50;
    const SolveReport rep = gd::solve_cubic(p, cfg);  // blows up, flagged
    CHECK(rep.status == Status::Diverged);

    gd::GdConfig bad_init;
    bad_init.init_radius = 1e6;
    CHECK_THROWS_AS(gd::solve_cubic(p, bad_init), gd::AssumptionError);
}

TEST_CASE("figure-style run: monotone objective, linear convergence") {
    CubicProblem p = figure_instance(1000, 1.0);
    gd::GdConfig cfg;
    cfg.eta = 0.1;
    cfg.max_iters = 20000;
    cfg.grad_tol = 1e-10;
    const SolveReport rep = gd::solve_cubic(p, cfg);
    CHECK(rep.status == Status::Converged);
    for (size_t i = 1; i < rep.trace.size(); ++i) {
        CHECK(rep.trace[i].f <= rep.trace[i - 1].f + 1e-12);
        CHECK(rep.trace[i].x_norm >= rep.trace[i - 1].x_norm - 1e-12);
    }
    const ReferenceSolution sol = reference_solve(p);
    CHECK(rep.f_final - sol.f <= 1e-8);
}

TEST_CASE("figure-style run: small |b| stalls with non-monotone gradient") {
    CubicProblem p = figure_instance(1000, 0.1);
    gd::GdConfig cfg;
    cfg.eta = 0.1;
    cfg.max_iters = 400000;
    cfg.grad_tol = 1e-10;
    cfg.trace_every = 200;
    const SolveReport rep = gd::solve_cubic(p, cfg);

    double max_rise = 0.0;
    for (size_t i = 1; i < rep.trace.size(); ++i) {
        max_rise = std::max(max_rise,
                            rep.trace[i].grad_norm - rep.trace[i - 1].grad_norm);
        CHECK(rep.trace[i].f <= rep.trace[i - 1].f + 1e-12);  // f still monotone
    }
    CHECK(max_rise > 1e-6);  // gradient norm rises while escaping the saddle
}

TEST_CASE("structure properties over random instances") {
    Rng rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const Index d = 10;
        CubicProblem p = random_diag_cubic(d, rng);
        const double beta = std::max(std::abs(p.meta->lambda_min()),
                                     std::abs(p.meta->lambda_max()));
        const RadiusBounds rb = radius_bounds(p, beta);

        gd::GdConfig cfg;
        cfg.beta = beta;
        cfg.max_iters = 500;
        cfg.grad_tol = 0.0;
        if (trial % 3 == 0) cfg.init_radius = rb.cauchy;  // Cauchy-point init

        const SolveReport rep = gd::solve_cubic(p, cfg);
        REQUIRE(rep.trace.size() >= 10);  // may stall to fixpoint early
        for (size_t i = 1; i < rep.trace.size(); ++i) {
            CHECK(rep.trace[i].f <= rep.trace[i - 1].f + 1e-12);
            CHECK(rep.trace[i].x_norm >= rep.trace[i - 1].x_norm - 1e-12);
            CHECK(rep.trace[i].x_norm <= rb.upper + 1e-12);
        }
        // Sign structure in the eigenbasis (diagonal A: coordinates).
        CHECK((rep.x.array() * p.b.array()).maxCoeff() <= 1e-12);
        CHECK(rep.x.dot(p.b) <= 1e-12);
    }
}

TEST_CASE("iteration_bound_cubic formulas") {
    // lambda_min >= 0 -> tau_grow = 0.
    CubicProblem conv = make_cubic_diagonal(vec({0.5, 1.0}), vec({1.0, 1.0}), 1.0);
    const auto bc = gd::iteration_bound_cubic(conv, 0.1, 1e-4);
    CHECK(bc.tau_grow == 0.0);

    // lambda_min=-0.2, rho=0.2, |b^(1)|=0.05 -> tau_grow = 6 log 2.
    CubicProblem p = make_cubic_diagonal(vec({-0.2, 1.0}), vec({0.05, 1.0}), 0.2);
    const auto bp = gd::iteration_bound_cubic(p, 0.1, 1e-4);
    CHECK(bp.tau_grow == doctest::Approx(6.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(bp.bound_conservative >= bp.bound);

    // Hard case rejected.
    CubicProblem h = make_cubic_diagonal(vec({-0.2, 1.0}), vec({0.0, 1.0}), 0.2);
    CHECK_THROWS_AS(gd::iteration_bound_cubic(h, 0.1, 1e-4), HardCaseError);
}

TEST_CASE("empirical convergence within the theorem bound") {
    CubicProblem p = figure_instance(200, 1.0);
    const double eps = 1e-4;
    gd::GdConfig cfg;
    cfg.eta = 0.1;
    const auto ib = gd::iteration_bound_cubic(p, cfg.eta, eps);
    const ReferenceSolution sol = reference_solve(p);

    cfg.max_iters = static_cast<std::int64_t>(std::ceil(ib.bound));
    cfg.grad_tol = 1e-13;
    cfg.trace_every = cfg.max_iters;  // only endpoints
    const SolveReport rep = gd::solve_cubic(p, cfg);
    CHECK(rep.f_final - sol.f <= eps);
}

TEST_CASE("perturb_problem: sigma formula and exact displacement") {
    // sigma_bar=1, beta=1, rho=1, |b|=2 (R_rho=2), eps=0.12 -> sigma=0.002.
    CubicProblem p = make_cubic_diagonal(vec({0.5, 0.5}), vec({2.0, 0.0}), 1.0);
    const auto [pp, sigma] = gd::perturb_problem(p, 1.0, 0.12, 1.0, 7);
    CHECK(sigma == doctest::Approx(0.002).epsilon(1e-14));
    CHECK((pp.b - p.b).norm() == doctest::Approx(sigma).epsilon(1e-12));
    CHECK_FALSE(pp.info.has_value());

    CHECK_THROWS_AS(gd::perturb_problem(p, 1.0, 0.12, 1.5, 7), std::invalid_argument);
}

TEST_CASE("perturbed gd escapes the hard case, plain gd does not") {
    // 2-d hard case: b^(1) = 0, lambda* = -lambda_min = 0.5.
    const double rho = 0.25;
    CubicProblem p = make_cubic_diagonal(vec({-0.5, 0.5}), vec({0.0, 0.3}), rho);
    const ReferenceSolution sol = reference_solve(p);
    REQUIRE(sol.hard_case);
    const double f_star = sol.f;
    const double eps = 1e-2;
    const double sigma_bar = 1.0;

    gd::GdConfig plain;
    plain.max_iters = 2000000;
    plain.trace_every = 1000;
    const SolveReport rp = gd::solve_cubic(p, plain);
    CHECK(rp.f_final > f_star + eps);  // cannot see v_min
    CHECK(rp.x(0) == 0.0);             // stays exactly in the subspace

    gd::GdConfig pert = plain;
    pert.perturbation = gd::Perturbation{sigma_bar, eps, 0.1, 123};
    pert.grad_tol = 1e-12;
    const SolveReport rq = gd::solve_cubic(p, pert);
    CHECK(rq.f_final <= f_star + (1.0 + sigma_bar) * eps);
}
