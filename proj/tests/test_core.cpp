#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subquad/kkt.hpp"
#include "subquad/problem.hpp"
#include "subquad/reference_solve.hpp"
#include "subquad/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace subquad;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

Matrix random_symmetric(Index d, Rng& rng) {
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) m(i, j) = rng.gaussian();
    return 0.5 * (m + m.transpose()).eval();
}

CubicProblem random_cubic(Index d, Rng& rng, double rho = 1.0) {
    Vector diag(d), b(d);
    for (Index i = 0; i < d; ++i) {
        diag(i) = rng.uniform(-1.0, 1.0);
        b(i) = rng.gaussian();
    }
    return make_cubic_diagonal(diag, b, rho);
}

}  // namespace

TEST_CASE("operator symmetry and matvec counting") {
    Rng rng(11);
    const Index d = 12;
    auto dense = LinearOperator::dense(random_symmetric(d, rng));
    auto diag = LinearOperator::diagonal(rng.gaussian_vector(d));

    for (auto& op : {dense, diag}) {
        const double scale = estimate_op_norm(*op, 50);
        op->reset_matvec_count();
        for (int k = 0; k < 20; ++k) {
            Vector v = rng.gaussian_vector(d);
            Vector w = rng.gaussian_vector(d);
            const Vector v_copy = v;
            const double lhs = v.dot(op->apply(w));
            const double rhs = w.dot(op->apply(v));
            CHECK(std::abs(lhs - rhs) <= 1e-10 * v.norm() * w.norm() * std::max(scale, 1.0));
            CHECK(v == v_copy);  // apply never mutates the input
        }
        CHECK(op->matvec_count() == 40);
    }
}

TEST_CASE("eval_cubic examples") {
    CubicProblem p = make_cubic_diagonal(vec({1.0}), vec({-1.0}), 2.0);
    CHECK(eval_cubic(p, vec({0.5})) == doctest::Approx(-7.0 / 24.0).epsilon(1e-14));
    CHECK(eval_cubic(p, vec({0.0})) == 0.0);

    Rng rng(2);
    CubicProblem q = random_cubic(7, rng);
    CHECK(eval_cubic(q, Vector::Zero(7)) == 0.0);

    const auto before = q.A->matvec_count();
    eval_cubic(q, Vector::Ones(7));
    CHECK(q.A->matvec_count() == before + 1);  // exactly one application

    CHECK_THROWS_AS(eval_cubic(q, Vector::Ones(3)), std::invalid_argument);
}

TEST_CASE("grad_cubic examples and finite-difference oracle") {
    CubicProblem p = make_cubic_diagonal(vec({1.0}), vec({-1.0}), 2.0);
    CHECK(grad_cubic(p, vec({0.5}))(0) == doctest::Approx(0.0).epsilon(1e-15));

    Rng rng(3);
    CubicProblem q = random_cubic(5, rng);
    CHECK((grad_cubic(q, Vector::Zero(5)) - q.b).norm() == 0.0);

    // Central finite differences of eval_cubic.
    const Vector x = rng.gaussian_vector(5);
    const Vector g = grad_cubic(q, x);
    const double h = 1e-6;
    for (Index i = 0; i < 5; ++i) {
        Vector e = Vector::Zero(5);
        e(i) = h;
        const double fd = (eval_cubic(q, x + e) - eval_cubic(q, x - e)) / (2.0 * h);
        CHECK(g(i) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("trust-region eval/grad/project examples") {
    TrustRegionProblem p = make_tr_diagonal(vec({2.0, 4.0}), vec({-2.0, 0.0}), 1.0);
    CHECK(project(p, vec({3.0, 4.0})).isApprox(vec({0.6, 0.8}), 1e-15));

    TrustRegionProblem q = make_tr_diagonal(vec({2.0, 4.0}), vec({-2.0, 0.0}), 10.0);
    CHECK(project(q, vec({3.0, 4.0})) == vec({3.0, 4.0}));
    CHECK(eval_tr(q, vec({1.0, 0.0})) == doctest::Approx(-1.0));
    CHECK((grad_tr(q, vec({1.0, 0.0})) - vec({0.0, 0.0})).norm() == 0.0);
}

TEST_CASE("radius_bounds formulas and oracle sandwich") {
    // beta=1, rho=1, |b|=2 -> R_rho = 0.5 + 1.5 = 2
    CubicProblem p = make_cubic_diagonal(vec({0.5, 0.5}), vec({2.0, 0.0}), 1.0);
    CHECK(radius_bounds(p, 1.0).upper == doctest::Approx(2.0).epsilon(1e-14));

    // b'Ab = 0 -> R_c = sqrt(|b|/rho) = 1
    CubicProblem q = make_cubic_diagonal(vec({0.0, 1.0}), vec({1.0, 0.0}), 1.0);
    const RadiusBounds rb = radius_bounds(q, 1.0);
    CHECK(rb.cauchy == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(rb.degenerate);

    // b = 0 degenerate: R_c = 0 by convention.
    CubicProblem z = make_cubic_diagonal(vec({1.0, 1.0}), vec({0.0, 0.0}), 1.0);
    const RadiusBounds rbz = radius_bounds(z, 1.0);
    CHECK(rbz.cauchy == 0.0);
    CHECK(rbz.degenerate);

    // Random instances: R_c <= |x*| <= R_rho and R_c >= R_rho - beta/rho.
    Rng rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        CubicProblem r = random_cubic(3, rng, 0.5 + rng.uniform());
        const double beta = std::max(std::abs(r.meta->lambda_min()),
                                     std::abs(r.meta->lambda_max()));
        const RadiusBounds rbr = radius_bounds(r, beta);
        const double sn = reference_solve(r).x.norm();
        CHECK(rbr.cauchy <= sn * (1.0 + 1e-10));
        CHECK(sn <= rbr.upper * (1.0 + 1e-10));
        CHECK(rbr.cauchy >= rbr.upper - beta / r.rho - 1e-10);
    }
}

TEST_CASE("cauchy_point: examples and 1-d grid oracle") {
    CubicProblem q = make_cubic_diagonal(vec({0.0, 1.0}), vec({1.0, 0.0}), 1.0);
    CHECK(cauchy_point(q).isApprox(vec({-1.0, 0.0}), 1e-14));

    CubicProblem z = make_cubic_diagonal(vec({1.0}), vec({0.0}), 1.0);
    CHECK(cauchy_point(z).norm() == 0.0);

    // The Cauchy point beats a 1000-point scan of span(b) and matches the
    // closed-form objective -|b| Rc/2 - rho Rc^3/6.
    Rng rng(23);
    CubicProblem r = random_cubic(3, rng);
    const Vector xc = cauchy_point(r);
    const double fc = eval_cubic(r, xc);
    const double rc = xc.norm();
    CHECK(fc == doctest::Approx(-0.5 * r.b.norm() * rc - r.rho / 6.0 * rc * rc * rc)
                    .epsilon(1e-12));
    const Vector dir = r.b / r.b.norm();
    for (int k = 0; k < 1000; ++k) {
        const double zeta = -3.0 + 6.0 * k / 999.0;
        CHECK(fc <= eval_cubic(r, zeta * dir) + 1e-12);
    }
}

TEST_CASE("kkt_check examples") {
    // Boundary TR optimum: A=[2], b=[-4], R=1, x=[1], lambda=2.
    TrustRegionProblem p = make_tr_diagonal(vec({2.0}), vec({-4.0}), 1.0);
    KktReport r = kkt_check(p, vec({1.0}), 2.0);
    CHECK(r.stationarity_residual == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.complementarity_residual == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.min_eig_slack == doctest::Approx(2.0));  // lambda - 0

    // Interior optimum.
    TrustRegionProblem q = make_tr_diagonal(vec({2.0, 4.0}), vec({-2.0, 0.0}), 10.0);
    KktReport rq = kkt_check(q, vec({1.0, 0.0}), 0.0);
    CHECK(rq.stationarity_residual == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(rq.complementarity_residual == doctest::Approx(0.0).epsilon(1e-14));

    // Oracle self-consistency on a random 4-d cubic instance.
    Rng rng(5);
    CubicProblem c = random_cubic(4, rng);
    const ReferenceSolution sol = reference_solve(c);
    const KktReport rc = kkt_check(c, sol.x);
    CHECK(rc.stationarity_residual <= 1e-8);
    CHECK(rc.min_eig_slack >= -1e-10);
}

TEST_CASE("kkt_check estimates lambda_min without metadata") {
    Rng rng(7);
    const Index d = 20;
    Matrix A = random_symmetric(d, rng);
    auto op = LinearOperator::callback(
        d, [A](const Vector& v, Vector& out) { out.noalias() = A * v; });
    CubicProblem p = make_cubic_operator(op, rng.gaussian_vector(d), 1.0);
    const KktReport r = kkt_check(p, Vector::Zero(d));
    CHECK(r.min_eig_is_estimate);
    Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
    CHECK(r.lambda_min == doctest::Approx(es.eigenvalues()(0)).epsilon(0.05));
}

TEST_CASE("reference_solve: spec instances") {
    // A=diag(-1,1), b=(0.5,1), rho=1: recomputed by the stated bisection.
    CubicProblem p = make_cubic_diagonal(vec({-1.0, 1.0}), vec({0.5, 1.0}), 1.0);
    const ReferenceSolution sol = reference_solve(p);
    CHECK(sol.lambda == doctest::Approx(1.380).epsilon(1e-3));
    CHECK(sol.x(0) == doctest::Approx(-1.316).epsilon(1e-3));
    CHECK(sol.x(1) == doctest::Approx(-0.420).epsilon(1e-3));
    CHECK(sol.kkt.stationarity_residual <= 1e-10);

    // Pure eigenvector hard case: A=[-1], b=[0], R=1.
    TrustRegionProblem t = make_tr_diagonal(vec({-1.0}), vec({0.0}), 1.0);
    const ReferenceSolution st = reference_solve(t);
    CHECK(std::abs(st.x(0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(st.lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(st.f == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(st.hard_case);

    // Convex limit: lambda* -> rho |A^-1 b| and x* -> -(A + lambda* I)^-1 b.
    Vector diag = vec({2.0, 3.0, 5.0});
    Vector b = vec({1.0, -2.0, 0.5});
    const double rho = 1e-6;
    CubicProblem c = make_cubic_diagonal(diag, b, rho);
    const ReferenceSolution sc = reference_solve(c);
    const Vector direct = -(diag.array() + sc.lambda).cwiseInverse().matrix()
                               .cwiseProduct(b);
    CHECK(sc.lambda == doctest::Approx(rho * sc.x.norm()).epsilon(1e-9));
    CHECK((sc.x - direct).norm() <= 1e-9);
}

TEST_CASE("reference_solve: b = 0 degenerate branches") {
    // lambda_min >= 0: solution is the origin.
    CubicProblem p = make_cubic_diagonal(vec({1.0, 2.0}), vec({0.0, 0.0}), 1.0);
    CHECK(reference_solve(p).x.norm() == 0.0);

    // lambda_min < 0: (-lambda_min/rho) v_min.
    CubicProblem q = make_cubic_diagonal(vec({-1.0, 1.0}), vec({0.0, 0.0}), 2.0);
    const ReferenceSolution sq = reference_solve(q);
    CHECK(sq.hard_case);
    CHECK(sq.x.norm() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(sq.x(0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("reference_solve: invalid input reports bracket") {
    Vector b(2);
    b << std::nan(""), 1.0;
    CubicProblem p = make_cubic_diagonal(vec({-1.0, 1.0}), b, 1.0);
    CHECK_THROWS_AS(reference_solve(p), ReferenceSolveError);
}

TEST_CASE("global optimality and the exact decomposition identity") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const Index d = 5;
        CubicProblem p = random_cubic(d, rng, 0.3 + rng.uniform());
        const ReferenceSolution sol = reference_solve(p);
        const double fs = sol.f;
        const double sn = sol.x.norm();
        const Vector diag = *p.A->diagonal_entries();

        for (int k = 0; k < 40; ++k) {
            const Vector x = 3.0 * rng.gaussian_vector(d);
            const double fx = eval_cubic(p, x);
            CHECK(fx >= fs - 1e-10);

            // f(x) - f(s) = 1/2 (x-s)'A*(x-s) + rho/6 (|s|-|x|)^2 (|s|+2|x|)
            const Vector dxe = x - sol.x;
            const double quad =
                0.5 * (diag.array() + p.rho * sn).matrix().cwiseProduct(dxe.cwiseProduct(dxe)).sum();
            const double norms = p.rho / 6.0 * (sn - x.norm()) * (sn - x.norm()) *
                                 (sn + 2.0 * x.norm());
            CHECK(fx - fs == doctest::Approx(quad + norms)
                                 .epsilon(1e-8 * std::max(1.0, std::abs(fx - fs))));
        }
    }
}

TEST_CASE("reference_solve dense matches diagonal") {
    Rng rng(41);
    const Index d = 8;
    Vector diag(d), b(d);
    for (Index i = 0; i < d; ++i) {
        diag(i) = rng.uniform(-1.0, 1.0);
        b(i) = rng.gaussian();
    }
    CubicProblem pd = make_cubic_diagonal(diag, b, 0.7);
    CubicProblem pm = make_cubic_dense(Matrix(diag.asDiagonal()), b, 0.7);
    const ReferenceSolution a = reference_solve(pd);
    const ReferenceSolution c = reference_solve(pm);
    CHECK(a.lambda == doctest::Approx(c.lambda).epsilon(1e-10));
    CHECK((a.x - c.x).norm() <= 1e-9);

    // TR route on the same data.
    TrustRegionProblem td = make_tr_diagonal(diag, b, 0.8);
    const ReferenceSolution st = reference_solve(td);
    CHECK(st.x.norm() == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(st.kkt.stationarity_residual <= 1e-9);
}
