#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subquad/instances.hpp"
#include "subquad/io_json.hpp"
#include "subquad/kkt.hpp"
#include "subquad/reference_solve.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace subquad;

namespace {

std::string tmp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("finite-kappa generator: normalization and condition number") {
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 1234ULL}) {
        for (double kappa : {100.0, 10000.0}) {
            CubicProblem p = instances::generate_finite_kappa({200, kappa, seed});
            REQUIRE(p.info.has_value());
            const Vector& s = *p.info->solution;

            // f(0) - f(s_cu) = 1 by the scaling of b.
            CHECK(-*p.info->f_star == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(eval_cubic(p, s) == doctest::Approx(*p.info->f_star).epsilon(1e-10));

            // Realized condition number is exactly kappa.
            const double lam_star = p.rho * s.norm();
            const double realized = (p.meta->lambda_max() + lam_star) /
                                    (p.meta->lambda_min() + lam_star);
            CHECK(realized == doctest::Approx(kappa).epsilon(1e-8));
            CHECK(lam_star == doctest::Approx(*p.info->lambda_tr).epsilon(1e-10));

            // Unique-solution regime: lambda_min + rho|s| > 0.
            CHECK(p.meta->lambda_min() + lam_star > 0.0);

            // Stored solution is KKT-certified.
            CHECK(kkt_check(p, s).stationarity_residual <= 1e-8);

            // Oracle agrees with the stored solution.
            const ReferenceSolution sol = reference_solve(p);
            CHECK((sol.x - s).norm() <= 1e-8 * s.norm());
        }
    }
}

TEST_CASE("lambda_tr formula") {
    // kappa=100, lambda_min=-0.5, lambda_max=1 -> (1 + 50)/99.
    CHECK((1.0 - 100.0 * -0.5) / 99.0 == doctest::Approx(0.515151).epsilon(1e-5));
    CubicProblem p = instances::generate_finite_kappa({50, 100.0, 9});
    const double lam_min = p.meta->lambda_min();
    CHECK(*p.info->lambda_tr ==
          doctest::Approx((1.0 - 100.0 * lam_min) / 99.0).epsilon(1e-12));
}

TEST_CASE("hard-case generator: structure, normalization, kkt") {
    for (std::uint64_t seed : {0ULL, 7ULL, 99ULL}) {
        CubicProblem p = instances::generate_hard_case({300, 1e-4, 10.0, seed});
        REQUIRE(p.info.has_value());
        const Vector& s = *p.info->solution;

        CHECK(p.b(0) == 0.0);              // b^(1) = 0 exactly
        CHECK(p.meta->b_eigen(0) == 0.0);  // eigen order puts lambda_min first
        CHECK(p.meta->lambda_min() == -0.5);
        CHECK(p.meta->lambda_max() == 0.5);
        CHECK(-*p.info->f_star == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(p.rho * s.norm() == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(kkt_check(p, s).stationarity_residual <= 1e-8);

        // Interior eigenvalues stay above lambda_min + gap.
        const Vector& diag = *p.A->diagonal_entries();
        for (Index i = 1; i < diag.size(); ++i) CHECK(diag(i) >= -0.5 + 1e-4);
    }
}

TEST_CASE("hard-case generator: tau = 0 has no v_min weight") {
    CubicProblem p = instances::generate_hard_case({40, 1e-3, 0.0, 5});
    CHECK((*p.info->solution)(0) == 0.0);
    CHECK(p.b(0) == 0.0);
    CHECK(-*p.info->f_star == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("generator input validation") {
    CHECK_THROWS_AS(instances::generate_finite_kappa({1, 100.0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(instances::generate_finite_kappa({10, 1.0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(instances::generate_hard_case({10, 0.0, 1.0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(instances::generate_hard_case({10, 1.5, 1.0, 0}),
                    std::invalid_argument);
}

TEST_CASE("determinism: identical spec and seed give identical bytes") {
    const auto a = instances::generate_finite_kappa({64, 100.0, 77});
    const auto b = instances::generate_finite_kappa({64, 100.0, 77});
    const auto c = instances::generate_finite_kappa({64, 100.0, 78});
    CHECK(io::to_json(a) == io::to_json(b));
    CHECK(io::to_json(a) != io::to_json(c));

    const auto h1 = instances::generate_hard_case({64, 1e-4, 10.0, 5});
    const auto h2 = instances::generate_hard_case({64, 1e-4, 10.0, 5});
    CHECK(io::to_json(h1) == io::to_json(h2));
}

TEST_CASE("instance round trip is bit-identical") {
    const CubicProblem p = instances::generate_finite_kappa({32, 1000.0, 3});
    const std::string path = tmp_path("subquad_rt.json");
    io::save_instance(path, p);
    const io::Instance loaded = io::load_instance(path);
    REQUIRE(std::holds_alternative<CubicProblem>(loaded));
    const CubicProblem& q = std::get<CubicProblem>(loaded);

    CHECK(q.rho == p.rho);  // exact
    CHECK(*q.A->diagonal_entries() == *p.A->diagonal_entries());
    CHECK(q.b == p.b);
    CHECK(*q.info->f_star == *p.info->f_star);
    CHECK(*q.info->solution == *p.info->solution);
    CHECK(io::to_json(q) == io::to_json(p));
    std::remove(path.c_str());
}

TEST_CASE("trust-region instances round trip") {
    const CubicProblem c = instances::generate_finite_kappa({16, 50.0, 21});
    const TrustRegionProblem p = instances::to_trust_region(c);
    const std::string path = tmp_path("subquad_tr.json");
    io::save_instance(path, p);
    const io::Instance loaded = io::load_instance(path);
    REQUIRE(std::holds_alternative<TrustRegionProblem>(loaded));
    const TrustRegionProblem& q = std::get<TrustRegionProblem>(loaded);
    CHECK(q.radius == p.radius);
    CHECK(io::to_json(q) == io::to_json(p));
    std::remove(path.c_str());
}

TEST_CASE("truncated file raises a parse error") {
    const CubicProblem p = instances::generate_finite_kappa({8, 10.0, 1});
    const std::string full = io::to_json(p);
    const std::string path = tmp_path("subquad_trunc.json");
    {
        std::ofstream os(path);
        os << full.substr(0, full.size() / 2);
    }
    CHECK_THROWS(io::load_instance(path));
    std::remove(path.c_str());
}

TEST_CASE("hand-written instance file loads and solves") {
    const std::string path = tmp_path("subquad_hand.json");
    {
        std::ofstream os(path);
        os << R"({"kind": "cubic",
                  "matrix": {"diag": [-1.0, 1.0]},
                  "b": [0.5, 1.0],
                  "rho": 1.0})";
    }
    const io::Instance loaded = io::load_instance(path);
    const CubicProblem& p = std::get<CubicProblem>(loaded);
    CHECK_FALSE(p.info.has_value());
    const ReferenceSolution sol = reference_solve(p);
    CHECK(sol.lambda == doctest::Approx(1.380).epsilon(1e-3));
    std::remove(path.c_str());
}

TEST_CASE("dense instances serialize too") {
    Matrix A(2, 2);
    A << 1.0, 0.25, 0.25, -0.5;
    CubicProblem p = make_cubic_dense(A, Vector::Ones(2), 0.3);
    const io::Instance loaded = io::from_json(io::to_json(p));
    const CubicProblem& q = std::get<CubicProblem>(loaded);
    CHECK(*q.A->dense_matrix() == *p.A->dense_matrix());

    auto cb = LinearOperator::callback(
        2, [](const Vector& v, Vector& out) { out = v; });
    CubicProblem m = make_cubic_operator(cb, Vector::Ones(2), 1.0);
    CHECK_THROWS_AS((void)io::to_json(m), std::invalid_argument);
}

TEST_CASE("to_trust_region: equivalent instance via R = |s_cu|") {
    const CubicProblem c = instances::generate_finite_kappa({60, 200.0, 13});
    const TrustRegionProblem t = instances::to_trust_region(c);
    const Vector& s = *c.info->solution;
    CHECK(t.radius == doctest::Approx(s.norm()));

    const ReferenceSolution sol = reference_solve(t);
    CHECK((sol.x - s).norm() <= 1e-7 * s.norm());
    CHECK(sol.lambda == doctest::Approx(c.rho * s.norm()).epsilon(1e-8));
    CHECK(eval_tr(t, s) == doctest::Approx(*t.info->f_star).epsilon(1e-10));
}
