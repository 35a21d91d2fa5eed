#include "subquad/krylov.hpp"

#include "subquad/lanczos.hpp"
#include "subquad/rng.hpp"

#include <cmath>
#include <limits>

namespace subquad::krylov {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr std::int64_t kStoreEntryCap = 200000000;  // 2e8 basis entries

struct ProblemFacts {
    const OperatorPtr& A;
    const Vector& b;
    ReducedConstraint constraint;
    double rho;  // 0 for TR
    const std::optional<SpectrumMeta>& meta;
    const std::optional<InstanceInfo>& info;
};

ProblemFacts facts_of(const CubicProblem& p) {
    return {p.A, p.b, ReducedConstraint::rho(p.rho), p.rho, p.meta, p.info};
}

ProblemFacts facts_of(const TrustRegionProblem& p) {
    return {p.A, p.b, ReducedConstraint::radius(p.radius), 0.0, p.meta, p.info};
}

double reduced_objective(Eigen::Ref<const Matrix> T, const Vector& br,
                         const Vector& y, double rho) {
    double f = 0.5 * y.dot(T * y) + br.dot(y);
    if (rho > 0.0) f += (rho / 3.0) * std::pow(y.norm(), 3);
    return f;
}

// Reruns the recursion (no reorthogonalization) accumulating x = Q y.
// Returns the lifted vector and the matvecs the second pass consumed.
std::pair<Vector, std::int64_t> two_pass_lift(const LinearOperator& A,
                                              const std::vector<Vector>& starts,
                                              int steps, const Vector& y,
                                              double breakdown_tol) {
    LanczosFactorization fact(A.dim(), breakdown_tol, false, false);
    fact.initialize(starts);
    Vector x = Vector::Zero(A.dim());
    std::int64_t mv = 0;
    auto accumulate = [&] {
        const Index c0 = fact.current_block_start();
        const Index m = fact.current_block().cols();
        if (c0 >= y.size()) return;
        const Index take = std::min<Index>(m, y.size() - c0);
        x.noalias() += fact.current_block().leftCols(take) * y.segment(c0, take);
    };
    accumulate();
    for (int s = 0; s < steps && !fact.breakdown(); ++s) {
        mv += fact.block_size();
        fact.extend(A);
        if (!fact.breakdown()) accumulate();
    }
    return {std::move(x), mv};
}

template <typename Problem>
SolveReport run_krylov(const Problem& p, const KrylovConfig& cfg,
                       std::vector<Vector> starts, std::int64_t extra_matvecs) {
    if (cfg.max_dim < 1)
        throw std::invalid_argument("krylov: max_dim must be at least 1");
    const ProblemFacts pf = facts_of(p);
    const Index d = p.dim();

    const Index m0 = static_cast<Index>(starts.size());
    const bool store = cfg.store_basis.value_or(
        cfg.reorthogonalize ||
        static_cast<std::int64_t>(std::min(d, m0 * (cfg.max_dim + 1))) * d <= kStoreEntryCap);

    LanczosFactorization fact(d, cfg.breakdown_tol, cfg.reorthogonalize, store,
                              std::min(d, m0 * (cfg.max_dim + 1)));
    fact.initialize(starts);

    const double f_star = (pf.info && pf.info->f_star) ? *pf.info->f_star : kNan;

    ReducedOptions ropts;
    ropts.newton_tol = cfg.newton_tol;
    ropts.max_newton_solves = cfg.max_newton_solves;

    SolveReport rep;
    rep.status = Status::MaxIters;

    Vector y;
    double lambda = -1.0;
    std::int64_t mv = extra_matvecs;
    const Index max_steps = std::min<Index>(cfg.max_dim, d);

    for (Index step = 1; step <= max_steps; ++step) {
        const std::int64_t applied = fact.block_size();
        fact.extend(*pf.A);
        mv += applied;

        const bool last = fact.breakdown() || step == max_steps;
        if (step % cfg.solve_cadence != 0 && !last) continue;

        ropts.warm_lambda = lambda;
        const Vector br = fact.reduced_coords(pf.b);
        ReducedSolution rsol =
            solve_reduced(fact.reduced(), fact.bandwidth(), br, pf.constraint, ropts);
        y = std::move(rsol.y);
        lambda = rsol.lambda;

        const double f = reduced_objective(fact.reduced(), br, y, pf.rho);
        const double grad_norm = fact.residual_norm(y);
        const double gap = f - f_star;

        if (step % cfg.trace_every == 0 || last)
            rep.trace.push_back({step, mv, f, gap, grad_norm, y.norm(),
                                 rsol.newton_solves});

        if (fact.breakdown()) {
            rep.status = Status::Converged;  // invariant subspace: exact solve
            break;
        }
        if (cfg.stop_grad_tol > 0.0 && grad_norm <= cfg.stop_grad_tol) {
            rep.status = Status::Converged;
            break;
        }
        if (cfg.stop_gap_tol > 0.0 && !std::isnan(gap) && gap <= cfg.stop_gap_tol) {
            rep.status = Status::Converged;
            break;
        }
    }

    if (fact.stores_basis()) {
        rep.x = fact.lift(y);
    } else {
        auto [lifted, second_pass_mv] =
            two_pass_lift(*pf.A, starts, fact.steps(), y, cfg.breakdown_tol);
        rep.x = std::move(lifted);
        mv += second_pass_mv;
    }
    rep.lambda = lambda;

    if (cfg.compute_kkt) {
        // True objective and KKT residuals at the lifted point (one matvec).
        const Vector Ax = pf.A->apply(rep.x);
        mv += 1;
        const double xn = rep.x.norm();
        rep.f_final = 0.5 * rep.x.dot(Ax) + pf.b.dot(rep.x);
        if (pf.rho > 0.0) rep.f_final += (pf.rho / 3.0) * xn * xn * xn;

        KktReport kkt;
        kkt.lambda = pf.rho > 0.0 ? pf.rho * xn : lambda;
        kkt.stationarity_residual = (Ax + pf.b + kkt.lambda * rep.x).norm();
        kkt.complementarity_residual =
            pf.rho > 0.0 ? 0.0 : std::abs(kkt.lambda * (pf.constraint.value - xn));
        if (pf.meta) {
            kkt.lambda_min = pf.meta->lambda_min();
            kkt.min_eig_is_estimate = false;
        } else {
            // Diagnostic only; power-iteration matvecs not charged to the solve.
            const double beta = 1.5 * estimate_op_norm(*pf.A);
            kkt.lambda_min = estimate_min_eig(*pf.A, beta);
            kkt.min_eig_is_estimate = true;
        }
        kkt.min_eig_slack = kkt.lambda - std::max(-kkt.lambda_min, 0.0);
        rep.kkt = kkt;
    } else {
        rep.f_final = rep.trace.empty() ? 0.0 : rep.trace.back().f;
    }
    rep.matvecs = mv;
    return rep;
}

template <typename Problem>
SolveReport run_plain(const Problem& p, const KrylovConfig& cfg) {
    if (p.b.norm() == 0.0)
        throw HardCaseError("krylov: b = 0; use the joint-subspace solver");
    return run_krylov(p, cfg, {p.b}, 0);
}

template <typename Problem>
SolveReport run_joint(const Problem& p, const KrylovConfig& cfg) {
    if (!cfg.joint_seed)
        throw std::invalid_argument("krylov::solve_joint: joint_seed required");
    Rng rng(*cfg.joint_seed);
    Vector u = rng.unit_sphere(p.dim());
    std::vector<Vector> starts;
    if (p.b.norm() > 0.0) starts.push_back(p.b);
    starts.push_back(std::move(u));
    return run_krylov(p, cfg, std::move(starts), 0);
}

}  // namespace

SolveReport solve_cubic(const CubicProblem& p, const KrylovConfig& cfg) {
    return run_plain(p, cfg);
}

SolveReport solve_tr(const TrustRegionProblem& p, const KrylovConfig& cfg) {
    return run_plain(p, cfg);
}

SolveReport solve_joint(const CubicProblem& p, const KrylovConfig& cfg) {
    return run_joint(p, cfg);
}

SolveReport solve_joint(const TrustRegionProblem& p, const KrylovConfig& cfg) {
    return run_joint(p, cfg);
}

GapBound gap_bound(BoundKind kind, const GapBoundParams& prm) {
    GapBound out;
    switch (kind) {
        case BoundKind::Linear: {
            const double num = prm.lambda_min + prm.lambda_star;
            const double den = prm.lambda_max + prm.lambda_star;
            if (num <= 0.0 || den <= 0.0) {
                out.value = std::numeric_limits<double>::infinity();
                out.hard_case = true;
                return out;
            }
            out.value = 36.0 * prm.f0_gap * std::exp(-4.0 * prm.t * std::sqrt(num / den));
            return out;
        }
        case BoundKind::Sublinear: {
            double bracket = 4.0;
            if (prm.lambda_min < 0.0) {
                if (prm.b1 == 0.0) {
                    out.value = std::numeric_limits<double>::infinity();
                    out.hard_case = true;
                    return out;
                }
                const double l = std::log(4.0 * prm.b_norm * prm.b_norm / (prm.b1 * prm.b1));
                bracket += l * l / 8.0;
            }
            const double tm = prm.t - 0.5;
            out.value = (prm.lambda_max - prm.lambda_min) * prm.sol_norm * prm.sol_norm /
                        (tm * tm) * bracket;
            return out;
        }
        case BoundKind::SublinearJoint: {
            double bracket = 4.0;
            if (prm.lambda_min < 0.0) {
                const double l = std::log(4.0 * prm.dim / (prm.delta * prm.delta));
                bracket += l * l / 2.0;
            }
            out.value = (prm.lambda_max - prm.lambda_min) * prm.sol_norm * prm.sol_norm /
                        (prm.t * prm.t) * bracket;
            return out;
        }
    }
    return out;
}

}  // namespace subquad::krylov
