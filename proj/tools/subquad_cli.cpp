// subquad command-line front end: instance generation, single solves with
// traces, ensemble benchmarks, and the Find-SOSP driver.

#include "subquad/gd.hpp"
#include "subquad/instances.hpp"
#include "subquad/io_json.hpp"
#include "subquad/krylov.hpp"
#include "subquad/reference_solve.hpp"
#include "subquad/rng.hpp"
#include "subquad/sosp.hpp"
#include "subquad/trace_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace subquad;

namespace {

constexpr int kExitError = 1;
constexpr int kExitHardCase = 2;

struct GenerateArgs {
    std::string kind = "finite-kappa";
    Index d = 1000;
    int n = 1;
    std::uint64_t seed = 0;
    double kappa = 100.0;
    double gap = 1e-4;
    double tau = 10.0;
    std::string out = "instances";
};

int cmd_generate(const GenerateArgs& a) {
    fs::create_directories(a.out);
    json manifest;
    manifest["kind"] = a.kind;
    manifest["d"] = a.d;
    manifest["count"] = a.n;
    json params;
    if (a.kind == "finite-kappa") {
        params["kappa"] = a.kappa;
    } else if (a.kind == "hard-case") {
        params["gap"] = a.gap;
        params["tau"] = a.tau;
    } else {
        std::cerr << "unknown --kind '" << a.kind << "'\n";
        return kExitError;
    }
    manifest["params"] = params;

    json files = json::array();
    json seeds = json::array();
    for (int i = 0; i < a.n; ++i) {
        const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
        char name[64];
        std::snprintf(name, sizeof(name), "instance_%05d.json", i);
        const std::string path = (fs::path(a.out) / name).string();
        if (a.kind == "finite-kappa") {
            io::save_instance(path, instances::generate_finite_kappa({a.d, a.kappa, seed}));
        } else {
            io::save_instance(path, instances::generate_hard_case({a.d, a.gap, a.tau, seed}));
        }
        files.push_back(name);
        seeds.push_back(seed);
    }
    manifest["files"] = files;
    manifest["seeds"] = seeds;
    std::ofstream os(fs::path(a.out) / "manifest.json");
    os << manifest.dump(2) << "\n";
    std::cout << "wrote " << a.n << " instance(s) to " << a.out << "\n";
    return 0;
}

struct SolveArgs {
    std::string instance;
    std::string method = "krylov";
    double eta = 0.0;
    std::int64_t max_iters = 100000;
    Index max_dim = 256;
    int solve_cadence = 1;
    int max_newton = 25;
    double sigma_bar = 1.0;
    double epsilon = 1e-2;
    double delta = 0.1;
    std::uint64_t seed = 0;
    std::int64_t trace_every = 1;
    std::string out = "solve";
    bool allow_hard_case = false;
};

json kkt_to_json(const KktReport& k) {
    return {{"lambda", k.lambda},
            {"stationarity_residual", k.stationarity_residual},
            {"complementarity_residual", k.complementarity_residual},
            {"min_eig_slack", k.min_eig_slack},
            {"lambda_min", k.lambda_min},
            {"min_eig_is_estimate", k.min_eig_is_estimate}};
}

template <typename Problem>
std::optional<double> known_f_star(const Problem& p) {
    if (p.info && p.info->f_star) return *p.info->f_star;
    return std::nullopt;
}

int cmd_solve(const SolveArgs& a) {
    io::Instance inst = io::load_instance(a.instance);
    const bool is_cubic = std::holds_alternative<CubicProblem>(inst);
    const bool plain_method = a.method == "gd" || a.method == "krylov";

    // Plain methods cannot reach the v_min component: refuse known
    // b^(1) = 0 instances unless explicitly allowed.
    if (plain_method && !a.allow_hard_case) {
        const auto& meta = is_cubic ? std::get<CubicProblem>(inst).meta
                                    : std::get<TrustRegionProblem>(inst).meta;
        if (meta && meta->b_eigen(0) == 0.0) {
            std::cerr << "hard case: b^(1) = 0 on this instance; method '" << a.method
                      << "' cannot reach the v_min component.\n"
                      << "use --method krylov-joint or gd-perturbed, or pass "
                         "--allow-hard-case to run anyway.\n";
            return kExitHardCase;
        }
    }

    SolveReport rep;
    bool with_newton = false;
    try {
        if (a.method == "gd" || a.method == "gd-perturbed") {
            gd::GdConfig cfg;
            cfg.eta = a.eta;
            cfg.max_iters = a.max_iters;
            cfg.trace_every = a.trace_every;
            if (a.method == "gd-perturbed") {
                if (!is_cubic) {
                    std::cerr << "gd-perturbed supports cubic instances only\n";
                    return kExitError;
                }
                cfg.perturbation = gd::Perturbation{a.sigma_bar, a.epsilon, a.delta, a.seed};
            }
            rep = is_cubic ? gd::solve_cubic(std::get<CubicProblem>(inst), cfg)
                           : gd::solve_tr(std::get<TrustRegionProblem>(inst), cfg);
        } else if (a.method == "krylov" || a.method == "krylov-joint") {
            krylov::KrylovConfig cfg;
            cfg.max_dim = a.max_dim;
            cfg.solve_cadence = a.solve_cadence;
            cfg.max_newton_solves = a.max_newton;
            cfg.trace_every = a.trace_every;
            with_newton = true;
            if (a.method == "krylov-joint") cfg.joint_seed = a.seed;
            if (a.method == "krylov") {
                rep = is_cubic ? krylov::solve_cubic(std::get<CubicProblem>(inst), cfg)
                               : krylov::solve_tr(std::get<TrustRegionProblem>(inst), cfg);
            } else {
                rep = is_cubic ? krylov::solve_joint(std::get<CubicProblem>(inst), cfg)
                               : krylov::solve_joint(std::get<TrustRegionProblem>(inst), cfg);
            }
        } else {
            std::cerr << "unknown --method '" << a.method << "'\n";
            return kExitError;
        }
    } catch (const HardCaseError& e) {
        std::cerr << "hard case: " << e.what()
                  << " (try --method krylov-joint or gd-perturbed)\n";
        return kExitHardCase;
    }

    write_trace_csv(a.out + ".trace.csv", rep.trace, with_newton);

    json out;
    out["method"] = a.method;
    out["status"] = to_string(rep.status);
    out["f_final"] = rep.f_final;
    out["lambda"] = rep.lambda;
    out["matvecs"] = rep.matvecs;
    out["trace_rows"] = rep.trace.size();
    const auto f_star = is_cubic ? known_f_star(std::get<CubicProblem>(inst))
                                 : known_f_star(std::get<TrustRegionProblem>(inst));
    if (f_star) out["gap"] = rep.f_final - *f_star;
    if (rep.kkt) out["kkt"] = kkt_to_json(*rep.kkt);
    std::ofstream os(a.out + ".report.json");
    os << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    return 0;
}

struct BenchArgs {
    std::string manifest;
    std::string method = "krylov";
    double eta = 0.0;
    std::int64_t max_iters = 0;  // grid length; 0 = empty grid
    Index max_dim = 0;
    int solve_cadence = 1;
    int max_newton = 25;
    double sigma_bar = 1.0;
    double epsilon = 1e-2;
    double delta = 0.1;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out = "bench.csv";
};

int cmd_bench(const BenchArgs& a) {
    std::ifstream mf(a.manifest);
    if (!mf) {
        std::cerr << "cannot open manifest " << a.manifest << "\n";
        return kExitError;
    }
    json manifest = json::parse(mf);
    const fs::path dir = fs::path(a.manifest).parent_path();
    std::vector<std::string> files;
    for (const auto& f : manifest.at("files"))
        files.push_back((dir / f.get<std::string>()).string());

    const std::int64_t grid =
        a.max_dim > 0 ? static_cast<std::int64_t>(a.max_dim) : a.max_iters;

    std::vector<std::vector<double>> gaps(files.size());  // normalized, per t
    std::vector<std::int64_t> matvec_at(static_cast<size_t>(std::max<std::int64_t>(grid, 0)), 0);
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_msg;
    std::mutex error_mu;

    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1)) {
            if (failed.load()) return;
            try {
                io::Instance inst = io::load_instance(files[i]);
                if (!std::holds_alternative<CubicProblem>(inst))
                    throw std::runtime_error("bench expects cubic instances");
                CubicProblem p = std::get<CubicProblem>(inst);

                double f_star;
                if (p.info && p.info->f_star) {
                    f_star = *p.info->f_star;
                } else if (p.A->diagonal_entries() || p.dim() <= desk_cap()) {
                    f_star = reference_solve(p).f;  // oracle fallback
                } else {
                    throw std::runtime_error(
                        "no stored reference solution and the dense oracle cap "
                        "forbids computing one for " + files[i]);
                }
                const double denom = -f_star;  // f(0) = 0

                std::vector<TraceRow> trace;
                if (a.method == "gd" || a.method == "gd-perturbed") {
                    gd::GdConfig cfg;
                    cfg.eta = a.eta;
                    cfg.max_iters = grid;
                    cfg.grad_tol = 0.0;
                    if (a.method == "gd-perturbed")
                        cfg.perturbation =
                            gd::Perturbation{a.sigma_bar, a.epsilon, a.delta,
                                             a.seed + static_cast<std::uint64_t>(i)};
                    trace = gd::solve_cubic(p, cfg).trace;
                } else if (a.method == "krylov" || a.method == "krylov-joint") {
                    krylov::KrylovConfig cfg;
                    cfg.max_dim = static_cast<Index>(grid);
                    cfg.solve_cadence = a.solve_cadence;
                    cfg.max_newton_solves = a.max_newton;
                    if (a.method == "krylov-joint") {
                        cfg.joint_seed = a.seed + static_cast<std::uint64_t>(i);
                        trace = krylov::solve_joint(p, cfg).trace;
                    } else {
                        trace = krylov::solve_cubic(p, cfg).trace;
                    }
                } else {
                    throw std::runtime_error("unknown method " + a.method);
                }

                // Normalized gap on the 1..grid step grid; converged runs
                // hold their final value.
                std::vector<double>& g = gaps[i];
                g.assign(static_cast<size_t>(grid), 0.0);
                size_t row = 0;
                double last = 1.0;
                for (std::int64_t t = 1; t <= grid; ++t) {
                    while (row < trace.size() && trace[row].iter < t) ++row;
                    if (row < trace.size() && trace[row].iter == t) {
                        last = (trace[row].f - f_star) / denom;
                        if (i == 0) matvec_at[static_cast<size_t>(t - 1)] = trace[row].matvecs;
                    }
                    g[static_cast<size_t>(t - 1)] = last;
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mu);
                failed.store(true);
                error_msg = e.what();
            }
        }
    };

    if (grid > 0) {
        std::vector<std::thread> pool;
        const int nw = std::max(1, a.workers);
        for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) {
        std::cerr << "bench failed: " << error_msg << "\n";
        return kExitError;
    }

    std::ofstream os(a.out);
    os << "t,matvecs,min,q25,median,q75,max\n";
    std::vector<double> col(files.size());
    for (std::int64_t t = 1; t <= grid; ++t) {
        for (size_t i = 0; i < files.size(); ++i)
            col[i] = gaps[i][static_cast<size_t>(t - 1)];
        std::sort(col.begin(), col.end());
        auto q = [&](double p) {
            const double pos = p * static_cast<double>(col.size() - 1);
            const size_t lo = static_cast<size_t>(pos);
            const size_t hi = std::min(lo + 1, col.size() - 1);
            return col[lo] + (pos - static_cast<double>(lo)) * (col[hi] - col[lo]);
        };
        os << t << ',' << matvec_at[static_cast<size_t>(t - 1)] << ','
           << format_double(col.front()) << ',' << format_double(q(0.25)) << ','
           << format_double(q(0.5)) << ',' << format_double(q(0.75)) << ','
           << format_double(col.back()) << "\n";
    }
    std::cout << "wrote " << a.out << " (" << files.size() << " instances, grid "
              << grid << ")\n";
    return 0;
}

struct SospArgs {
    std::string function = "quartic";
    Index d = 100;
    double epsilon = 1e-2;
    double delta = 0.1;
    double beta = 0.0;  // 0 = function default
    double rho = 0.0;
    std::uint64_t seed = 0;
    std::string y0 = "origin";  // origin | random
    double y0_radius = 0.5;
    std::string out;
};

int cmd_sosp(const SospArgs& a) {
    sosp::TestFunction tf;
    if (a.function == "quartic") {
        tf = sosp::make_rotational_quartic(a.d);
    } else if (a.function == "quadratic") {
        tf = sosp::make_convex_quadratic(a.d);
    } else if (a.function == "separable") {
        tf = sosp::make_separable_quartic(a.d);
    } else {
        std::cerr << "unknown --function '" << a.function << "'\n";
        return kExitError;
    }

    sosp::SospConfig cfg;
    cfg.beta = a.beta > 0.0 ? a.beta : tf.beta;
    cfg.rho = a.rho > 0.0 ? a.rho : tf.rho;
    cfg.epsilon = a.epsilon;
    cfg.delta = a.delta;
    cfg.seed = a.seed;
    cfg.g_lower_bound = tf.g_min;
    cfg.certify = a.d <= desk_cap();

    Vector y0 = Vector::Zero(a.d);
    if (a.y0 == "random") y0 = a.y0_radius * Rng(a.seed ^ 0xabcdefULL).unit_sphere(a.d);

    const auto rep = sosp::find_sosp(tf.fn, y0, cfg);
    const double grad_norm = tf.fn.gradient(rep.y_final).norm();

    json out;
    out["outer_iters"] = rep.outer_iters;
    out["grad_evals"] = rep.gradient_evals;
    out["hvp_evals"] = rep.hvp_evals;
    out["final_grad_norm"] = grad_norm;
    out["converged"] = rep.converged;
    if (rep.certified) {
        out["min_eig_estimate"] = rep.certified->min_eig;
        out["passed"] = rep.certified->passed;
    }
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";

    // Worst-case scaling of the Hessian-vector budget, for the record.
    const double g0_gap = rep.g_values.front() - tf.g_min;
    const double scaling = std::sqrt(cfg.beta) * std::pow(cfg.rho, 0.25) * g0_gap /
                           std::pow(cfg.epsilon, 1.75);
    std::cout << "hvp_evals " << rep.hvp_evals << " vs eps^{-7/4} scaling "
              << format_double(scaling) << " (log factors omitted)\n";

    std::cout << out.dump(2) << "\n";
    if (!a.out.empty()) {
        std::ofstream os(a.out);
        os << out.dump(2) << "\n";
    }
    return rep.converged ? 0 : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matrix-free trust-region / cubic-regularization solver suite"};
    app.require_subcommand(1);

    GenerateArgs ga;
    CLI::App* gen = app.add_subcommand("generate", "write seeded random instances");
    gen->add_option("--kind", ga.kind, "finite-kappa | hard-case");
    gen->add_option("--d", ga.d, "dimension");
    gen->add_option("--n", ga.n, "number of instances");
    gen->add_option("--seed", ga.seed, "base seed (instance i uses seed+i)");
    gen->add_option("--kappa", ga.kappa, "condition number (finite-kappa)");
    gen->add_option("--gap", ga.gap, "eigen-gap (hard-case)");
    gen->add_option("--tau", ga.tau, "v_min weight (hard-case)");
    gen->add_option("--out", ga.out, "output directory");

    SolveArgs sa;
    CLI::App* sol = app.add_subcommand("solve", "run one solver with a trace");
    sol->add_option("--instance", sa.instance, "instance JSON file")->required();
    sol->add_option("--method", sa.method, "gd | gd-perturbed | krylov | krylov-joint");
    sol->add_option("--eta", sa.eta, "gd step size (0 = maximum allowed)");
    sol->add_option("--max-iters", sa.max_iters, "gd iteration cap");
    sol->add_option("--max-dim", sa.max_dim, "krylov (block) step cap");
    sol->add_option("--solve-cadence", sa.solve_cadence, "reduced solve cadence");
    sol->add_option("--max-newton", sa.max_newton, "newton solves per reduced solve");
    sol->add_option("--sigma-bar", sa.sigma_bar, "perturbation magnitude parameter");
    sol->add_option("--epsilon", sa.epsilon, "perturbation target accuracy");
    sol->add_option("--delta", sa.delta, "failure probability");
    sol->add_option("--seed", sa.seed, "randomization seed");
    sol->add_option("--trace-every", sa.trace_every, "trace cadence");
    sol->add_option("--out", sa.out, "output prefix (.trace.csv, .report.json)");
    sol->add_flag("--allow-hard-case", sa.allow_hard_case,
                  "run plain methods on b^(1)=0 instances anyway");

    BenchArgs ba;
    CLI::App* ben = app.add_subcommand("bench", "ensemble gap quantiles");
    ben->add_option("--manifest", ba.manifest, "manifest.json from generate")->required();
    ben->add_option("--method", ba.method, "gd | gd-perturbed | krylov | krylov-joint");
    ben->add_option("--eta", ba.eta, "gd step size (0 = maximum allowed)");
    ben->add_option("--max-iters", ba.max_iters, "gd grid length");
    ben->add_option("--max-dim", ba.max_dim, "krylov grid length");
    ben->add_option("--solve-cadence", ba.solve_cadence, "reduced solve cadence");
    ben->add_option("--max-newton", ba.max_newton, "newton solves per reduced solve");
    ben->add_option("--sigma-bar", ba.sigma_bar, "perturbation parameter");
    ben->add_option("--epsilon", ba.epsilon, "perturbation target accuracy");
    ben->add_option("--delta", ba.delta, "failure probability");
    ben->add_option("--seed", ba.seed, "base randomization seed");
    ben->add_option("--workers", ba.workers, "worker threads");
    ben->add_option("--out", ba.out, "output CSV");

    SospArgs pa;
    CLI::App* sp = app.add_subcommand("sosp", "run Find-SOSP on a built-in function");
    sp->add_option("--function", pa.function, "quartic | quadratic | separable");
    sp->add_option("--d", pa.d, "dimension");
    sp->add_option("--epsilon", pa.epsilon, "target accuracy");
    sp->add_option("--delta", pa.delta, "failure probability");
    sp->add_option("--beta", pa.beta, "smoothness constant (0 = function default)");
    sp->add_option("--rho", pa.rho, "Hessian-Lipschitz/2 (0 = function default)");
    sp->add_option("--seed", pa.seed, "seed");
    sp->add_option("--y0", pa.y0, "origin | random");
    sp->add_option("--y0-radius", pa.y0_radius, "radius for random y0");
    sp->add_option("--out", pa.out, "report JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(ga);
        if (sol->parsed()) return cmd_solve(sa);
        if (ben->parsed()) return cmd_bench(ba);
        if (sp->parsed()) return cmd_sosp(pa);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
