#include "subquad/problem.hpp"

#include "subquad/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace subquad {

namespace {

void check_dims(Index da, Index db, const char* where) {
    if (da != db) throw std::invalid_argument(std::string(where) + ": dimension mismatch");
}

}  // namespace

SpectrumMeta spectrum_from_diagonal(const Vector& diag, const Vector& b) {
    const Index d = diag.size();
    std::vector<Index> idx(static_cast<size_t>(d));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Index i, Index j) { return diag(i) < diag(j); });
    SpectrumMeta meta;
    meta.eigenvalues.resize(d);
    meta.b_eigen.resize(d);
    meta.perm.resize(d);
    for (Index i = 0; i < d; ++i) {
        meta.perm(i) = static_cast<int>(idx[static_cast<size_t>(i)]);
        meta.eigenvalues(i) = diag(meta.perm(i));
        meta.b_eigen(i) = b(meta.perm(i));
    }
    return meta;
}

SpectrumMeta spectrum_from_dense(const Matrix& A, const Vector& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectrum_from_dense: eigendecomposition failed");
    SpectrumMeta meta;
    meta.eigenvalues = es.eigenvalues();
    meta.basis = es.eigenvectors();
    meta.b_eigen = meta.basis.transpose() * b;
    return meta;
}

CubicProblem make_cubic_diagonal(Vector diag, Vector b, double rho) {
    check_dims(diag.size(), b.size(), "make_cubic_diagonal");
    if (rho <= 0.0) throw std::invalid_argument("make_cubic_diagonal: rho must be positive");
    CubicProblem p;
    p.meta = spectrum_from_diagonal(diag, b);
    p.A = LinearOperator::diagonal(std::move(diag));
    p.b = std::move(b);
    p.rho = rho;
    return p;
}

CubicProblem make_cubic_dense(Matrix A, Vector b, double rho) {
    check_dims(A.rows(), b.size(), "make_cubic_dense");
    if (rho <= 0.0) throw std::invalid_argument("make_cubic_dense: rho must be positive");
    CubicProblem p;
    if (A.rows() <= desk_cap()) p.meta = spectrum_from_dense(A, b);
    p.A = LinearOperator::dense(std::move(A));
    p.b = std::move(b);
    p.rho = rho;
    return p;
}

CubicProblem make_cubic_operator(OperatorPtr A, Vector b, double rho) {
    check_dims(A->dim(), b.size(), "make_cubic_operator");
    if (rho <= 0.0) throw std::invalid_argument("make_cubic_operator: rho must be positive");
    return CubicProblem{std::move(A), std::move(b), rho, std::nullopt, std::nullopt};
}

TrustRegionProblem make_tr_diagonal(Vector diag, Vector b, double radius) {
    check_dims(diag.size(), b.size(), "make_tr_diagonal");
    if (radius <= 0.0) throw std::invalid_argument("make_tr_diagonal: radius must be positive");
    TrustRegionProblem p;
    p.meta = spectrum_from_diagonal(diag, b);
    p.A = LinearOperator::diagonal(std::move(diag));
    p.b = std::move(b);
    p.radius = radius;
    return p;
}

TrustRegionProblem make_tr_dense(Matrix A, Vector b, double radius) {
    check_dims(A.rows(), b.size(), "make_tr_dense");
    if (radius <= 0.0) throw std::invalid_argument("make_tr_dense: radius must be positive");
    TrustRegionProblem p;
    if (A.rows() <= desk_cap()) p.meta = spectrum_from_dense(A, b);
    p.A = LinearOperator::dense(std::move(A));
    p.b = std::move(b);
    p.radius = radius;
    return p;
}

TrustRegionProblem make_tr_operator(OperatorPtr A, Vector b, double radius) {
    check_dims(A->dim(), b.size(), "make_tr_operator");
    if (radius <= 0.0) throw std::invalid_argument("make_tr_operator: radius must be positive");
    return TrustRegionProblem{std::move(A), std::move(b), radius, std::nullopt, std::nullopt};
}

double eval_cubic_with_Ax(const CubicProblem& p, const Vector& x, const Vector& Ax) {
    return 0.5 * x.dot(Ax) + p.b.dot(x) + (p.rho / 3.0) * std::pow(x.norm(), 3);
}

double eval_cubic(const CubicProblem& p, const Vector& x) {
    check_dims(p.dim(), x.size(), "eval_cubic");
    return eval_cubic_with_Ax(p, x, p.A->apply(x));
}

Vector grad_cubic(const CubicProblem& p, const Vector& x) {
    check_dims(p.dim(), x.size(), "grad_cubic");
    return p.A->apply(x) + p.b + (p.rho * x.norm()) * x;
}

double eval_tr_with_Ax(const TrustRegionProblem& p, const Vector& x, const Vector& Ax) {
    return 0.5 * x.dot(Ax) + p.b.dot(x);
}

double eval_tr(const TrustRegionProblem& p, const Vector& x) {
    check_dims(p.dim(), x.size(), "eval_tr");
    return eval_tr_with_Ax(p, x, p.A->apply(x));
}

Vector grad_tr(const TrustRegionProblem& p, const Vector& x) {
    check_dims(p.dim(), x.size(), "grad_tr");
    return p.A->apply(x) + p.b;
}

Vector project(const TrustRegionProblem& p, const Vector& x) {
    check_dims(p.dim(), x.size(), "project");
    const double n = x.norm();
    if (n <= p.radius) return x;
    return (p.radius / n) * x;
}

RadiusBounds radius_bounds(const CubicProblem& p, double beta) {
    RadiusBounds out;
    const double bn = p.b.norm();
    const double h = beta / (2.0 * p.rho);
    out.upper = h + std::sqrt(h * h + bn / p.rho);
    if (bn == 0.0) {
        out.cauchy = 0.0;
        out.degenerate = true;
        return out;
    }
    const double bAb = p.b.dot(p.A->apply(p.b));
    const double c = bAb / (2.0 * p.rho * bn * bn);
    out.cauchy = -c + std::sqrt(c * c + bn / p.rho);
    return out;
}

Vector cauchy_point(const CubicProblem& p) {
    const double bn = p.b.norm();
    if (bn == 0.0) return Vector::Zero(p.dim());
    const RadiusBounds rb = radius_bounds(p, 0.0);  // beta unused for R_c
    return (-rb.cauchy / bn) * p.b;
}

double estimate_op_norm(const LinearOperator& A, int iters, std::uint64_t seed) {
    Rng rng(seed);
    Vector v = rng.unit_sphere(A.dim());
    double mu = 0.0;
    for (int k = 0; k < iters; ++k) {
        Vector w = A.apply(v);
        const double n = w.norm();
        if (n == 0.0) return 0.0;
        mu = std::abs(v.dot(w));
        v = w / n;
    }
    return std::max(mu, 1e-300);
}

double estimate_min_eig(const LinearOperator& A, double beta, int iters,
                        std::uint64_t seed) {
    // Power iteration on beta*I - A: its top eigenvalue is beta - lambda_min.
    Rng rng(seed);
    Vector v = rng.unit_sphere(A.dim());
    double mu = 0.0;
    for (int k = 0; k < iters; ++k) {
        Vector w = beta * v - A.apply(v);
        const double n = w.norm();
        if (n == 0.0) return beta;  // A = beta*I on the sampled subspace
        mu = v.dot(w);
        v = w / n;
    }
    return beta - mu;
}

}  // namespace subquad
