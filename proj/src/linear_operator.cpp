#include "subquad/linear_operator.hpp"

#include <cstdlib>
#include <stdexcept>
#include <utility>

namespace subquad {

const char* to_string(Status s) {
    switch (s) {
        case Status::Converged: return "converged";
        case Status::MaxIters: return "max_iters";
        case Status::Stalled: return "stalled";
        case Status::Diverged: return "diverged";
    }
    return "unknown";
}

Index desk_cap() {
    static const Index cap = [] {
        if (const char* env = std::getenv("SUBQUAD_DESK_CAP")) {
            const long v = std::atol(env);
            if (v > 0) return static_cast<Index>(v);
        }
        return static_cast<Index>(2000);
    }();
    return cap;
}

Vector SpectrumMeta::from_eigen(const Vector& y) const {
    if (basis.size() > 0) return basis * y;
    Vector x(y.size());
    for (Index i = 0; i < y.size(); ++i) x(perm(i)) = y(i);
    return x;
}

Vector SpectrumMeta::to_eigen(const Vector& x) const {
    if (basis.size() > 0) return basis.transpose() * x;
    Vector y(x.size());
    for (Index i = 0; i < x.size(); ++i) y(i) = x(perm(i));
    return y;
}

void LinearOperator::apply_into(const Vector& v, Vector& out) const {
    if (v.size() != dim_)
        throw std::invalid_argument("LinearOperator::apply: dimension mismatch");
    out.resize(dim_);
    apply_(v, out);
    count_.fetch_add(1, std::memory_order_relaxed);
}

std::shared_ptr<LinearOperator> LinearOperator::diagonal(Vector entries) {
    auto d = std::make_shared<const Vector>(std::move(entries));
    auto op = std::make_shared<LinearOperator>(
        d->size(), [d](const Vector& v, Vector& out) { out = d->cwiseProduct(v); });
    op->diag_ = d;
    return op;
}

std::shared_ptr<LinearOperator> LinearOperator::dense(Matrix symmetric) {
    if (symmetric.rows() != symmetric.cols())
        throw std::invalid_argument("LinearOperator::dense: matrix not square");
    auto m = std::make_shared<const Matrix>(std::move(symmetric));
    auto op = std::make_shared<LinearOperator>(
        m->rows(), [m](const Vector& v, Vector& out) { out.noalias() = (*m) * v; });
    op->dense_ = m;
    return op;
}

std::shared_ptr<LinearOperator> LinearOperator::callback(Index dim, ApplyFn apply) {
    return std::make_shared<LinearOperator>(dim, std::move(apply));
}

std::shared_ptr<LinearOperator> LinearOperator::finite_diff_hvp(
    Index dim, std::function<Vector(const Vector&)> gradient, Vector x, double step) {
    auto g0 = std::make_shared<const Vector>(gradient(x));
    auto x0 = std::make_shared<const Vector>(std::move(x));
    return std::make_shared<LinearOperator>(
        dim, [gradient, g0, x0, step](const Vector& v, Vector& out) {
            const double vn = v.norm();
            if (vn == 0.0) {
                out.setZero();
                return;
            }
            const double t = step / vn;
            out = (gradient(*x0 + t * v) - *g0) / t;
        });
}

}  // namespace subquad
