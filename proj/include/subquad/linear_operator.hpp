#pragma once

#include "subquad/types.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>

namespace subquad {

/// Matrix-free symmetric operator: all solvers touch A only through
/// v -> Av. Applications are counted; the counter is atomic so problems
/// can be shared across threads.
class LinearOperator {
  public:
    using ApplyFn = std::function<void(const Vector&, Vector&)>;

    LinearOperator(Index dim, ApplyFn apply)
        : dim_(dim), apply_(std::move(apply)), count_(0) {}

    Index dim() const { return dim_; }

    void apply_into(const Vector& v, Vector& out) const;

    Vector apply(const Vector& v) const {
        Vector out(dim_);
        apply_into(v, out);
        return out;
    }

    std::int64_t matvec_count() const { return count_.load(std::memory_order_relaxed); }
    void reset_matvec_count() const { count_.store(0, std::memory_order_relaxed); }

    /// Structure access for the dense oracle; null when the operator is a
    /// plain callback.
    const Vector* diagonal_entries() const { return diag_.get(); }
    const Matrix* dense_matrix() const { return dense_.get(); }

    static std::shared_ptr<LinearOperator> diagonal(Vector entries);
    static std::shared_ptr<LinearOperator> dense(Matrix symmetric);
    static std::shared_ptr<LinearOperator> callback(Index dim, ApplyFn apply);
    /// Forward-difference Hessian-vector product (grad(x + t v) - grad(x)) / t.
    static std::shared_ptr<LinearOperator> finite_diff_hvp(
        Index dim, std::function<Vector(const Vector&)> gradient, Vector x,
        double step = 1e-6);

  private:
    Index dim_;
    ApplyFn apply_;
    mutable std::atomic<std::int64_t> count_;
    std::shared_ptr<const Vector> diag_;
    std::shared_ptr<const Matrix> dense_;
};

using OperatorPtr = std::shared_ptr<LinearOperator>;

}  // namespace subquad
