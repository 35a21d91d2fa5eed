#pragma once

#include "subquad/linear_operator.hpp"
#include "subquad/types.hpp"

#include <vector>

namespace subquad::krylov {

/// (Block) Lanczos factorization A Q = Q T + residual, with T symmetric
/// banded (tridiagonal for block size 1). The basis keeps one lookahead
/// block: after `steps()` extensions the reduced operator covers the order-
/// `steps()` Krylov subspace and the next block is already orthonormalized,
/// which yields the full-space stationarity residual of reduced solutions
/// for free.
///
/// Full reorthogonalization (two classical Gram-Schmidt passes against the
/// whole basis) is on by default. With it off the basis can be discarded
/// (`store_basis = false`) and solutions lifted by a second pass.
class LanczosFactorization {
  public:
    LanczosFactorization(Index dim, double breakdown_tol, bool reorthogonalize,
                         bool store_basis = true, Index reserve_cols = 64);

    /// Installs the first block (orthonormalizing the given vectors; near-
    /// dependent columns are dropped). Zero vectors are rejected.
    void initialize(const std::vector<Vector>& starts);

    /// One (block) step: applies A to the current block (one matvec per
    /// column), extends T, orthonormalizes the next block. Throws if called
    /// after breakdown.
    void extend(const LinearOperator& A);

    bool breakdown() const { return breakdown_; }
    int steps() const { return steps_; }
    Index dim() const { return dim_; }
    /// Dimension t of the reduced operator (columns covered by T).
    Index tcols() const { return tcols_; }
    /// Sub-diagonal bandwidth of T (initial block size).
    int bandwidth() const { return bandwidth_; }
    int block_size() const { return static_cast<int>(cur_cols_.size()); }

    /// Reduced operator (t x t view) and basis (d x t view).
    Eigen::Ref<const Matrix> reduced() const {
        return T_.topLeftCorner(tcols_, tcols_);
    }
    Eigen::Ref<const Matrix> basis() const {
        return Q_.leftCols(tcols_);
    }
    bool stores_basis() const { return store_basis_; }

    /// Coordinates of a vector within the *first* block span (zero-padded
    /// to length t). Exact for the start vectors themselves.
    Vector reduced_coords(const Vector& v) const;

    /// Q y for a reduced vector of length tcols(). Requires stored basis.
    Vector lift(const Vector& y) const;

    /// | beta_{next} * (last-block rows of y) | -- the norm of the lifted
    /// stationarity residual (A + lambda) Q y + b for an exact reduced
    /// solution y. Zero after breakdown.
    double residual_norm(const Vector& y) const;

    /// Orthonormality defect max |Q'Q - I| (diagnostic, O(d t^2)).
    double ortho_defect() const;

    /// Lookahead block and its first global column index (two-pass lift).
    const Matrix& current_block() const { return cur_block_; }
    Index current_block_start() const {
        return cur_cols_.empty() ? Index{0} : cur_cols_.front();
    }

  private:
    void append_columns(const Matrix& cols);

    Index dim_;
    double breakdown_tol_;
    bool reorthogonalize_;
    bool store_basis_;
    bool breakdown_ = false;
    int steps_ = 0;
    Index tcols_ = 0;
    Index qcols_ = 0;
    int bandwidth_ = 1;
    double scale_ = 0.0;  // running magnitude for breakdown threshold

    Matrix Q_;             // stored basis (d x reserved)
    Matrix T_;             // reduced operator (reserved x reserved)
    Matrix cur_block_;     // d x m_t   (lookahead block)
    Matrix prev_block_;    // d x m_{t-1}
    Matrix last_beta_;     // m_{t} x m_{t-1} coefficients of lookahead block
    std::vector<Index> cur_cols_;   // global column indices of cur_block_
    std::vector<Index> prev_cols_;
};

}  // namespace subquad::krylov
