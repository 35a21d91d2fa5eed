#include "subquad/lanczos.hpp"

#include <cmath>
#include <stdexcept>

namespace subquad::krylov {

LanczosFactorization::LanczosFactorization(Index dim, double breakdown_tol,
                                           bool reorthogonalize, bool store_basis,
                                           Index reserve_cols)
    : dim_(dim),
      breakdown_tol_(breakdown_tol),
      reorthogonalize_(reorthogonalize),
      store_basis_(store_basis || reorthogonalize) {
    // Reorthogonalization needs the basis; store it regardless of request.
    const Index reserve = std::min(dim_, reserve_cols);
    Q_.resize(dim_, reserve);
    T_ = Matrix::Zero(reserve, reserve);
}

void LanczosFactorization::initialize(const std::vector<Vector>& starts) {
    if (starts.empty())
        throw std::invalid_argument("LanczosFactorization: no start vectors");
    Matrix block(dim_, static_cast<Index>(starts.size()));
    Index m = 0;
    double nmax = 0.0;
    for (const Vector& s : starts) nmax = std::max(nmax, s.norm());
    if (nmax == 0.0)
        throw std::invalid_argument("LanczosFactorization: zero start vectors");
    for (const Vector& s : starts) {
        if (s.size() != dim_)
            throw std::invalid_argument("LanczosFactorization: start dimension mismatch");
        Vector v = s;
        for (int pass = 0; pass < 2; ++pass)
            if (m > 0) v -= block.leftCols(m) * (block.leftCols(m).transpose() * v);
        const double n = v.norm();
        if (n <= breakdown_tol_ * nmax) continue;  // dependent start, drop
        block.col(m) = v / n;
        ++m;
    }
    if (m == 0)
        throw std::invalid_argument("LanczosFactorization: start vectors all dependent");
    cur_block_ = block.leftCols(m);
    cur_cols_.resize(static_cast<size_t>(m));
    for (Index j = 0; j < m; ++j) cur_cols_[static_cast<size_t>(j)] = j;
    bandwidth_ = static_cast<int>(m);
    qcols_ = m;
    if (Q_.cols() < qcols_) Q_.conservativeResize(Eigen::NoChange, 2 * qcols_);
    Q_.leftCols(m) = cur_block_;  // first block always kept for reduced_coords
    scale_ = 0.0;
}

void LanczosFactorization::append_columns(const Matrix& cols) {
    const Index need = qcols_ + cols.cols();
    if (T_.rows() < need) {
        const Index grow = std::max(need, 2 * T_.rows());
        Matrix t = Matrix::Zero(grow, grow);
        t.topLeftCorner(T_.rows(), T_.cols()) = T_;
        T_.swap(t);
    }
    if (!store_basis_) return;
    if (Q_.cols() < need)
        Q_.conservativeResize(Eigen::NoChange, std::max(need, 2 * Q_.cols()));
    Q_.middleCols(qcols_, cols.cols()) = cols;
}

void LanczosFactorization::extend(const LinearOperator& A) {
    if (breakdown_)
        throw std::logic_error("LanczosFactorization::extend after breakdown");
    if (cur_cols_.empty())
        throw std::logic_error("LanczosFactorization::extend before initialize");

    const Index m = cur_block_.cols();
    Matrix W(dim_, m);
    Vector tmp(dim_);
    for (Index j = 0; j < m; ++j) {
        A.apply_into(cur_block_.col(j), tmp);
        W.col(j) = tmp;
    }

    Matrix alpha = cur_block_.transpose() * W;
    alpha = 0.5 * (alpha + alpha.transpose()).eval();

    // Grow T to cover the current block.
    if (T_.rows() < qcols_) {
        Matrix t = Matrix::Zero(2 * qcols_, 2 * qcols_);
        t.topLeftCorner(T_.rows(), T_.cols()) = T_;
        T_.swap(t);
    }
    const Index c0 = cur_cols_.front();
    T_.block(c0, c0, m, m) = alpha;
    tcols_ = c0 + m;
    ++steps_;
    scale_ = std::max(scale_, alpha.cwiseAbs().maxCoeff());

    // Three-term recursion, then optional full reorthogonalization (two
    // classical Gram-Schmidt passes against the whole basis).
    W.noalias() -= cur_block_ * alpha;
    if (prev_block_.cols() > 0) W.noalias() -= prev_block_ * last_beta_.transpose();
    if (reorthogonalize_) {
        auto Q = Q_.leftCols(qcols_);
        for (int pass = 0; pass < 2; ++pass) W.noalias() -= Q * (Q.transpose() * W);
    }

    // QR with deflation: drop columns that fall below the breakdown
    // threshold (the joint subspace became degenerate in that direction).
    const double tol = breakdown_tol_ * std::max(scale_, 1.0);
    Matrix newblock(dim_, m);
    Matrix beta = Matrix::Zero(m, m);  // rows: accepted columns
    Index accepted = 0;
    for (Index j = 0; j < m; ++j) {
        Vector v = W.col(j);
        for (int pass = 0; pass < 2; ++pass)
            for (Index i = 0; i < accepted; ++i) {
                const double c = newblock.col(i).dot(v);
                beta(i, j) += c;
                v -= c * newblock.col(i);
            }
        const double n = v.norm();
        if (n <= tol) continue;
        beta(accepted, j) = n;
        newblock.col(accepted) = v / n;
        ++accepted;
    }

    if (accepted == 0) {
        breakdown_ = true;
        last_beta_.resize(0, 0);
        return;
    }

    scale_ = std::max(scale_, beta.cwiseAbs().maxCoeff());
    append_columns(newblock.leftCols(accepted));
    T_.block(qcols_, c0, accepted, m) = beta.topRows(accepted);
    T_.block(c0, qcols_, m, accepted) = beta.topRows(accepted).transpose();

    prev_block_ = std::move(cur_block_);
    prev_cols_ = std::move(cur_cols_);
    cur_block_ = newblock.leftCols(accepted);
    cur_cols_.resize(static_cast<size_t>(accepted));
    for (Index j = 0; j < accepted; ++j)
        cur_cols_[static_cast<size_t>(j)] = qcols_ + j;
    last_beta_ = beta.topRows(accepted);
    qcols_ += accepted;
}

Vector LanczosFactorization::reduced_coords(const Vector& v) const {
    const Index m0 = bandwidth_;
    Vector out = Vector::Zero(std::max<Index>(tcols_, m0));
    out.head(m0) = Q_.leftCols(m0).transpose() * v;
    return out.head(std::max<Index>(tcols_, m0)).eval();
}

Vector LanczosFactorization::lift(const Vector& y) const {
    if (!store_basis_)
        throw std::logic_error("LanczosFactorization::lift without stored basis");
    return Q_.leftCols(tcols_) * y;
}

double LanczosFactorization::residual_norm(const Vector& y) const {
    if (breakdown_ || last_beta_.size() == 0) return 0.0;
    const Index mp = last_beta_.cols();
    return (last_beta_ * y.tail(mp)).norm();
}

double LanczosFactorization::ortho_defect() const {
    const Index avail = store_basis_ ? qcols_ : static_cast<Index>(bandwidth_);
    const auto Q = Q_.leftCols(avail);
    Matrix G = Q.transpose() * Q;
    G.diagonal().array() -= 1.0;
    return G.cwiseAbs().maxCoeff();
}

}  // namespace subquad::krylov
