#include "subquad/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subquad::krylov {

namespace {

// Compact band copy: band(r, k) = B(k+r, k), r = 0..bw.
Matrix extract_band(Eigen::Ref<const Matrix> B, int bw) {
    const Index n = B.rows();
    Matrix band = Matrix::Zero(bw + 1, n);
    for (Index k = 0; k < n; ++k)
        for (int r = 0; r <= bw && k + r < n; ++r) band(r, k) = B(k + r, k);
    return band;
}

}  // namespace

int eigenvalues_below(Eigen::Ref<const Matrix> B, int bandwidth, double sigma) {
    const Index n = B.rows();
    const int bw = bandwidth;
    Matrix band = extract_band(B, bw);
    band.row(0).array() -= sigma;

    const double tiny =
        std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    int neg = 0;
    for (Index k = 0; k < n; ++k) {
        double p = band(0, k);
        if (p == 0.0) p = tiny;
        if (p < 0.0) ++neg;
        const int reach = static_cast<int>(std::min<Index>(bw, n - 1 - k));
        for (int i = 1; i <= reach; ++i) {
            const double f = band(i, k) / p;
            for (int j = i; j <= reach; ++j)
                band(j - i, k + i) -= f * band(j, k);
        }
    }
    return neg;
}

double smallest_eigenvalue(Eigen::Ref<const Matrix> B, int bandwidth, double tol) {
    const Index n = B.rows();
    double lo = B(0, 0), hi = B(0, 0);
    for (Index k = 0; k < n; ++k) {
        double radius = 0.0;
        for (int r = 1; r <= bandwidth; ++r) {
            if (k + r < n) radius += std::abs(B(k + r, k));
            if (k >= r) radius += std::abs(B(k, k - r));
        }
        lo = std::min(lo, B(k, k) - radius);
        hi = std::max(hi, B(k, k) + radius);
    }
    const double span = std::max(hi - lo, 1.0);
    while (hi - lo > tol * std::max(1.0, std::abs(lo)) &&
           hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * span) {
        const double mid = 0.5 * (lo + hi);
        if (eigenvalues_below(B, bandwidth, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

bool BandedLdlt::factor(Eigen::Ref<const Matrix> B, int bandwidth, double shift) {
    n_ = B.rows();
    bw_ = bandwidth;
    band_ = extract_band(B, bw_);
    band_.row(0).array() += shift;

    for (Index k = 0; k < n_; ++k) {
        const double p = band_(0, k);
        if (p <= 0.0) return false;
        const int reach = static_cast<int>(std::min<Index>(bw_, n_ - 1 - k));
        for (int i = 1; i <= reach; ++i) {
            const double lik = band_(i, k) / p;
            for (int j = i; j <= reach; ++j)
                band_(j - i, k + i) -= lik * band_(j, k);
            band_(i, k) = lik;
        }
    }
    return true;
}

void BandedLdlt::solve_in_place(Vector& rhs) const {
    // Forward: L z = rhs
    for (Index k = 0; k < n_; ++k) {
        const int reach = static_cast<int>(std::min<Index>(bw_, n_ - 1 - k));
        const double zk = rhs(k);
        for (int i = 1; i <= reach; ++i) rhs(k + i) -= band_(i, k) * zk;
    }
    // Diagonal
    for (Index k = 0; k < n_; ++k) rhs(k) /= band_(0, k);
    // Backward: L^T x = z
    for (Index k = n_ - 1; k >= 0; --k) {
        const int reach = static_cast<int>(std::min<Index>(bw_, n_ - 1 - k));
        double s = rhs(k);
        for (int i = 1; i <= reach; ++i) s -= band_(i, k) * rhs(k + i);
        rhs(k) = s;
    }
}

}  // namespace subquad::krylov
