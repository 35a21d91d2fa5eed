#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace subquad {

/// Raised when a method that cannot see v_min is pointed at an instance
/// that needs it (b = 0, or b^(1) = 0 where detectable).
class HardCaseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class Status { Converged, MaxIters, Stalled, Diverged };

const char* to_string(Status s);

/// One row of a solver trace. `gap` is NaN when no reference value is known.
/// `newton_solves` is only populated by the Krylov solvers.
struct TraceRow {
    std::int64_t iter = 0;
    std::int64_t matvecs = 0;
    double f = 0.0;
    double gap = std::numeric_limits<double>::quiet_NaN();
    double grad_norm = 0.0;
    double x_norm = 0.0;
    int newton_solves = 0;
};

/// KKT residuals for a candidate (x, lambda) pair, cf. the stationarity
/// system (A + lambda I) x + b = 0 with lambda >= (-lambda_min)_+.
struct KktReport {
    double lambda = 0.0;
    double stationarity_residual = 0.0;
    double complementarity_residual = 0.0;
    double min_eig_slack = 0.0;
    double lambda_min = 0.0;
    bool min_eig_is_estimate = false;
};

struct SolveReport {
    Vector x;
    double lambda = 0.0;
    Status status = Status::MaxIters;
    std::vector<TraceRow> trace;
    double f_final = 0.0;
    std::int64_t matvecs = 0;
    std::optional<KktReport> kkt;
};

/// Eigen-structure metadata attached to diagonal/dense problems.
/// `eigenvalues` are ascending; `b_eigen[i]` is the coordinate of b along
/// the i-th eigenvector. For diagonal operators the eigenbasis is a
/// permutation of the standard basis recorded in `perm` (original index of
/// the i-th smallest eigenvalue); for dense operators `basis` holds the
/// eigenvector columns.
struct SpectrumMeta {
    Vector eigenvalues;
    Vector b_eigen;
    Eigen::VectorXi perm;
    Matrix basis;

    double lambda_min() const { return eigenvalues(0); }
    double lambda_max() const { return eigenvalues(eigenvalues.size() - 1); }

    /// Lift eigenbasis coordinates back to the original coordinates.
    Vector from_eigen(const Vector& y) const;
    /// Project a vector onto the eigenbasis coordinates.
    Vector to_eigen(const Vector& x) const;
};

/// Generator provenance and (when known) the exact solution, carried by
/// instances produced by the generators in instances.hpp.
struct InstanceInfo {
    std::optional<double> kappa;
    std::optional<double> lambda_tr;
    std::optional<double> gap;
    std::optional<double> tau;
    std::optional<std::uint64_t> seed;
    std::optional<Vector> solution;
    std::optional<double> f_star;
};

/// Dense-oracle dimension cap; overridable via SUBQUAD_DESK_CAP.
Index desk_cap();

}  // namespace subquad
