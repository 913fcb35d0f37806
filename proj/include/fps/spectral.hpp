#pragma once

#include "fps/common.hpp"

namespace fps {

/// Full eigendecomposition with eigenvalues sorted descending; column j of
/// `vectors` pairs with `values(j)`.
struct Spectrum {
  Vector values;
  Matrix vectors;

  int dim() const noexcept { return static_cast<int>(values.size()); }
  /// lambda_k - lambda_{k+1} with 1-based k; +inf when k == p.
  double gap(int k) const;
  double top_sum(int k) const { return values.head(k).sum(); }
};

/// A matrix H in the trace-k Fantope {0 <= H <= I, trace H = k} together with
/// the residuals that certify membership.
class FantopePoint {
 public:
  FantopePoint() = default;

  /// Eigendecomposes `h` to measure how far it is from the Fantope. Does not
  /// throw on infeasible input; inspect `feasible()`.
  static FantopePoint certify(const Matrix& h, int k, const NumericPolicy& policy = {});

  /// Builds V diag(w) V^T where w are already-known eigenvalues of the result,
  /// so the residuals come without a second eigendecomposition.
  static FantopePoint from_eigen(const Matrix& v, const Vector& w, int k);

  int dim() const noexcept { return static_cast<int>(h_.rows()); }
  int k() const noexcept { return k_; }
  const Matrix& mat() const noexcept { return h_; }
  double operator()(int i, int j) const { return h_(i, j); }

  double symmetry_residual() const noexcept { return sym_; }
  double eigen_low_violation() const noexcept { return low_; }    // max(0, -lambda_min)
  double eigen_high_violation() const noexcept { return high_; }  // max(0, lambda_max - 1)
  double trace_residual() const noexcept { return trace_; }       // |trace - k|
  double constraint_residual() const noexcept;
  bool feasible(const NumericPolicy& policy = {}) const;

 private:
  Matrix h_;
  int k_ = 0;
  double sym_ = 0.0, low_ = 0.0, high_ = 0.0, trace_ = 0.0;
};

struct FantopeProjectionResult {
  FantopePoint point;
  double theta = 0.0;        // water-filling level
  Vector clipped;            // gamma_j^+(theta), paired with the input's descending eigenvalues
};

struct TopKProjector {
  FantopePoint point;
  Matrix basis;        // p x k leading eigenvectors
  double gap = 0.0;    // gamma_k - gamma_{k+1}; +inf when k == p
  bool unique = true;  // false when gap <= policy.gap_tol
};

struct ProcrustesResult {
  Matrix rotation;  // k x k orthogonal O minimizing ||U - V O||_F
  double distance = 0.0;
};

Spectrum eig_sym(const SymMat& a, const NumericPolicy& policy = {});

/// gamma^+(theta) = clamp(gamma - theta, 0, 1) entrywise.
Vector clipped_shares(const Vector& gamma, double theta);

/// Exact root of sum_j clamp(gamma_j - theta, 0, 1) = k by scanning the 2p
/// breakpoints {gamma_j, gamma_j - 1} and interpolating on the bracketing
/// segment. `gamma` need not be sorted. Requires 0 < k <= p.
double water_fill_level(const Vector& gamma, int k);

/// Euclidean projection of A onto the trace-k Fantope.
FantopeProjectionResult fantope_project(const SymMat& a, int k, const NumericPolicy& policy = {});

/// Same projection from a precomputed spectrum of A.
FantopeProjectionResult fantope_project(const Spectrum& spec, int k);

TopKProjector top_k_projector(const SymMat& a, int k, const NumericPolicy& policy = {});
TopKProjector top_k_projector(const Spectrum& spec, int k, const NumericPolicy& policy = {});

ProcrustesResult procrustes_align(const Matrix& u, const Matrix& v, const NumericPolicy& policy = {});

namespace reference {

/// Cyclic Jacobi eigensolver. Serial, O(p^3) per sweep; kept as the independent
/// reference for eig_sym in tests and benchmarks.
Spectrum jacobi_eig(const SymMat& a, const NumericPolicy& policy = {});

}  // namespace reference
}  // namespace fps
