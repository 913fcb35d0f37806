#pragma once

#include "fps/common.hpp"
#include "fps/spectral.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace fps {

/// Splitting state (Y, U) used to start the iteration somewhere other than the
/// default H = Y = (k/p) I, U = 0.
struct WarmStart {
  Matrix y;
  Matrix u;
};

struct SolverConfig {
  double rho = 0.0;        // l1 penalty
  double tau_en = 0.0;     // elastic-net curvature; 0 is plain FPS
  int k = 1;
  double admm_step = 1.0;  // augmented Lagrangian parameter
  int max_iters = 20000;
  double eps_primal = 1e-7;
  double eps_dual = 1e-7;
  double support_tol = 1e-6;       // relative threshold on diag(H)
  double constraint_slack = 1e-3;  // accepted relative slack for the constrained form
  bool record_history = false;
  std::optional<WarmStart> init;
  NumericPolicy policy;

  void validate(int p) const;
};

struct KktReport {
  double sign_mismatch = 0.0;
  double dual_bound_violation = 0.0;
  double fantope_optimality_gap = 0.0;
};

struct IterationRecord {
  double primal_residual;
  double dual_residual;
  double objective;
};

struct FpsSolution {
  FantopePoint H;
  Matrix Z;  // recovered dual in the unit l-inf ball, zero diagonal
  double objective = 0.0;
  SupportSet support;
  int iters = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double dual_clip = 0.0;  // how far the raw multiplier left [-1, 1] before clipping
  bool converged = false;
  double rho = 0.0;
  double tau_en = 0.0;
  KktReport kkt;
  WarmStart state;  // final (Y, U), reusable as a warm start
  std::vector<IterationRecord> history;
};

class NotConverged : public FpsError {
 public:
  explicit NotConverged(FpsSolution partial);
  const FpsSolution& partial() const noexcept { return partial_; }

 private:
  FpsSolution partial_;
};

struct ConstrainedSolution {
  FpsSolution solution;
  double rho_star = 0.0;
  std::vector<std::pair<double, double>> trace;  // (rho, ||H(rho)||_{1,1}) in evaluation order
};

struct UniquenessResult {
  bool unique = false;
  double discrepancy = 0.0;     // ||H_plain - H_en||_F
  double empirical_gap = 0.0;   // lambda_k - lambda_{k+1} of S - rho Z
  double tau = 0.0;             // elastic-net curvature used for the probe
  FpsSolution plain;
  FpsSolution elastic;
};

/// max <S, H> - rho ||H||_{1,1} (- tau/2 ||H||_F^2 when config.tau_en > 0)
/// over the trace-k Fantope, by ADMM on the consensus split H = Y.
/// Throws NotConverged (carrying the last iterate) when max_iters is reached.
FpsSolution solve_fps(const SymMat& s, const SolverConfig& config);

/// Elastic-net form; requires config.tau_en > 0.
FpsSolution solve_fps_en(const SymMat& s, const SolverConfig& config);

/// max <S, H> subject to H in the Fantope and ||H||_{1,1} <= R, via a monotone
/// search over the penalty. config.rho and config.k are ignored/overridden.
ConstrainedSolution solve_fps_constrained(const SymMat& s, double r, int k, const SolverConfig& config);

double fps_objective(const SymMat& s, const Matrix& h, double rho, double tau_en = 0.0);

KktReport check_kkt(const SymMat& s, const Matrix& h, const Matrix& z, double rho, int k,
                    double tau_en = 0.0, double support_tol = 1e-6);
KktReport check_kkt(const SymMat& s, const FpsSolution& sol, double rho);

/// Compares plain FPS with elastic-net FPS at tau = half the empirical gap of
/// S - rho Z. Throws GapCollapsed when that gap is not positive.
UniquenessResult uniqueness_probe(const SymMat& s, const SolverConfig& config);

}  // namespace fps
