#pragma once

#include "fps/common.hpp"
#include "fps/solver.hpp"
#include "fps/spectral.hpp"

namespace fps {

struct SpsCheck {
  double gap = 0.0;  // lambda_k - lambda_{k+1}
  SupportSet support;
  bool reliable = false;  // gap above policy.gap_tol
};

struct LccCheck {
  double lhs = 0.0;    // (8 s / gap) ||Sigma_{J^c J}||_{2,inf}
  double alpha = 0.0;  // clamp(1 - lhs, 0, 1)
};

/// Deterministic and probabilistic sparsistency conditions evaluated on a
/// known population covariance. Fields that do not apply to the producing
/// check are NaN (doubles) or false (flags).
struct ConditionReport {
  int p = 0;
  int k = 0;
  int s = 0;
  double rho = 0.0;

  double sps_gap = 0.0;
  SupportSet sps_support;
  bool sps_ok = false;
  double lambda1 = 0.0;

  double lcc_lhs = 0.0;
  double lcc_alpha = 0.0;

  double w_inf = 0.0;             // ||S - Sigma||_{inf,inf}
  double det_cond1_lhs = 0.0;     // w_inf / rho + lcc_lhs, must be <= 1
  bool det_cond1_ok = false;
  double det_cond2_slack = 0.0;   // gap - 4 rho s (1 + 8 lambda1 / gap), must be > 0
  bool det_cond2_ok = false;

  double signal_min_leverage = 0.0;  // min_{j in J} sqrt(Pi_jj)
  double signal_threshold = 0.0;     // 4 rho s / gap
  bool signal_ok = false;
  double entrywise_min = 0.0;        // min_{i,j in J} |Sigma_ij|
  bool sign_rank_one = false;
  bool entrywise_min_ok = false;     // entrywise_min > 2 rho and sign rank one

  // Sample-size condition with the prescribed penalty (sigma / alpha) sqrt(log p / n).
  int n = 0;
  double sigma_scale = 0.0;
  double alpha = 0.0;
  double sample_lhs = 0.0;  // s sqrt(log p / n)
  double sample_rhs = 0.0;  // alpha gap^2 / (4 sigma (8 lambda1 + gap))
  bool prob_sample_ok = false;

  bool false_positive_control = false;  // both deterministic conditions
  bool exact_recovery = false;          // plus either lower-bound condition
};

struct FrobeniusCheck {
  double lhs = 0.0;  // ||H - Pi||_F
  double rhs = 0.0;  // 4 rho s / gap
  bool ok = false;
};

struct WitnessReport {
  FantopePoint Htilde;  // support-restricted solution embedded in p x p
  Matrix Zhat;          // constructed full dual
  Matrix Q;             // s x s rotation
  double Q_deviation = 0.0;
  double Q_bound = 0.0;  // 8 rho s / gap
  bool q_bound_ok = false;
  double dual_offsupport_max = 0.0;  // max |Zhat_ij| over J x J^c
  double dual_max = 0.0;             // max |Zhat_ij| over all i != j
  double noise_opnorm = 0.0;
  double signal_gap = 0.0;  // gap of Sigma
  bool noise_gap_ok = false;  // 2 * noise_opnorm <= signal_gap
  double witness_gap = 0.0;   // lambda_k - lambda_{k+1} of S - rho Zhat
  double kkt_gap = 0.0;       // top-k sum of S - rho Zhat minus <S - rho Zhat, Htilde>
  int sub_iters = 0;
  bool witness_valid = false;
};

struct PersistenceResult {
  double pop_value = 0.0;  // <Sigma, H_R>
  double emp_value = 0.0;  // <Sigma, Hhat_R>
  double gap = 0.0;        // pop_value - emp_value
  double bound = 0.0;      // 2 R ||S - Sigma||_{inf,inf}
  bool lower_ok = false;
  bool upper_ok = false;
  double rho_pop = 0.0;
  double rho_emp = 0.0;
  KktReport kkt_pop;  // of the penalized problem at rho_pop
  KktReport kkt_emp;
  double objective_pop = 0.0;
  double objective_emp = 0.0;
};

struct StabilityResult {
  double f_base = 0.0;
  double f_perturbed = 0.0;
  double f_diff = 0.0;
  double bound = 0.0;  // 2 R ||Delta||_{inf,inf}
  bool ok = false;
};

struct SupportError {
  int false_pos = 0;
  int false_neg = 0;
  bool exact = false;
};

SpsCheck check_sps(const SymMat& sigma, int k, const NumericPolicy& policy = {});

/// Throws SpsViolated when the gap at k is not positive.
LccCheck check_lcc(const SymMat& sigma, int k, const SupportSet& support, const NumericPolicy& policy = {});

ConditionReport check_theorem1(const SymMat& sigma, const SymMat& s, int k, const SupportSet& support, double rho,
                               const NumericPolicy& policy = {});

/// Penalty prescription rho = (sigma_scale / alpha) sqrt(log p / n) together with
/// the sample-size condition and the two lower-bound conditions at that rho.
ConditionReport check_theorem2(const SymMat& sigma, int k, const SupportSet& support, int n, double sigma_scale,
                               double alpha, const NumericPolicy& policy = {});

FrobeniusCheck frobenius_bound_check(const SymMat& sigma, const SymMat& s, int k, const SupportSet& support,
                                     double rho, const FpsSolution& sol, const NumericPolicy& policy = {});

/// Support-restricted solve on S_JJ followed by the explicit dual completion.
/// config supplies solver tolerances; its rho and k are overridden.
WitnessReport build_witness(const SymMat& sigma, const SymMat& s, int k, const SupportSet& support, double rho,
                            const SolverConfig& config = {});

PersistenceResult persistence_gap(const SymMat& sigma, const SymMat& s, int k, double r, const SolverConfig& config,
                                  double lower_tol = 1e-6, double upper_tol = 1e-4);

StabilityResult stability_check(const SymMat& sigma, const SymMat& delta, int k, double r,
                                const SolverConfig& config, double tol = 1e-4);

/// True iff sign(M_JJ) equals b b^T for some b in {-1, 1}^s. Entries with
/// |M_ij| <= zero_tol count as zero and make the check fail.
bool sign_rank_one(const Matrix& m, const SupportSet& support, double zero_tol = 1e-12);
bool sign_rank_one(const SymMat& m, const SupportSet& support, double zero_tol = 1e-12);

SupportError support_error(const SupportSet& est, const SupportSet& truth);

}  // namespace fps
