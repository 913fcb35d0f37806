#include "fps/diagnostics.hpp"

#include "fps/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fps {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_support_dim(const SupportSet& support, int p, const char* who) {
  if (support.dim() != p) fail(ErrorKind::InvalidInput, std::string(who) + ": support dimension does not match Sigma");
  if (support.size() == 0) fail(ErrorKind::InvalidInput, std::string(who) + ": empty support");
}

double frobenius_inner(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

// Spectral quantities shared by both condition reports.
ConditionReport population_part(const SymMat& sigma, int k, const SupportSet& support, const NumericPolicy& policy,
                                const char* who) {
  const int p = sigma.dim();
  if (k < 1 || k > p) fail(ErrorKind::InvalidInput, std::string(who) + ": need 0 < k <= p");
  check_support_dim(support, p, who);

  const Spectrum spec = eig_sym(sigma, policy);
  const TopKProjector top = top_k_projector(spec, k, policy);
  ConditionReport r;
  r.p = p;
  r.k = k;
  r.s = support.size();
  r.sps_gap = top.gap;
  r.sps_support = SupportSet::from_diagonal(top.point.mat(), policy.support_leverage_tol);
  r.sps_ok = top.unique && r.sps_support == support;
  r.lambda1 = spec.values(0);
  if (!(top.gap > policy.gap_tol))
    fail(ErrorKind::SpsViolated, std::string(who) + ": gap at k is " + std::to_string(top.gap));

  const LccCheck lcc = check_lcc(sigma, k, support, policy);
  r.lcc_lhs = lcc.lhs;
  r.lcc_alpha = lcc.alpha;

  double lev = std::numeric_limits<double>::infinity();
  double emin = std::numeric_limits<double>::infinity();
  for (int i : support.indices()) {
    lev = std::min(lev, std::sqrt(std::max(0.0, top.point(i, i))));
    for (int j : support.indices()) emin = std::min(emin, std::abs(sigma(i, j)));
  }
  r.signal_min_leverage = lev;
  r.entrywise_min = emin;
  r.sign_rank_one = sign_rank_one(sigma, support);
  return r;
}

// Conditions that depend on rho once the population part is known.
void penalty_part(ConditionReport& r) {
  const double gap = r.sps_gap;
  const double s = r.s;
  r.det_cond2_slack = gap - 4.0 * r.rho * s * (1.0 + 8.0 * r.lambda1 / gap);
  r.det_cond2_ok = r.det_cond2_slack > 0.0;
  r.signal_threshold = 4.0 * r.rho * s / gap;
  r.signal_ok = r.signal_min_leverage > r.signal_threshold;
  r.entrywise_min_ok = r.sign_rank_one && r.entrywise_min > 2.0 * r.rho;
}

}  // namespace

SpsCheck check_sps(const SymMat& sigma, int k, const NumericPolicy& policy) {
  if (k < 1 || k > sigma.dim()) fail(ErrorKind::InvalidInput, "check_sps: need 0 < k <= p");
  const TopKProjector top = top_k_projector(sigma, k, policy);
  SpsCheck c;
  c.gap = top.gap;
  c.support = SupportSet::from_diagonal(top.point.mat(), policy.support_leverage_tol);
  c.reliable = top.unique;
  return c;
}

LccCheck check_lcc(const SymMat& sigma, int k, const SupportSet& support, const NumericPolicy& policy) {
  const int p = sigma.dim();
  if (k < 1 || k > p) fail(ErrorKind::InvalidInput, "check_lcc: need 0 < k <= p");
  check_support_dim(support, p, "check_lcc");
  const double gap = eig_sym(sigma, policy).gap(k);
  if (!(gap > policy.gap_tol)) fail(ErrorKind::SpsViolated, "check_lcc: gap at k is " + std::to_string(gap));

  const SupportSet rest = support.complement();
  const double cross = rest.size() ? norm_l2inf(submatrix(sigma.mat(), rest.indices(), support.indices())) : 0.0;
  LccCheck c;
  c.lhs = std::isfinite(gap) ? 8.0 * support.size() / gap * cross : 0.0;
  c.alpha = std::clamp(1.0 - c.lhs, 0.0, 1.0);
  return c;
}

ConditionReport check_theorem1(const SymMat& sigma, const SymMat& s, int k, const SupportSet& support, double rho,
                               const NumericPolicy& policy) {
  if (!(rho > 0.0) || !std::isfinite(rho)) fail(ErrorKind::InvalidInput, "check_theorem1: need rho > 0");
  if (s.dim() != sigma.dim()) fail(ErrorKind::InvalidInput, "check_theorem1: S and Sigma differ in dimension");
  ConditionReport r = population_part(sigma, k, support, policy, "check_theorem1");
  r.rho = rho;
  r.w_inf = kernels::max_abs_difference(s.mat(), sigma.mat());
  r.det_cond1_lhs = r.w_inf / rho + r.lcc_lhs;
  r.det_cond1_ok = r.det_cond1_lhs <= 1.0;
  penalty_part(r);

  r.n = 0;
  r.sigma_scale = r.alpha = r.sample_lhs = r.sample_rhs = kNaN;
  r.prob_sample_ok = false;
  r.false_positive_control = r.det_cond1_ok && r.det_cond2_ok;
  r.exact_recovery = r.false_positive_control && (r.signal_ok || r.entrywise_min_ok);
  return r;
}

ConditionReport check_theorem2(const SymMat& sigma, int k, const SupportSet& support, int n, double sigma_scale,
                               double alpha, const NumericPolicy& policy) {
  const int p = sigma.dim();
  const double logp = std::log(static_cast<double>(p));
  if (n < 1 || n < logp) fail(ErrorKind::InvalidInput, "check_theorem2: need n >= log p");
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::InvalidInput, "check_theorem2: alpha must lie in (0, 1]");
  if (!(sigma_scale > 0.0) || !std::isfinite(sigma_scale))
    fail(ErrorKind::InvalidInput, "check_theorem2: sigma_scale must be > 0");

  ConditionReport r = population_part(sigma, k, support, policy, "check_theorem2");
  const double rate = std::sqrt(logp / n);
  r.n = n;
  r.sigma_scale = sigma_scale;
  r.alpha = alpha;
  r.rho = sigma_scale / alpha * rate;
  r.w_inf = r.det_cond1_lhs = kNaN;
  r.det_cond1_ok = false;
  penalty_part(r);

  const double gap = r.sps_gap;
  r.sample_lhs = r.s * rate;
  r.sample_rhs = alpha * gap * gap / (4.0 * sigma_scale * (8.0 * r.lambda1 + gap));
  r.prob_sample_ok = r.sample_lhs < r.sample_rhs;
  // Given the entrywise concentration event, the sample-size condition makes
  // both deterministic conditions hold at the prescribed rho.
  r.false_positive_control = r.prob_sample_ok && r.det_cond2_ok && r.lcc_alpha >= alpha;
  r.exact_recovery = r.false_positive_control && (r.signal_ok || r.entrywise_min_ok);
  return r;
}

FrobeniusCheck frobenius_bound_check(const SymMat& sigma, const SymMat& s, int k, const SupportSet& support,
                                     double rho, const FpsSolution& sol, const NumericPolicy& policy) {
  const int p = sigma.dim();
  if (s.dim() != p || sol.H.dim() != p) fail(ErrorKind::InvalidInput, "frobenius_bound_check: dimension mismatch");
  check_support_dim(support, p, "frobenius_bound_check");
  const TopKProjector top = top_k_projector(sigma, k, policy);
  if (!(top.gap > policy.gap_tol))
    fail(ErrorKind::SpsViolated, "frobenius_bound_check: gap at k is " + std::to_string(top.gap));
  FrobeniusCheck c;
  c.lhs = kernels::frobenius_distance(sol.H.mat(), top.point.mat());
  c.rhs = std::isfinite(top.gap) ? 4.0 * rho * support.size() / top.gap : 0.0;
  c.ok = c.lhs <= c.rhs + 1e-6;
  return c;
}

WitnessReport build_witness(const SymMat& sigma, const SymMat& s, int k, const SupportSet& support, double rho,
                            const SolverConfig& config) {
  const int p = sigma.dim();
  if (s.dim() != p) fail(ErrorKind::InvalidInput, "build_witness: S and Sigma differ in dimension");
  check_support_dim(support, p, "build_witness");
  if (!(rho > 1e-12)) fail(ErrorKind::InvalidInput, "build_witness: rho must exceed 1e-12");
  const int sz = support.size();
  if (k < 1 || k > sz) fail(ErrorKind::InvalidInput, "build_witness: need 0 < k <= |J|");
  const NumericPolicy& policy = config.policy;

  const Spectrum pop = eig_sym(sigma, policy);
  const double gap = pop.gap(k);
  if (!(gap > policy.gap_tol)) fail(ErrorKind::SpsViolated, "build_witness: gap at k is " + std::to_string(gap));

  const std::vector<int>& J = support.indices();
  const std::vector<int> Jc = support.complement().indices();

  // Support-restricted problem on S_JJ.
  SolverConfig sub_cfg = config;
  sub_cfg.rho = rho;
  sub_cfg.k = k;
  sub_cfg.tau_en = 0.0;
  sub_cfg.init.reset();
  const SymMat s_jj(submatrix(s.mat(), J, J));
  const FpsSolution sub = solve_fps(s_jj, sub_cfg);

  WitnessReport w;
  w.sub_iters = sub.iters;
  Matrix h = Matrix::Zero(p, p);
  for (int a = 0; a < sz; ++a)
    for (int b = 0; b < sz; ++b) h(J[a], J[b]) = sub.H(a, b);
  w.Htilde = FantopePoint::certify(h, k, policy);

  // Full s x s bases of S_JJ - rho Z_JJ and Sigma_JJ, aligned blockwise.
  const Matrix sigma_jj = submatrix(sigma.mat(), J, J);
  const Spectrum hat = eig_sym(SymMat(s_jj.mat() - rho * sub.Z), policy);
  const Spectrum ref = eig_sym(SymMat(sigma_jj), policy);
  Matrix v = ref.vectors;
  v.leftCols(k) = v.leftCols(k) * procrustes_align(hat.vectors.leftCols(k), ref.vectors.leftCols(k), policy).rotation;
  if (sz > k) {
    const int rest = sz - k;
    v.rightCols(rest) =
        v.rightCols(rest) * procrustes_align(hat.vectors.rightCols(rest), ref.vectors.rightCols(rest), policy).rotation;
  }
  w.Q = hat.vectors * v.transpose();
  w.Q_deviation = (w.Q - Matrix::Identity(sz, sz)).norm();
  w.Q_bound = 8.0 * rho * sz / gap;
  w.q_bound_ok = w.Q_deviation <= w.Q_bound;

  // Dual completion.
  Matrix z = Matrix::Zero(p, p);
  for (int a = 0; a < sz; ++a)
    for (int b = 0; b < sz; ++b) z(J[a], J[b]) = sub.Z(a, b);
  if (!Jc.empty()) {
    const Matrix q_cross = w.Q * submatrix(sigma.mat(), J, Jc);
    for (int a = 0; a < sz; ++a)
      for (std::size_t b = 0; b < Jc.size(); ++b) {
        const double val = (s(J[a], Jc[b]) - q_cross(a, b)) / rho;
        z(J[a], Jc[b]) = z(Jc[b], J[a]) = val;
        w.dual_offsupport_max = std::max(w.dual_offsupport_max, std::abs(val));
      }
    for (int i : Jc)
      for (int j : Jc)
        if (i != j) z(i, j) = (s(i, j) - sigma(i, j)) / rho;
  }
  w.dual_max = norm_linf(z);
  w.Zhat = z;

  // Eigenstructure of S - rho Zhat and the optimality of Htilde for it.
  const Matrix tilde = s.mat() - rho * z;
  const Spectrum wit = eig_sym(SymMat(tilde), policy);
  w.witness_gap = wit.gap(k);
  const double value = frobenius_inner(tilde, h);
  w.kkt_gap = wit.top_sum(k) - value;

  // Noise part: block-diagonal remainder after the rotated population term.
  const SymMat noise_jj(s_jj.mat() - rho * sub.Z - w.Q * sigma_jj * w.Q.transpose());
  const Vector nv = eig_sym(noise_jj, policy).values;
  double noise = std::max(std::abs(nv(0)), std::abs(nv(nv.size() - 1)));
  for (int i : Jc) noise = std::max(noise, std::abs(s(i, i) - sigma(i, i)));
  w.noise_opnorm = noise;
  w.signal_gap = gap;
  w.noise_gap_ok = 2.0 * noise <= gap;

  w.witness_valid = w.dual_max <= 1.0 + 1e-6 && sub.kkt.sign_mismatch <= 1e-4 && w.witness_gap > policy.gap_tol &&
                    w.kkt_gap <= 1e-5 * (1.0 + std::abs(value));
  return w;
}

PersistenceResult persistence_gap(const SymMat& sigma, const SymMat& s, int k, double r, const SolverConfig& config,
                                  double lower_tol, double upper_tol) {
  if (s.dim() != sigma.dim()) fail(ErrorKind::InvalidInput, "persistence_gap: S and Sigma differ in dimension");
  const ConstrainedSolution pop = solve_fps_constrained(sigma, r, k, config);
  const ConstrainedSolution emp = solve_fps_constrained(s, r, k, config);
  PersistenceResult res;
  res.pop_value = frobenius_inner(sigma.mat(), pop.solution.H.mat());
  res.emp_value = frobenius_inner(sigma.mat(), emp.solution.H.mat());
  res.gap = res.pop_value - res.emp_value;
  res.bound = 2.0 * r * kernels::max_abs_difference(s.mat(), sigma.mat());
  res.lower_ok = res.gap >= -lower_tol;
  res.upper_ok = res.gap <= res.bound + upper_tol;
  res.rho_pop = pop.rho_star;
  res.rho_emp = emp.rho_star;
  res.kkt_pop = pop.solution.kkt;
  res.kkt_emp = emp.solution.kkt;
  res.objective_pop = pop.solution.objective;
  res.objective_emp = emp.solution.objective;
  return res;
}

StabilityResult stability_check(const SymMat& sigma, const SymMat& delta, int k, double r,
                                const SolverConfig& config, double tol) {
  if (delta.dim() != sigma.dim()) fail(ErrorKind::InvalidInput, "stability_check: dimension mismatch");
  const SymMat moved = sigma + delta;
  StabilityResult res;
  res.f_base = frobenius_inner(sigma.mat(), solve_fps_constrained(sigma, r, k, config).solution.H.mat());
  res.f_perturbed = frobenius_inner(moved.mat(), solve_fps_constrained(moved, r, k, config).solution.H.mat());
  res.f_diff = std::abs(res.f_perturbed - res.f_base);
  res.bound = 2.0 * r * norm_linf(delta.mat());
  res.ok = res.f_diff <= res.bound + tol;
  return res;
}

bool sign_rank_one(const Matrix& m, const SupportSet& support, double zero_tol) {
  if (m.rows() != m.cols() || m.rows() != support.dim())
    fail(ErrorKind::InvalidInput, "sign_rank_one: dimension mismatch");
  const std::vector<int>& J = support.indices();
  if (J.empty()) return true;
  auto sgn = [&](int i, int j) { return std::abs(m(i, j)) <= zero_tol ? 0 : (m(i, j) > 0.0 ? 1 : -1); };
  // b is pinned by the first row once b_0 = +1, which needs a positive corner.
  if (sgn(J[0], J[0]) != 1) return false;
  std::vector<int> b(J.size());
  for (std::size_t a = 0; a < J.size(); ++a) {
    b[a] = sgn(J[0], J[a]);
    if (b[a] == 0) return false;
  }
  for (std::size_t a = 0; a < J.size(); ++a)
    for (std::size_t c = 0; c < J.size(); ++c)
      if (sgn(J[a], J[c]) != b[a] * b[c]) return false;
  return true;
}

bool sign_rank_one(const SymMat& m, const SupportSet& support, double zero_tol) {
  return sign_rank_one(m.mat(), support, zero_tol);
}

SupportError support_error(const SupportSet& est, const SupportSet& truth) {
  SupportError e;
  for (int i : est.indices())
    if (!truth.contains(i)) ++e.false_pos;
  for (int i : truth.indices())
    if (!est.contains(i)) ++e.false_neg;
  e.exact = e.false_pos == 0 && e.false_neg == 0;
  return e;
}

}  // namespace fps
