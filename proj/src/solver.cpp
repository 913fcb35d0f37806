#include "fps/solver.hpp"

#include "fps/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fps {

void SolverConfig::validate(int p) const {
  auto bad = [](const std::string& what) { fail(ErrorKind::InvalidInput, "SolverConfig: " + what); };
  if (!(rho >= 0.0) || !std::isfinite(rho)) bad("rho must be finite and >= 0");
  if (!(tau_en >= 0.0) || !std::isfinite(tau_en)) bad("tau_en must be finite and >= 0");
  if (k < 1 || k > p) bad("k must satisfy 0 < k <= p");
  if (!(admm_step > 0.0)) bad("admm_step must be > 0");
  if (max_iters < 1) bad("max_iters must be >= 1");
  if (!(eps_primal > 0.0) || !(eps_dual > 0.0)) bad("tolerances must be > 0");
  if (!(support_tol > 0.0)) bad("support_tol must be > 0");
  if (!(constraint_slack > 0.0)) bad("constraint_slack must be > 0");
  if (init && (init->y.rows() != p || init->y.cols() != p || init->u.rows() != p || init->u.cols() != p))
    bad("warm start has the wrong shape");
}

NotConverged::NotConverged(FpsSolution partial)
    : FpsError(ErrorKind::NotConverged,
               [&] {
                 std::ostringstream os;
                 os << "no convergence after " << partial.iters << " iterations (primal "
                    << partial.primal_residual << ", dual " << partial.dual_residual << ")";
                 return os.str();
               }()),
      partial_(std::move(partial)) {}

double fps_objective(const SymMat& s, const Matrix& h, double rho, double tau_en) {
  double obj = (s.mat().array() * h.array()).sum() - rho * norm_l11(h);
  if (tau_en > 0.0) obj -= 0.5 * tau_en * h.squaredNorm();
  return obj;
}

namespace {

// Dual from the scaled multiplier: Z = (step / rho) U, symmetrized, zero diagonal,
// clipped into [-1, 1]. Returns the clip magnitude.
double recover_dual(const Matrix& u, double step, double rho, Matrix& z) {
  const Eigen::Index p = u.rows();
  if (rho <= 0.0) {
    z = Matrix::Zero(p, p);
    return 0.0;
  }
  z = (0.5 * step / rho) * (u + u.transpose());
  z.diagonal().setZero();
  const double clip = std::max(0.0, norm_linf(z) - 1.0);
  z = z.cwiseMax(-1.0).cwiseMin(1.0);
  return clip;
}

FpsSolution run_admm(const SymMat& s, const SolverConfig& cfg) {
  const int p = s.dim();
  cfg.validate(p);
  if (!s.all_finite()) fail(ErrorKind::InvalidInput, "solve_fps: non-finite entries in S");

  const double step = cfg.admm_step;
  const double tau = cfg.tau_en;
  const double level = cfg.rho / step;
  const double tol_primal = cfg.eps_primal * std::sqrt(static_cast<double>(p));
  const double tol_dual = cfg.eps_dual * std::sqrt(static_cast<double>(p));

  Matrix y, u;
  if (cfg.init) {
    y = cfg.init->y;
    u = cfg.init->u;
  } else {
    y = (static_cast<double>(cfg.k) / p) * Matrix::Identity(p, p);
    u = Matrix::Zero(p, p);
  }
  Matrix y_prev(p, p), arg(p, p);
  FantopePoint h;

  FpsSolution sol;
  sol.rho = cfg.rho;
  sol.tau_en = tau;

  int it = 0;
  double r_primal = 0.0, r_dual = 0.0;
  bool done = false;
  while (it < cfg.max_iters) {
    ++it;
    // H-update: Fantope projection of the completed square.
    if (tau > 0.0)
      arg = (s.mat() + step * (y - u)) / (tau + step);
    else
      arg = y - u + s.mat() / step;
    h = fantope_project(SymMat(arg), cfg.k, cfg.policy).point;

    // Y-update: entrywise soft-threshold.
    y_prev.swap(y);
    kernels::soft_threshold(h.mat() + u, level, y);

    u += h.mat() - y;

    r_primal = kernels::frobenius_distance(h.mat(), y);
    r_dual = step * kernels::frobenius_distance(y, y_prev);
    if (cfg.record_history)
      sol.history.push_back({r_primal, r_dual, fps_objective(s, h.mat(), cfg.rho, tau)});
    if (r_primal <= tol_primal && r_dual <= tol_dual) {
      done = true;
      break;
    }
  }

  sol.H = std::move(h);
  sol.iters = it;
  sol.primal_residual = r_primal;
  sol.dual_residual = r_dual;
  sol.converged = done;
  sol.dual_clip = recover_dual(u, step, cfg.rho, sol.Z);
  sol.objective = fps_objective(s, sol.H.mat(), cfg.rho, tau);
  const double dmax = sol.H.mat().diagonal().maxCoeff();
  sol.support = SupportSet::from_diagonal(sol.H.mat(), cfg.support_tol * std::max(dmax, 0.0));
  sol.kkt = check_kkt(s, sol.H.mat(), sol.Z, cfg.rho, cfg.k, tau, cfg.support_tol);
  sol.state = WarmStart{std::move(y), std::move(u)};

  if (!done) throw NotConverged(std::move(sol));
  return sol;
}

}  // namespace

FpsSolution solve_fps(const SymMat& s, const SolverConfig& config) { return run_admm(s, config); }

FpsSolution solve_fps_en(const SymMat& s, const SolverConfig& config) {
  if (!(config.tau_en > 0.0)) fail(ErrorKind::InvalidInput, "solve_fps_en: tau_en must be > 0");
  return run_admm(s, config);
}

KktReport check_kkt(const SymMat& s, const Matrix& h, const Matrix& z, double rho, int k, double tau_en,
                    double support_tol) {
  KktReport r;
  const Eigen::Index p = h.rows();
  // With rho = 0 the l1 subgradient drops out of stationarity.
  if (rho > 0.0) {
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index i = 0; i < p; ++i) {
        if (i == j || std::abs(h(i, j)) <= support_tol) continue;
        const double sgn = h(i, j) > 0.0 ? 1.0 : -1.0;
        r.sign_mismatch = std::max(r.sign_mismatch, std::abs(z(i, j) - sgn));
      }
  }
  r.dual_bound_violation = std::max(0.0, norm_linf(z) - 1.0);

  const Matrix m = s.mat() - rho * z;
  const SymMat msym(m);
  const Spectrum spec = eig_sym(msym);
  if (tau_en > 0.0) {
    // H must maximize <M, X> - tau/2 ||X||^2, whose maximizer is P(M / tau).
    Spectrum scaled = spec;
    scaled.values /= tau_en;
    const Matrix best = fantope_project(scaled, k).point.mat();
    auto value = [&](const Matrix& x) { return (m.array() * x.array()).sum() - 0.5 * tau_en * x.squaredNorm(); };
    r.fantope_optimality_gap = value(best) - value(h);
  } else {
    r.fantope_optimality_gap = spec.top_sum(k) - (m.array() * h.array()).sum();
  }
  return r;
}

KktReport check_kkt(const SymMat& s, const FpsSolution& sol, double rho) {
  return check_kkt(s, sol.H.mat(), sol.Z, rho, sol.H.k(), sol.tau_en, 1e-6);
}

ConstrainedSolution solve_fps_constrained(const SymMat& s, double r, int k, const SolverConfig& config) {
  const int p = s.dim();
  if (k < 1 || k > p) fail(ErrorKind::InvalidInput, "solve_fps_constrained: need 0 < k <= p");
  // ||H||_{1,1} >= trace(H) = k on the Fantope.
  if (r < k) fail(ErrorKind::InfeasibleConstraint, "radius R must be >= k");

  SolverConfig cfg = config;
  cfg.k = k;
  cfg.tau_en = 0.0;
  const double upper = r * (1.0 + cfg.constraint_slack);
  const double lower = r * (1.0 - cfg.constraint_slack);

  ConstrainedSolution out;
  auto evaluate = [&](double rho, const FpsSolution* warm) {
    cfg.rho = rho;
    cfg.init.reset();
    if (warm) {
      // Z = step U / rho is what varies slowly along the path, so carry it over.
      const double ratio = warm->rho > 0.0 && rho > 0.0 ? warm->rho / rho : 0.0;
      cfg.init = WarmStart{warm->state.y, ratio * warm->state.u};
    }
    // Some penalties on the path sit where a diagonal entry of H is about to
    // vanish; there the splitting crawls at a fixed step. Restart cold with a
    // larger step before giving up.
    FpsSolution sol;
    for (int attempt = 0;; ++attempt) {
      try {
        sol = solve_fps(s, cfg);
        break;
      } catch (const NotConverged&) {
        if (attempt == 2) throw;
        cfg.admm_step *= 10.0;
        cfg.init.reset();
      }
    }
    cfg.admm_step = config.admm_step;
    out.trace.emplace_back(rho, norm_l11(sol.H.mat()));
    return sol;
  };

  FpsSolution unpenalized = evaluate(0.0, nullptr);
  if (out.trace.back().second <= upper) {
    out.solution = std::move(unpenalized);
    out.rho_star = 0.0;
    return out;
  }

  // For rho >= max_{i != j} |S_ij| the diagonal indicator is optimal, so the
  // search starts feasible and halves down. Small penalties are the slow ones
  // for the splitting and are never visited unless the bracket needs them.
  Matrix off = s.mat();
  off.diagonal().setZero();
  double lo = 0.0;
  double hi = std::max(norm_linf(off), 1e-8);
  FpsSolution best = evaluate(hi, &unpenalized);
  int doublings = 0;
  while (out.trace.back().second > upper) {
    if (++doublings > 60) {
      std::ostringstream os;
      os << "could not bracket ||H||_{1,1} <= " << r << "; trace:";
      for (auto [rho, l1] : out.trace) os << " (" << rho << ", " << l1 << ")";
      fail(ErrorKind::SearchFailure, os.str());
    }
    lo = hi;
    hi *= 2.0;
    best = evaluate(hi, &best);
  }
  for (int halvings = 0; halvings < 60 && lo == 0.0; ++halvings) {
    const double mid = 0.5 * hi;
    FpsSolution trial = evaluate(mid, &best);
    if (out.trace.back().second <= upper) {
      hi = mid;
      best = std::move(trial);
    } else {
      lo = mid;
    }
  }
  double best_l1 = norm_l11(best.H.mat());

  for (int step = 0; step < 40 && best_l1 < lower; ++step) {
    const double mid = 0.5 * (lo + hi);
    FpsSolution trial = evaluate(mid, &best);
    const double l1 = out.trace.back().second;
    if (l1 <= upper) {
      hi = mid;
      best = std::move(trial);
      best_l1 = l1;
    } else {
      lo = mid;
    }
  }
  out.rho_star = hi;
  out.solution = std::move(best);
  return out;
}

UniquenessResult uniqueness_probe(const SymMat& s, const SolverConfig& config) {
  if (config.tau_en != 0.0) fail(ErrorKind::InvalidInput, "uniqueness_probe: expects tau_en == 0");
  UniquenessResult res;
  res.plain = solve_fps(s, config);

  const SymMat m(s.mat() - config.rho * res.plain.Z);
  const Spectrum spec = eig_sym(m, config.policy);
  res.empirical_gap = spec.gap(config.k);
  if (!(res.empirical_gap > config.policy.gap_tol))
    fail(ErrorKind::GapCollapsed, "empirical gap of S - rho Z is " + std::to_string(res.empirical_gap));

  // Any 0 < tau <= gap keeps the elastic-net maximizer equal to the plain one
  // when the plain one is unique; half the gap stays clear of the boundary.
  res.tau = std::isfinite(res.empirical_gap) ? 0.5 * res.empirical_gap : 1.0;
  SolverConfig en = config;
  en.tau_en = res.tau;
  en.init.reset();
  res.elastic = solve_fps_en(s, en);
  res.discrepancy = kernels::frobenius_distance(res.plain.H.mat(), res.elastic.H.mat());
  res.unique = res.discrepancy <= 1e-5;
  return res;
}

}  // namespace fps
