#include "fps/experiments.hpp"

#include "fps/diagnostics.hpp"
#include "fps/kernels.hpp"
#include "fps/models.hpp"
#include "fps/rng.hpp"
#include "fps/solver.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#ifndef FPS_VERSION
#define FPS_VERSION "unknown"
#endif

namespace fps {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Default step for clique Gram matrices (||S|| roughly 4 to 15 at p = 200).
constexpr double kCliqueStep = 2.0;

struct Cell {
  int p = 0;
  int s = 0;
  int n = 0;
  double rho = kNaN;
  double R = kNaN;
};

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
    fail(ErrorKind::InvalidInput, what + ": not an unsigned integer: '" + text + "'");
  return v;
}

SolverConfig solver_config(const ExperimentConfig& cfg, double rho, double lambda1) {
  SolverConfig sc;
  sc.rho = rho;
  sc.k = cfg.k;
  sc.eps_primal = sc.eps_dual = cfg.eps;
  sc.max_iters = cfg.max_iters;
  sc.constraint_slack = cfg.constraint_slack;
  // The iteration count of the splitting scales with ||S|| / step, so a step
  // on the scale of the leading eigenvalue keeps it roughly size-independent.
  sc.admm_step = std::isnan(cfg.admm_step) ? std::max(1.0, lambda1) : cfg.admm_step;
  return sc;
}

void record_solution(TrialRecord& r, const FpsSolution& sol) {
  r.objective = sol.objective;
  r.iters = sol.iters;
  r.converged = sol.converged;
  r.kkt_sign_mismatch = sol.kkt.sign_mismatch;
  r.kkt_dual_bound = sol.kkt.dual_bound_violation;
  r.kkt_fantope_gap = sol.kkt.fantope_optimality_gap;
}

void record_support(TrialRecord& r, const SupportSet& est, const SupportSet& truth) {
  const SupportError e = support_error(est, truth);
  r.false_pos = e.false_pos;
  r.false_neg = e.false_neg;
  r.exact_recovery = e.exact;
}

using TrialFn = std::function<void(const Cell&, TrialRecord&)>;

std::vector<TrialRecord> run_cells(const ExperimentConfig& cfg, const std::string& kind,
                                   const std::vector<Cell>& cells, const TrialFn& fn) {
  const int trials = cfg.trials;
  const long long total = static_cast<long long>(cells.size()) * trials;
  std::vector<TrialRecord> records(static_cast<std::size_t>(total));

  // Trials are independent; each owns its record slot, so output order is
  // (cell, trial) whatever the completion order.
#pragma omp parallel for schedule(dynamic, 1)
  for (long long idx = 0; idx < total; ++idx) {
    const int c = static_cast<int>(idx / trials);
    const int t = static_cast<int>(idx % trials);
    const Cell& cell = cells[c];
    TrialRecord& r = records[idx];
    r.kind = kind;
    r.cell = c;
    r.trial = t;
    r.seed = trial_seed(cfg.seed, c, t);
    r.n = cell.n;
    r.p = cell.p;
    r.s = cell.s;
    r.k = cfg.k;
    r.rho = cell.rho;
    r.R = cell.R;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(cell, r);
    } catch (const NotConverged& e) {
      record_solution(r, e.partial());
      r.error = std::string("NotConverged: ") + e.what();
    } catch (const FpsError& e) {
      r.error = std::string(to_string(e.kind())) + ": " + e.what();
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    if (cfg.timing)
      r.wall_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  }
  return records;
}

std::vector<double> or_nan(const std::vector<double>& v) { return v.empty() ? std::vector<double>{kNaN} : v; }

void phase_trial(const ExperimentConfig& cfg, const Cell& c, TrialRecord& r) {
  const int k = cfg.k;
  const SupportSet J = SupportSet::range(0, c.s, c.p);
  const ModelInstance m = gen_spiked(c.p, k, J, cfg.spikes, cfg.noise, derive_seed(r.seed, 0));
  const SymMat S = sample_covariance(sample_gaussian(m, c.n, derive_seed(r.seed, 1)));
  const double lambda1 = eig_sym(S).values(0);

  const double sigma = std::isnan(cfg.sigma_hat) ? cfg.sigma_multiple * lambda1 : cfg.sigma_hat;
  const double alpha = std::isnan(cfg.alpha) ? check_lcc(m.sigma, k, J).alpha : cfg.alpha;
  double rho = c.rho;
  if (std::isnan(rho)) {
    if (!(alpha > 0.0)) fail(ErrorKind::InvalidInput, "LCC constant is 0; the rate-based penalty is undefined");
    rho = sigma / alpha * std::sqrt(std::log(static_cast<double>(c.p)) / c.n);
  }
  r.rho = rho;
  r.w_inf = entrywise_error(S, m.sigma);

  if (rho > 0.0) {
    const ConditionReport t1 = check_theorem1(m.sigma, S, k, J, rho);
    r.sps_ok = t1.sps_ok;
    r.lcc_alpha = t1.lcc_alpha;
    r.det_cond1_ok = t1.det_cond1_ok;
    r.det_cond2_ok = t1.det_cond2_ok;
    r.signal_ok = t1.signal_ok;
    r.entrywise_min_ok = t1.entrywise_min_ok;
  }
  if (alpha > 0.0 && alpha <= 1.0 && c.n >= std::log(static_cast<double>(c.p)))
    r.prob_sample_ok = check_theorem2(m.sigma, k, J, c.n, sigma, alpha).prob_sample_ok;

  const SolverConfig sc = solver_config(cfg, rho, lambda1);
  FpsSolution sol;
  bool solved = false;
  if (cfg.certify && rho > 0.0) {
    try {
      UniquenessResult u = uniqueness_probe(S, sc);
      r.unique = u.unique;
      r.uniqueness_discrepancy = u.discrepancy;
      sol = std::move(u.plain);
      solved = true;
    } catch (const FpsError& e) {
      if (e.kind() != ErrorKind::GapCollapsed) throw;
    }
  }
  if (!solved) sol = solve_fps(S, sc);
  record_solution(r, sol);
  record_support(r, sol.support, J);
  r.frob_error = kernels::frobenius_distance(sol.H.mat(), m.pi.mat());

  if (cfg.certify && rho > 0.0) {
    const WitnessReport w = build_witness(m.sigma, S, k, J, rho, sc);
    r.witness_valid = w.witness_valid;
    r.q_deviation = w.Q_deviation;
    r.q_bound = w.Q_bound;
    r.dual_offsupport_max = w.dual_offsupport_max;
  }
}

void clique_trial(const ExperimentConfig& cfg, const Cell& c, TrialRecord& r) {
  const PlantedClique g = gen_planted_clique(c.p, c.s, derive_seed(r.seed, 0));
  const double rho =
      std::isnan(c.rho) ? cfg.rho_multiple * std::sqrt(std::log(static_cast<double>(c.p)) / (c.p - 1)) : c.rho;
  r.rho = rho;
  r.w_inf = entrywise_error(g.s, g.sigma);
  SolverConfig sc = solver_config(cfg, rho, 1.0);
  if (std::isnan(cfg.admm_step)) sc.admm_step = kCliqueStep;
  const FpsSolution sol = solve_fps(g.s, sc);
  record_solution(r, sol);
  record_support(r, sol.support, g.clique);
  r.frob_error = kernels::frobenius_distance(sol.H.mat(), top_k_projector(g.sigma, cfg.k).point.mat());
}

void persist_trial(const ExperimentConfig& cfg, const Cell& c, TrialRecord& r) {
  const int k = cfg.k;
  const SupportSet J = SupportSet::range(0, c.s, c.p);
  const ModelInstance m = gen_spiked(c.p, k, J, cfg.spikes, cfg.noise, derive_seed(r.seed, 0));
  const SymMat S = c.n == 0 ? m.sigma : sample_covariance(sample_gaussian(m, c.n, derive_seed(r.seed, 1)));
  const double lambda1 = eig_sym(S).values(0);
  r.w_inf = entrywise_error(S, m.sigma);
  const PersistenceResult res = persistence_gap(m.sigma, S, k, c.R, solver_config(cfg, 0.0, lambda1));
  r.rho = res.rho_emp;
  r.pop_value = res.pop_value;
  r.emp_value = res.emp_value;
  r.persist_gap = res.gap;
  r.persist_bound = res.bound;
  r.sandwich_ok = res.lower_ok && res.upper_ok;
  r.converged = true;
  // Worst of the two penalized solves.
  r.objective = res.objective_emp;
  r.kkt_sign_mismatch = std::max(res.kkt_pop.sign_mismatch, res.kkt_emp.sign_mismatch);
  r.kkt_dual_bound = std::max(res.kkt_pop.dual_bound_violation, res.kkt_emp.dual_bound_violation);
  r.kkt_fantope_gap = std::max(res.kkt_pop.fantope_optimality_gap, res.kkt_emp.fantope_optimality_gap);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::string cell_str(double x) { return std::isnan(x) ? std::string() : format_double(x); }

Json maybe(double x) { return std::isfinite(x) ? Json(x) : Json("auto"); }

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::InvalidInput, "experiment config: " + what); };
  if (model != "spiked") bad("unknown model '" + model + "' (supported: spiked)");
  if (n_grid.empty() || p_grid.empty() || s_grid.empty()) bad("grids must be non-empty");
  if (trials < 1) bad("trials must be >= 1");
  if (k < 1) bad("k must be >= 1");
  for (int n : n_grid)
    if (n < 0) bad("n must be >= 0");
  for (int p : p_grid)
    if (p < 1) bad("p must be >= 1");
  for (int s : s_grid)
    if (s < 1) bad("s must be >= 1");
  for (double r : rho_grid)
    if (!(r >= 0.0)) bad("rho must be >= 0");
  for (double r : r_grid)
    if (!(r > 0.0)) bad("R must be > 0");
  if (!(eps > 0.0)) bad("eps must be > 0");
  if (max_iters < 1) bad("max_iters must be >= 1");
  if (!(constraint_slack > 0.0)) bad("constraint_slack must be > 0");
  if (!std::isnan(admm_step) && !(admm_step > 0.0)) bad("admm_step must be > 0");
  if (!(rho_multiple >= 0.0)) bad("rho_multiple must be >= 0");
}

ExperimentConfig experiment_config_from(const KeyValueConfig& kv) {
  static const std::set<std::string> known = {
      "model",  "n",       "p",     "s",          "rho",          "R",         "k",     "spikes",
      "noise",  "sigma_hat", "sigma_multiple", "alpha", "rho_multiple", "trials", "seed", "output",
      "certify", "timing", "eps",   "admm_step",  "max_iters",    "constraint_slack"};
  for (const std::string& key : kv.keys())
    if (!known.count(key)) fail(ErrorKind::InvalidInput, "config: unknown key '" + key + "'");

  ExperimentConfig c;
  auto ints = [&](const std::string& key, std::vector<int>& dst) {
    if (!kv.has(key)) return;
    dst.clear();
    for (const auto& v : kv.list(key)) dst.push_back(static_cast<int>(parse_int(v, key)));
  };
  auto reals = [&](const std::string& key, std::vector<double>& dst) {
    if (!kv.has(key)) return;
    dst.clear();
    for (const auto& v : kv.list(key)) dst.push_back(parse_double(v, key));
  };
  auto real = [&](const std::string& key, double& dst) {
    if (!kv.has(key)) return;
    const std::string& v = kv.scalar(key);
    dst = v == "auto" ? kNaN : parse_double(v, key);
  };
  if (kv.has("model")) c.model = kv.scalar("model");
  ints("n", c.n_grid);
  ints("p", c.p_grid);
  ints("s", c.s_grid);
  reals("rho", c.rho_grid);
  reals("R", c.r_grid);
  if (kv.has("k")) c.k = static_cast<int>(parse_int(kv.scalar("k"), "k"));
  reals("spikes", c.spikes);
  real("noise", c.noise);
  real("sigma_hat", c.sigma_hat);
  real("sigma_multiple", c.sigma_multiple);
  real("alpha", c.alpha);
  real("rho_multiple", c.rho_multiple);
  if (kv.has("trials")) c.trials = static_cast<int>(parse_int(kv.scalar("trials"), "trials"));
  if (kv.has("seed")) c.seed = parse_u64(kv.scalar("seed"), "seed");
  if (kv.has("output")) c.output_path = kv.scalar("output");
  if (kv.has("certify")) c.certify = parse_bool(kv.scalar("certify"), "certify");
  if (kv.has("timing")) c.timing = parse_bool(kv.scalar("timing"), "timing");
  real("eps", c.eps);
  real("admm_step", c.admm_step);
  if (kv.has("max_iters")) c.max_iters = static_cast<int>(parse_int(kv.scalar("max_iters"), "max_iters"));
  real("constraint_slack", c.constraint_slack);
  c.validate();
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["model"] = c.model;
  j["n"] = c.n_grid;
  j["p"] = c.p_grid;
  j["s"] = c.s_grid;
  j["rho"] = c.rho_grid.empty() ? Json("auto") : Json(c.rho_grid);
  j["R"] = c.r_grid.empty() ? Json("auto") : Json(c.r_grid);
  j["k"] = c.k;
  j["spikes"] = c.spikes;
  j["noise"] = c.noise;
  j["sigma_hat"] = maybe(c.sigma_hat);
  j["sigma_multiple"] = c.sigma_multiple;
  j["alpha"] = maybe(c.alpha);
  j["rho_multiple"] = c.rho_multiple;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["output"] = c.output_path;
  j["certify"] = c.certify;
  j["timing"] = c.timing;
  j["eps"] = c.eps;
  j["admm_step"] = maybe(c.admm_step);
  j["max_iters"] = c.max_iters;
  j["constraint_slack"] = c.constraint_slack;
  return j;
}

std::uint64_t trial_seed(std::uint64_t base, int cell, int trial) {
  return derive_seed(derive_seed(base, static_cast<std::uint64_t>(cell)), static_cast<std::uint64_t>(trial));
}

std::vector<TrialRecord> run_phase(const ExperimentConfig& cfg) {
  cfg.validate();
  for (int n : cfg.n_grid)
    if (n < 2) fail(ErrorKind::InvalidInput, "phase: every n must be >= 2");
  std::vector<Cell> cells;
  for (int p : cfg.p_grid)
    for (int s : cfg.s_grid)
      for (int n : cfg.n_grid)
        for (double rho : or_nan(cfg.rho_grid)) cells.push_back({p, s, n, rho, kNaN});
  return run_cells(cfg, "phase", cells, [&](const Cell& c, TrialRecord& r) { phase_trial(cfg, c, r); });
}

std::vector<TrialRecord> run_clique(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Cell> cells;
  for (int p : cfg.p_grid)
    for (int s : cfg.s_grid)
      for (double rho : or_nan(cfg.rho_grid)) cells.push_back({p, s, 0, rho, kNaN});
  return run_cells(cfg, "clique", cells, [&](const Cell& c, TrialRecord& r) { clique_trial(cfg, c, r); });
}

std::vector<TrialRecord> run_persist(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<double> radii = cfg.r_grid.empty() ? std::vector<double>{2.0 * cfg.k} : cfg.r_grid;
  std::vector<Cell> cells;
  for (int p : cfg.p_grid)
    for (int s : cfg.s_grid)
      for (int n : cfg.n_grid)
        for (double R : radii) cells.push_back({p, s, n, kNaN, R});
  return run_cells(cfg, "persist", cells, [&](const Cell& c, TrialRecord& r) { persist_trial(cfg, c, r); });
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "kind",          "cell",           "trial",          "seed",           "n",
      "p",             "s",              "k",              "rho",            "R",
      "exact_recovery", "false_pos",     "false_neg",      "frob_error",     "objective",
      "iters",         "wall_ms",        "converged",      "w_inf",          "sps_ok",
      "lcc_alpha",     "det_cond1_ok",   "det_cond2_ok",   "signal_ok",      "entrywise_min_ok",
      "prob_sample_ok", "unique",        "uniqueness_discrepancy", "witness_valid", "q_deviation",
      "q_bound",       "dual_offsupport_max", "kkt_sign_mismatch", "kkt_dual_bound", "kkt_fantope_gap",
      "pop_value",     "emp_value",      "persist_gap",    "persist_bound",  "sandwich_ok",
      "error"};
  return cols;
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const TrialRecord& r : records) {
    const std::vector<std::string> row = {
        r.kind,
        std::to_string(r.cell),
        std::to_string(r.trial),
        std::to_string(r.seed),
        std::to_string(r.n),
        std::to_string(r.p),
        std::to_string(r.s),
        std::to_string(r.k),
        cell_str(r.rho),
        cell_str(r.R),
        std::to_string(int(r.exact_recovery)),
        std::to_string(r.false_pos),
        std::to_string(r.false_neg),
        cell_str(r.frob_error),
        cell_str(r.objective),
        std::to_string(r.iters),
        std::to_string(r.wall_ms),
        std::to_string(int(r.converged)),
        cell_str(r.w_inf),
        std::to_string(int(r.sps_ok)),
        cell_str(r.lcc_alpha),
        std::to_string(int(r.det_cond1_ok)),
        std::to_string(int(r.det_cond2_ok)),
        std::to_string(int(r.signal_ok)),
        std::to_string(int(r.entrywise_min_ok)),
        std::to_string(int(r.prob_sample_ok)),
        std::to_string(int(r.unique)),
        cell_str(r.uniqueness_discrepancy),
        std::to_string(int(r.witness_valid)),
        cell_str(r.q_deviation),
        cell_str(r.q_bound),
        cell_str(r.dual_offsupport_max),
        cell_str(r.kkt_sign_mismatch),
        cell_str(r.kkt_dual_bound),
        cell_str(r.kkt_fantope_gap),
        cell_str(r.pop_value),
        cell_str(r.emp_value),
        cell_str(r.persist_gap),
        cell_str(r.persist_bound),
        std::to_string(int(r.sandwich_ok)),
        csv_escape(r.error)};
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
  write_records_csv(out, records);
}

Json summarize(const std::string& command, const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
  std::map<int, std::vector<const TrialRecord*>> by_cell;
  for (const TrialRecord& r : records) by_cell[r.cell].push_back(&r);

  Json cells = Json::array();
  for (const auto& [id, rs] : by_cell) {
    const TrialRecord& first = *rs.front();
    int failures = 0, converged = 0, recovered = 0, unique = 0, witness = 0, sandwich = 0;
    std::vector<double> gaps, w_inf, rhos, iters;
    for (const TrialRecord* r : rs) {
      failures += !r->error.empty();
      converged += r->converged;
      recovered += r->exact_recovery;
      unique += r->unique;
      witness += r->witness_valid;
      sandwich += r->sandwich_ok;
      if (!std::isnan(r->persist_gap)) gaps.push_back(r->persist_gap);
      if (!std::isnan(r->w_inf)) w_inf.push_back(r->w_inf);
      if (!std::isnan(r->rho)) rhos.push_back(r->rho);
      iters.push_back(r->iters);
    }
    const double count = static_cast<double>(rs.size());
    Json c;
    c["cell"] = id;
    c["n"] = first.n;
    c["p"] = first.p;
    c["s"] = first.s;
    c["k"] = first.k;
    c["R"] = number(first.R);
    c["trials"] = rs.size();
    c["failures"] = failures;
    c["converged"] = converged;
    c["median_rho"] = number(median(rhos));
    c["median_iters"] = number(median(iters));
    c["median_w_inf"] = number(median(w_inf));
    if (command == "persist") {
      c["sandwich_ok"] = sandwich;
      c["median_gap"] = number(median(gaps));
      c["max_gap"] = gaps.empty() ? Json(nullptr) : Json(*std::max_element(gaps.begin(), gaps.end()));
    } else {
      c["recovered"] = recovered;
      c["recovery_frequency"] = recovered / count;
      if (command == "clique" && !w_inf.empty() && first.p > 1)
        c["median_entrywise_constant"] =
            median(w_inf) / std::sqrt(std::log(static_cast<double>(first.p)) / (first.p - 1));
      if (cfg.certify) {
        c["unique"] = unique;
        c["witness_valid"] = witness;
      }
    }
    cells.push_back(std::move(c));
  }

  Json j;
  j["command"] = command;
  j["version"] = artifact_version();
  j["config"] = to_json(cfg);
  j["records"] = records.size();
  j["cells"] = std::move(cells);
  return j;
}

void apply_seed_override(ExperimentConfig& cfg) {
  if (const char* env = std::getenv("FPS_SEED"); env && *env) cfg.seed = parse_u64(env, "FPS_SEED");
}

const char* artifact_version() { return FPS_VERSION; }

}  // namespace fps
