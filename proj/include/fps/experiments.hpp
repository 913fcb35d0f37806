#pragma once

#include "fps/common.hpp"
#include "fps/io.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace fps {

/// Monte-Carlo sweep description shared by the phase, clique and persist drivers.
/// Unset reals are NaN and resolved per trial (see resolve notes on each field).
struct ExperimentConfig {
  std::string model = "spiked";
  std::vector<int> n_grid{2000};  // 0 in a persist grid means S = Sigma
  std::vector<int> p_grid{100};
  std::vector<int> s_grid{5};
  std::vector<double> rho_grid;  // explicit penalties; empty selects the rate-based penalty
  std::vector<double> r_grid;    // persist radii; empty means R = 2k
  int k = 1;
  std::vector<double> spikes{3.0};
  double noise = 1.0;
  double sigma_hat = std::numeric_limits<double>::quiet_NaN();  // NaN: sigma_multiple * lambda_1(S)
  double sigma_multiple = 3.0;
  double alpha = std::numeric_limits<double>::quiet_NaN();  // NaN: from the population LCC
  double rho_multiple = 0.85;  // clique penalty in units of sqrt(log p / (p - 1))
  int trials = 20;
  std::uint64_t seed = 1;
  std::string output_path;
  bool certify = false;  // uniqueness probe and witness on every trial
  bool timing = false;   // wall_ms stays 0 unless set, keeping reruns byte-identical

  // solver overrides
  double eps = 1e-7;
  double admm_step = std::numeric_limits<double>::quiet_NaN();  // NaN: max(1, lambda_1(S)); 2 for clique
  int max_iters = 20000;
  double constraint_slack = 1e-6;

  void validate() const;
};

ExperimentConfig experiment_config_from(const KeyValueConfig& kv);
Json to_json(const ExperimentConfig& cfg);

struct TrialRecord {
  std::string kind;
  int cell = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  int n = 0;
  int p = 0;
  int s = 0;
  int k = 0;
  double rho = std::numeric_limits<double>::quiet_NaN();
  double R = std::numeric_limits<double>::quiet_NaN();
  bool exact_recovery = false;
  int false_pos = 0;
  int false_neg = 0;
  double frob_error = std::numeric_limits<double>::quiet_NaN();
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iters = 0;
  long long wall_ms = 0;
  bool converged = false;
  double w_inf = std::numeric_limits<double>::quiet_NaN();
  bool sps_ok = false;
  double lcc_alpha = std::numeric_limits<double>::quiet_NaN();
  bool det_cond1_ok = false;
  bool det_cond2_ok = false;
  bool signal_ok = false;
  bool entrywise_min_ok = false;
  bool prob_sample_ok = false;
  bool unique = false;
  double uniqueness_discrepancy = std::numeric_limits<double>::quiet_NaN();
  bool witness_valid = false;
  double q_deviation = std::numeric_limits<double>::quiet_NaN();
  double q_bound = std::numeric_limits<double>::quiet_NaN();
  double dual_offsupport_max = std::numeric_limits<double>::quiet_NaN();
  double kkt_sign_mismatch = std::numeric_limits<double>::quiet_NaN();
  double kkt_dual_bound = std::numeric_limits<double>::quiet_NaN();
  double kkt_fantope_gap = std::numeric_limits<double>::quiet_NaN();
  double pop_value = std::numeric_limits<double>::quiet_NaN();
  double emp_value = std::numeric_limits<double>::quiet_NaN();
  double persist_gap = std::numeric_limits<double>::quiet_NaN();
  double persist_bound = std::numeric_limits<double>::quiet_NaN();
  bool sandwich_ok = false;
  std::string error;
};

/// Sample -> solve -> score over the (p, s, n, rho) grid of a spiked model.
std::vector<TrialRecord> run_phase(const ExperimentConfig& cfg);
/// Planted clique recovery over the (p, s) grid.
std::vector<TrialRecord> run_clique(const ExperimentConfig& cfg);
/// Population vs empirical constrained solutions over the (p, s, n, R) grid.
std::vector<TrialRecord> run_persist(const ExperimentConfig& cfg);

/// Seed for (cell, trial): two rounds of stream splitting from the base seed.
std::uint64_t trial_seed(std::uint64_t base, int cell, int trial);

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records);
const std::vector<std::string>& record_columns();

/// Per-cell aggregates plus the resolved config and artifact version.
Json summarize(const std::string& command, const ExperimentConfig& cfg, const std::vector<TrialRecord>& records);

/// FPS_SEED from the environment, when set, replaces cfg.seed.
void apply_seed_override(ExperimentConfig& cfg);

const char* artifact_version();

}  // namespace fps
