// Command-line front end: solve, phase, clique, persist, certify, model.
//
// Exit codes: 0 success, 1 input error, 2 non-convergence, 3 certification failure.

#include "fps/diagnostics.hpp"
#include "fps/experiments.hpp"
#include "fps/io.hpp"
#include "fps/models.hpp"
#include "fps/rng.hpp"
#include "fps/solver.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

namespace {

enum Exit { kOk = 0, kInput = 1, kNotConverged = 2, kCertify = 3 };

int exit_for(fps::ErrorKind kind) {
  switch (kind) {
    case fps::ErrorKind::NotConverged:
    case fps::ErrorKind::NumericalFailure:
      return kNotConverged;
    case fps::ErrorKind::SpsViolated:
    case fps::ErrorKind::GapCollapsed:
      return kCertify;
    default:
      return kInput;
  }
}

void emit(const fps::Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) fps::fail(fps::ErrorKind::InvalidInput, "cannot write " + path);
  out << j.dump(2) << '\n';
}

fps::SupportSet parse_support(const std::string& text, int p) {
  std::vector<int> idx;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const long long v = fps::parse_int(item, "--J");
    if (v < 0 || v >= p) fps::fail(fps::ErrorKind::InvalidInput, "--J: index " + std::to_string(v) + " out of range");
    idx.push_back(static_cast<int>(v));
  }
  return fps::SupportSet(idx, p);
}

struct SolveArgs {
  std::string matrix;
  int k = 1;
  double rho = 0.0;
  double tau_en = 0.0;
  double step = 1.0;
  double eps = 1e-7;
  int max_iters = 20000;
  std::string h_out;
  std::string json_out;
};

int cmd_solve(const SolveArgs& a) {
  const fps::SymMat s = fps::read_symmetric_csv(a.matrix);
  fps::SolverConfig cfg;
  cfg.k = a.k;
  cfg.rho = a.rho;
  cfg.tau_en = a.tau_en;
  cfg.admm_step = a.step;
  cfg.eps_primal = cfg.eps_dual = a.eps;
  cfg.max_iters = a.max_iters;

  fps::FpsSolution sol;
  int code = kOk;
  try {
    sol = a.tau_en > 0.0 ? fps::solve_fps_en(s, cfg) : fps::solve_fps(s, cfg);
  } catch (const fps::NotConverged& e) {
    std::cerr << "fps: " << e.what() << '\n';
    sol = e.partial();
    code = kNotConverged;
  }
  if (!a.h_out.empty()) fps::write_matrix_csv(a.h_out, sol.H.mat());
  fps::Json j = fps::solution_summary(sol);
  if (!a.h_out.empty()) j["H_path"] = a.h_out;
  emit(j, a.json_out);
  return code;
}

struct SweepArgs {
  std::string config;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string summary;
  bool timing = false;
};

fps::ExperimentConfig load_sweep(const SweepArgs& a) {
  fps::ExperimentConfig cfg =
      a.config.empty() ? fps::ExperimentConfig{} : fps::experiment_config_from(fps::KeyValueConfig::load(a.config));
  fps::apply_seed_override(cfg);
  if (a.seed) cfg.seed = *a.seed;
  if (a.trials) cfg.trials = *a.trials;
  if (!a.output.empty()) cfg.output_path = a.output;
  if (a.timing) cfg.timing = true;
  cfg.validate();
  return cfg;
}

int finish_sweep(const std::string& command, const fps::ExperimentConfig& cfg,
                 const std::vector<fps::TrialRecord>& records, const std::string& summary_path) {
  if (cfg.output_path.empty() || cfg.output_path == "-") {
    fps::write_records_csv(std::cout, records);
  } else {
    fps::write_records_csv(cfg.output_path, records);
  }
  std::string path = summary_path;
  if (path.empty() && !cfg.output_path.empty() && cfg.output_path != "-") path = cfg.output_path + ".summary.json";
  const fps::Json summary = fps::summarize(command, cfg, records);
  if (path.empty())
    std::cerr << summary.dump(2) << '\n';
  else
    emit(summary, path);
  return kOk;
}

struct CliqueArgs {
  std::vector<int> p{200};
  std::vector<int> s{40};
  int trials = 20;
  std::uint64_t seed = 1;
  double rho_multiple = 0.85;
  std::vector<double> rho;
  double step = std::nan("");
  double eps = 1e-7;
  int max_iters = 20000;
  std::string output;
  std::string summary;
  bool timing = false;
};

int cmd_clique(const CliqueArgs& a) {
  fps::ExperimentConfig cfg;
  cfg.p_grid = a.p;
  cfg.s_grid = a.s;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  fps::apply_seed_override(cfg);
  cfg.rho_multiple = a.rho_multiple;
  cfg.rho_grid = a.rho;
  cfg.admm_step = a.step;
  cfg.eps = a.eps;
  cfg.max_iters = a.max_iters;
  cfg.k = 1;
  cfg.output_path = a.output;
  cfg.timing = a.timing;
  cfg.validate();
  for (int p : cfg.p_grid)
    for (int s : cfg.s_grid)
      if (s > p) fps::fail(fps::ErrorKind::InvalidInput, "clique: need s <= p");
  return finish_sweep("clique", cfg, fps::run_clique(cfg), a.summary);
}

struct CertifyArgs {
  std::string sigma;
  std::string s;
  int k = 1;
  std::string support;
  double rho = 0.0;
  double step = 1.0;
  std::string json_out;
};

int cmd_certify(const CertifyArgs& a) {
  const fps::SymMat sigma = fps::read_symmetric_csv(a.sigma);
  const fps::SymMat s = fps::read_symmetric_csv(a.s);
  if (s.dim() != sigma.dim()) fps::fail(fps::ErrorKind::InvalidInput, "certify: Sigma and S differ in dimension");
  const fps::SupportSet J = parse_support(a.support, sigma.dim());
  fps::SolverConfig cfg;
  cfg.admm_step = a.step;

  const fps::ConditionReport cond = fps::check_theorem1(sigma, s, a.k, J, a.rho);
  const fps::WitnessReport wit = fps::build_witness(sigma, s, a.k, J, a.rho, cfg);
  fps::Json j;
  j["conditions"] = fps::to_json(cond);
  j["witness"] = fps::to_json(wit);
  const bool certified = wit.witness_valid && cond.exact_recovery;
  j["certified"] = certified;
  emit(j, a.json_out);
  return certified ? kOk : kCertify;
}

struct ModelArgs {
  std::string kind = "spiked";
  int p = 10;
  int k = 1;
  int s = 5;
  std::vector<double> spikes{2.0};
  double noise = 1.0;
  double t = 0.0;
  std::uint64_t seed = 1;
  int n = 0;
  std::string sigma_out;
  std::string s_out;
  std::string json_out;
};

int cmd_model(const ModelArgs& a) {
  if (a.sigma_out.empty()) fps::fail(fps::ErrorKind::InvalidInput, "model: --sigma-out is required");
  fps::ModelInstance m;
  std::optional<fps::SymMat> s;
  if (a.kind == "spiked") {
    m = fps::gen_spiked(a.p, a.k, fps::SupportSet::range(0, a.s, a.p), a.spikes, a.noise, a.seed);
  } else if (a.kind == "toy") {
    m = fps::gen_toy(a.t);
  } else if (a.kind == "clique") {
    const fps::PlantedClique g = fps::gen_planted_clique(a.p, a.s, a.seed);
    const fps::SpsCheck sps = fps::check_sps(g.sigma, 1);
    m.sigma = g.sigma;
    m.pi = fps::top_k_projector(g.sigma, 1).point;
    m.support = g.clique;
    m.k = 1;
    m.gap = sps.gap;
    m.eigenvalues = fps::eig_sym(g.sigma).values;
    m.label = "clique";
    s = g.s;
  } else {
    fps::fail(fps::ErrorKind::InvalidInput, "model: unknown kind '" + a.kind + "'");
  }
  if (a.n > 0 && !s) s = fps::sample_covariance(fps::sample_gaussian(m, a.n, fps::derive_seed(a.seed, 1)));

  fps::write_matrix_csv(a.sigma_out, m.sigma.mat());
  fps::Json j = fps::model_json(m, a.sigma_out);
  if (s && !a.s_out.empty()) {
    fps::write_matrix_csv(a.s_out, s->mat());
    j["S_path"] = a.s_out;
  }
  emit(j, a.json_out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse principal subspace estimation over the Fantope"};
  app.set_version_flag("--version", fps::artifact_version());
  app.require_subcommand(1);

  SolveArgs solve;
  auto* sc = app.add_subcommand("solve", "Solve the penalized program for one matrix");
  sc->add_option("--matrix", solve.matrix, "Square CSV matrix S")->required();
  sc->add_option("-k,--k", solve.k, "Subspace dimension");
  sc->add_option("--rho", solve.rho, "l1 penalty");
  sc->add_option("--tau-en", solve.tau_en, "Elastic-net curvature (0 = plain)");
  sc->add_option("--step", solve.step, "Augmented Lagrangian parameter");
  sc->add_option("--eps", solve.eps, "Stopping tolerance");
  sc->add_option("--max-iters", solve.max_iters, "Iteration cap");
  sc->add_option("--h-out", solve.h_out, "Write H as CSV");
  sc->add_option("--json", solve.json_out, "Write the summary here instead of stdout");

  SweepArgs phase, persist;
  auto add_sweep = [&](CLI::App* cmd, SweepArgs& a) {
    cmd->add_option("--config", a.config, "Key/value experiment config");
    cmd->add_option("--trials", a.trials, "Override trials per cell");
    cmd->add_option("--seed", a.seed, "Override the base seed");
    cmd->add_option("-o,--output", a.output, "Trial CSV path (default stdout)");
    cmd->add_option("--summary", a.summary, "Summary JSON path (default <output>.summary.json)");
    cmd->add_flag("--timing", a.timing, "Record wall-clock time per trial");
  };
  auto* pc = app.add_subcommand("phase", "Support recovery sweep on a spiked model");
  add_sweep(pc, phase);
  auto* rc = app.add_subcommand("persist", "Population vs empirical constrained solutions");
  add_sweep(rc, persist);

  CliqueArgs clique;
  auto* cc = app.add_subcommand("clique", "Planted clique recovery");
  cc->add_option("--p", clique.p, "Graph sizes")->delimiter(',');
  cc->add_option("--s", clique.s, "Clique sizes")->delimiter(',');
  cc->add_option("--trials", clique.trials, "Trials per cell");
  cc->add_option("--seed", clique.seed, "Base seed");
  cc->add_option("--rho-multiple", clique.rho_multiple, "Penalty in units of sqrt(log p / (p - 1))");
  cc->add_option("--rho", clique.rho, "Explicit penalties (overrides --rho-multiple)")->delimiter(',');
  cc->add_option("--step", clique.step, "Augmented Lagrangian parameter (default 2)");
  cc->add_option("--eps", clique.eps, "Stopping tolerance");
  cc->add_option("--max-iters", clique.max_iters, "Iteration cap per solve");
  cc->add_option("-o,--output", clique.output, "Trial CSV path (default stdout)");
  cc->add_option("--summary", clique.summary, "Summary JSON path");
  cc->add_flag("--timing", clique.timing, "Record wall-clock time per trial");

  CertifyArgs cert;
  auto* tc = app.add_subcommand("certify", "Evaluate the sparsistency conditions and build the dual witness");
  tc->add_option("--sigma", cert.sigma, "Population covariance CSV")->required();
  tc->add_option("--s", cert.s, "Input matrix CSV")->required();
  tc->add_option("-k,--k", cert.k, "Subspace dimension");
  tc->add_option("--J", cert.support, "Comma-separated support indices")->required();
  tc->add_option("--rho", cert.rho, "l1 penalty")->required();
  tc->add_option("--step", cert.step, "Augmented Lagrangian parameter for the restricted solve");
  tc->add_option("--json", cert.json_out, "Write the report here instead of stdout");

  ModelArgs model;
  auto* mc = app.add_subcommand("model", "Write a synthetic covariance (and optionally a sample covariance)");
  mc->add_option("--kind", model.kind, "spiked | toy | clique");
  mc->add_option("--p", model.p, "Dimension");
  mc->add_option("-k,--k", model.k, "Subspace dimension (spiked)");
  mc->add_option("--s", model.s, "Support or clique size");
  mc->add_option("--spikes", model.spikes, "Spike values, descending")->delimiter(',');
  mc->add_option("--noise", model.noise, "Isotropic noise level");
  mc->add_option("--t", model.t, "Cross-correlation of the toy model");
  mc->add_option("--seed", model.seed, "Seed");
  mc->add_option("--n", model.n, "Draw a Gaussian sample of this size and write its covariance");
  mc->add_option("--sigma-out", model.sigma_out, "Covariance CSV path");
  mc->add_option("--s-out", model.s_out, "Sample (or clique) matrix CSV path");
  mc->add_option("--json", model.json_out, "Model JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*sc) return cmd_solve(solve);
    if (*pc) {
      const fps::ExperimentConfig cfg = load_sweep(phase);
      return finish_sweep("phase", cfg, fps::run_phase(cfg), phase.summary);
    }
    if (*rc) {
      const fps::ExperimentConfig cfg = load_sweep(persist);
      return finish_sweep("persist", cfg, fps::run_persist(cfg), persist.summary);
    }
    if (*cc) return cmd_clique(clique);
    if (*tc) return cmd_certify(cert);
    if (*mc) return cmd_model(model);
  } catch (const fps::NotConverged& e) {
    std::cerr << "fps: " << e.what() << '\n';
    return kNotConverged;
  } catch (const fps::FpsError& e) {
    std::cerr << "fps: " << fps::to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "fps: " << e.what() << '\n';
    return kInput;
  }
  return kInput;
}
