#include "doctest.h"
#include "fps/experiments.hpp"
#include "fps/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

using namespace fps;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return experiment_config_from(KeyValueConfig::parse(in));
}

std::string csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  write_records_csv(out, records);
  return out.str();
}

}  // namespace

TEST_CASE("experiment config from key/value text") {
  const ExperimentConfig c = parse(
      "p = 20, 30\n"
      "s = 3\n"
      "n = 500\n"
      "k = 2\n"
      "spikes = 3, 2\n"
      "sigma_hat = auto\n"
      "alpha = 0.5\n"
      "trials = 4\n"
      "seed = 18446744073709551615\n"
      "certify = true\n");
  CHECK(c.p_grid == std::vector<int>{20, 30});
  CHECK(c.k == 2);
  CHECK(c.spikes == std::vector<double>{3, 2});
  CHECK(std::isnan(c.sigma_hat));
  CHECK(c.alpha == 0.5);
  CHECK(c.seed == 18446744073709551615ULL);
  CHECK(c.certify);
  const Json j = to_json(c);
  CHECK(j["sigma_hat"] == "auto");
  CHECK(j["rho"] == "auto");
  CHECK(j["alpha"] == 0.5);
}

TEST_CASE("experiment config rejects bad input") {
  CHECK_THROWS_AS(parse("bogus = 1\n"), FpsError);
  CHECK_THROWS_AS(parse("trials = 0\n"), FpsError);
  CHECK_THROWS_AS(parse("model = wishart\n"), FpsError);
  CHECK_THROWS_AS(parse("seed = -1\n"), FpsError);
  CHECK_THROWS_AS(parse("R = 0\n"), FpsError);
  CHECK_THROWS_AS(parse("admm_step = -2\n"), FpsError);
}

TEST_CASE("trial seeds are distinct and stable") {
  std::set<std::uint64_t> seeds;
  for (int c = 0; c < 20; ++c)
    for (int t = 0; t < 20; ++t) seeds.insert(trial_seed(5, c, t));
  CHECK(seeds.size() == 400u);
  CHECK(trial_seed(5, 2, 3) == derive_seed(derive_seed(5, 2), 3));
}

TEST_CASE("phase sweep is reproducible and ordered") {
  ExperimentConfig c = parse(
      "p = 20\n"
      "s = 3\n"
      "n = 400, 4000\n"
      "spikes = 3\n"
      "trials = 3\n"
      "seed = 7\n");
  const auto a = run_phase(c);
  const auto b = run_phase(c);
  REQUIRE(a.size() == 6u);
  CHECK(csv(a) == csv(b));
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].cell == static_cast<int>(i / 3));
    CHECK(a[i].trial == static_cast<int>(i % 3));
    CHECK(a[i].seed == trial_seed(7, a[i].cell, a[i].trial));
    CHECK(a[i].error.empty());
    CHECK(a[i].rho > 0.0);
    CHECK(a[i].wall_ms == 0);
  }
  // More samples, smaller penalty under the rate-based prescription.
  CHECK(a[3].rho < a[0].rho);

  c.seed = 8;
  CHECK(csv(run_phase(c)) != csv(a));
}

TEST_CASE("phase sweep with certification fills the witness columns") {
  const ExperimentConfig c = parse(
      "p = 20\n"
      "s = 4\n"
      "n = 20000\n"
      "spikes = 4\n"
      "trials = 2\n"
      "certify = true\n");
  for (const TrialRecord& r : run_phase(c)) {
    CHECK(r.error.empty());
    CHECK_FALSE(std::isnan(r.q_deviation));
    CHECK_FALSE(std::isnan(r.uniqueness_discrepancy));
    if (r.exact_recovery) CHECK(r.unique);
  }
}

TEST_CASE("explicit rho grid and solver failures are recorded, not thrown") {
  ExperimentConfig c = parse(
      "p = 15\n"
      "s = 3\n"
      "n = 300\n"
      "rho = 0.1\n"
      "trials = 2\n"
      "max_iters = 1\n");
  const auto recs = run_phase(c);
  REQUIRE(recs.size() == 2u);
  for (const TrialRecord& r : recs) {
    CHECK(r.rho == 0.1);
    CHECK(r.error.rfind("NotConverged", 0) == 0);
    CHECK_FALSE(r.converged);
  }
}

TEST_CASE("clique sweep") {
  ExperimentConfig c;
  c.p_grid = {40};
  c.s_grid = {20};
  c.trials = 2;
  const auto recs = run_clique(c);
  REQUIRE(recs.size() == 2u);
  for (const TrialRecord& r : recs) {
    CHECK(r.kind == "clique");
    CHECK(r.rho == doctest::Approx(0.85 * std::sqrt(std::log(40.0) / 39)));
    CHECK(r.error.empty());
  }
  const Json s = summarize("clique", c, recs);
  CHECK(s["cells"][0].contains("median_entrywise_constant"));
  CHECK(s["version"] == artifact_version());
}

TEST_CASE("persist sweep at S = Sigma has zero gap") {
  const ExperimentConfig c = parse(
      "p = 12\n"
      "s = 3\n"
      "n = 0, 500\n"
      "trials = 2\n");
  const auto recs = run_persist(c);
  REQUIRE(recs.size() == 4u);
  for (const TrialRecord& r : recs) {
    CHECK(r.error.empty());
    CHECK(r.R == 2.0);
    CHECK(r.sandwich_ok);
    if (r.n == 0) CHECK(std::abs(r.persist_gap) < 1e-5);
  }
  const Json s = summarize("persist", c, recs);
  CHECK(s["cells"].size() == 2u);
  CHECK(s["cells"][0]["sandwich_ok"] == 2);
}

TEST_CASE("records CSV layout") {
  TrialRecord r;
  r.kind = "phase";
  r.error = "bad, \"quoted\"";
  const std::string text = csv({r});
  const auto nl = text.find('\n');
  const std::string header = text.substr(0, nl);
  CHECK(header.rfind("kind,cell,trial,seed", 0) == 0);
  CHECK(std::count(header.begin(), header.end(), ',') + 1 == static_cast<long>(record_columns().size()));
  CHECK(text.find("\"bad, \"\"quoted\"\"\"") != std::string::npos);
  // NaN cells are empty.
  CHECK(text.find(",,") != std::string::npos);
}

TEST_CASE("FPS_SEED overrides the configured seed") {
  ExperimentConfig c;
  c.seed = 1;
  setenv("FPS_SEED", "99", 1);
  apply_seed_override(c);
  CHECK(c.seed == 99u);
  setenv("FPS_SEED", "nope", 1);
  CHECK_THROWS_AS(apply_seed_override(c), FpsError);
  unsetenv("FPS_SEED");
  c.seed = 3;
  apply_seed_override(c);
  CHECK(c.seed == 3u);
}
