#include "doctest.h"
#include "fps/diagnostics.hpp"
#include "fps/models.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace fps;

namespace {

SolverConfig tight() {
  SolverConfig c;
  c.eps_primal = c.eps_dual = 1e-9;
  c.max_iters = 100000;
  return c;
}

}  // namespace

TEST_CASE("check_sps") {
  const SpsCheck sps = check_sps(gen_toy(0.0).sigma, 1);
  CHECK(sps.gap == doctest::Approx(0.7));
  CHECK(sps.support == SupportSet({0, 1}, 3));
  CHECK(sps.reliable);
  CHECK_FALSE(check_sps(SymMat::identity(3), 1).reliable);
}

TEST_CASE("LCC on the toy model") {
  // Oracle values: gap from the closed-form spectrum, ||Sigma_{J^c J}||_{2,inf} = |t| sqrt(2).
  const LccCheck a = check_lcc(gen_toy(0.02).sigma, 1, SupportSet({0, 1}, 3));
  CHECK(a.lhs == doctest::Approx(16.0 / 0.6991119872961808 * 0.02 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(a.alpha == doctest::Approx(0.35268118959077865).epsilon(1e-10));
  CHECK(a.alpha >= 0.3);

  const LccCheck b = check_lcc(gen_toy(0.1).sigma, 1, SupportSet({0, 1}, 3));
  CHECK(b.lhs == doctest::Approx(3.3358964362696373).epsilon(1e-10));
  CHECK(b.alpha == 0.0);

  const LccCheck c = check_lcc(gen_toy(0.0).sigma, 1, SupportSet({0, 1}, 3));
  CHECK(c.lhs == 0.0);
  CHECK(c.alpha == 1.0);
}

TEST_CASE("LCC rejects a collapsed gap") {
  try {
    check_lcc(SymMat::identity(4), 1, SupportSet({0}, 4));
    FAIL("expected SpsViolated");
  } catch (const FpsError& e) {
    CHECK(e.kind() == ErrorKind::SpsViolated);
  }
}

TEST_CASE("deterministic conditions on the toy model") {
  const ModelInstance m = gen_toy(0.0);
  const SupportSet J({0, 1}, 3);

  // gap - 4 rho s (1 + 8 lambda1 / gap) = 0.7 - 8 rho (1 + 13.6 / 0.7)
  const double factor = 1.0 + 8.0 * 1.7 / 0.7;
  const ConditionReport small = check_theorem1(m.sigma, m.sigma, 1, J, 0.004);
  CHECK(small.det_cond1_lhs == doctest::Approx(0.0));
  CHECK(small.det_cond1_ok);
  CHECK(small.det_cond2_slack == doctest::Approx(0.7 - 8 * 0.004 * factor));
  CHECK(small.det_cond2_ok);
  CHECK(small.signal_min_leverage == doctest::Approx(std::sqrt(0.5)));
  CHECK(small.signal_threshold == doctest::Approx(4 * 0.004 * 2 / 0.7));
  CHECK(small.signal_ok);
  CHECK(small.entrywise_min == doctest::Approx(0.8));
  CHECK(small.sign_rank_one);
  CHECK(small.entrywise_min_ok);
  CHECK(small.false_positive_control);
  CHECK(small.exact_recovery);
  CHECK(std::isnan(small.sample_lhs));

  // The second condition holds only below 0.7 / (8 factor) ~= 0.00428.
  const ConditionReport mid = check_theorem1(m.sigma, m.sigma, 1, J, 0.01);
  CHECK(mid.det_cond2_slack == doctest::Approx(0.7 - 0.08 * factor));
  CHECK_FALSE(mid.det_cond2_ok);
  CHECK_FALSE(mid.exact_recovery);

  const ConditionReport big = check_theorem1(m.sigma, m.sigma, 1, J, 0.5);
  CHECK_FALSE(big.det_cond2_ok);
  CHECK_FALSE(big.entrywise_min_ok);  // 0.8 > 2 rho fails at rho = 0.5

  CHECK_THROWS_AS(check_theorem1(m.sigma, m.sigma, 1, J, 0.0), FpsError);
  CHECK_THROWS_AS(check_theorem1(m.sigma, SymMat::identity(2), 1, J, 0.1), FpsError);
}

TEST_CASE("first deterministic condition tracks the noise level") {
  const ModelInstance m = gen_toy(0.0);
  const SupportSet J({0, 1}, 3);
  Matrix s = m.sigma.mat();
  s(0, 2) = s(2, 0) = 0.05;
  const ConditionReport r = check_theorem1(m.sigma, SymMat(s), 1, J, 0.04);
  CHECK(r.w_inf == doctest::Approx(0.05));
  CHECK(r.det_cond1_lhs == doctest::Approx(1.25));
  CHECK_FALSE(r.det_cond1_ok);
}

TEST_CASE("sample-size condition and prescribed penalty") {
  const ModelInstance m = gen_spiked(50, 1, SupportSet::range(0, 3, 50), {3.0}, 1.0, 1);
  const SupportSet J = m.support;
  const double logp = std::log(50.0);
  const double gap = m.gap;
  const double l1 = m.eigenvalues(0);

  const ConditionReport r = check_theorem2(m.sigma, 1, J, 1000000, 1.0, 0.5);
  CHECK(r.rho == doctest::Approx(1.0 / 0.5 * std::sqrt(logp / 1e6)));
  CHECK(r.sample_lhs == doctest::Approx(3 * std::sqrt(logp / 1e6)));
  CHECK(r.sample_rhs == doctest::Approx(0.5 * gap * gap / (4 * 1.0 * (8 * l1 + gap))));
  CHECK(r.prob_sample_ok);

  // n = p = 10, s = 5: fails for any sigma >= lambda1.
  const ModelInstance small = gen_spiked(10, 1, SupportSet::range(0, 5, 10), {3.0}, 1.0, 2);
  for (double sigma : {small.eigenvalues(0), 2 * small.eigenvalues(0), 10 * small.eigenvalues(0)})
    CHECK_FALSE(check_theorem2(small.sigma, 1, small.support, 10, sigma, 1.0).prob_sample_ok);

  CHECK_THROWS_AS(check_theorem2(m.sigma, 1, J, 3, 1.0, 0.5), FpsError);  // n < log p
  CHECK_THROWS_AS(check_theorem2(m.sigma, 1, J, 100, 1.0, 0.0), FpsError);
  CHECK_THROWS_AS(check_theorem2(m.sigma, 1, J, 100, 1.0, 1.5), FpsError);
  CHECK_THROWS_AS(check_theorem2(m.sigma, 1, J, 100, 0.0, 0.5), FpsError);
}

TEST_CASE("Frobenius error bound on the toy model") {
  const ModelInstance m = gen_toy(0.0);
  for (double rho : {0.005, 0.01, 0.02, 0.05}) {
    SolverConfig c = tight();
    c.rho = rho;
    const FpsSolution sol = solve_fps(m.sigma, c);
    const FrobeniusCheck f = frobenius_bound_check(m.sigma, m.sigma, 1, m.support, rho, sol);
    CHECK(f.rhs == doctest::Approx(4 * rho * 2 / 0.7));
    CHECK(f.lhs == doctest::Approx((sol.H.mat() - m.pi.mat()).norm()));
    CHECK(f.ok);
  }
}

TEST_CASE("witness on the toy model with S = Sigma") {
  const ModelInstance m = gen_toy(0.0);
  const WitnessReport w = build_witness(m.sigma, m.sigma, 1, m.support, 0.01, tight());
  CHECK(w.witness_valid);
  CHECK(w.dual_offsupport_max <= 1.0);
  CHECK(w.Q_deviation <= w.Q_bound);
  CHECK(w.q_bound_ok);
  CHECK(w.Q_bound == doctest::Approx(8 * 0.01 * 2 / 0.7));
  CHECK(w.signal_gap == doctest::Approx(0.7));
  CHECK(w.Htilde.mat()(2, 2) == 0.0);
  CHECK(w.kkt_gap <= 1e-5);
  // The support-restricted solution is the full solution.
  SolverConfig c = tight();
  c.rho = 0.01;
  CHECK((solve_fps(m.sigma, c).H.mat() - w.Htilde.mat()).norm() < 1e-5);
}

TEST_CASE("witness with t = 0.1 and S = Sigma is still valid") {
  const ModelInstance m = gen_toy(0.1);
  CHECK(build_witness(m.sigma, m.sigma, 1, m.support, 0.01, tight()).witness_valid);
}

TEST_CASE("witness fails when the signal sits off the support") {
  const ModelInstance m = gen_toy(0.0);
  Matrix s = m.sigma.mat();
  s(2, 2) = 3.0;  // e3 becomes the leading direction of S
  const WitnessReport w = build_witness(m.sigma, SymMat(s), 1, m.support, 0.01, tight());
  CHECK_FALSE(w.witness_valid);
  CHECK(w.kkt_gap > 1e-3);
}

TEST_CASE("witness input validation") {
  const ModelInstance m = gen_toy(0.0);
  CHECK_THROWS_AS(build_witness(m.sigma, m.sigma, 1, m.support, 0.0), FpsError);
  CHECK_THROWS_AS(build_witness(m.sigma, m.sigma, 3, m.support, 0.1), FpsError);
  CHECK_THROWS_AS(build_witness(m.sigma, SymMat::identity(2), 1, m.support, 0.1), FpsError);
}

TEST_CASE("witness on a spiked sample") {
  const ModelInstance m = gen_spiked(30, 2, SupportSet::range(0, 5, 30), {3.0, 2.0}, 1.0, 4);
  const SymMat s = sample_covariance(sample_gaussian(m, 20000, 5));
  const double rho = 2.0 * entrywise_error(s, m.sigma);
  SolverConfig c = tight();
  c.admm_step = 4.0;
  const WitnessReport w = build_witness(m.sigma, s, 2, m.support, rho, c);
  c.rho = rho;
  c.k = 2;
  const FpsSolution sol = solve_fps(s, c);
  if (w.witness_valid) {
    // A valid witness certifies the restricted solution as the global one.
    CHECK((sol.H.mat() - w.Htilde.mat()).norm() < 1e-4);
    CHECK(sol.support == m.support);
  }
  CHECK(w.dual_offsupport_max >= 0.0);
}

TEST_CASE("sign_rank_one agrees with exhaustive enumeration") {
  Rng rng(40);
  int positives = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int s = testing::uniform_int(rng, 3, 12);
    Matrix m(s, s);
    if (trial % 2 == 0) {
      // Rank-one sign pattern with random magnitudes, occasionally corrupted.
      Vector b(s);
      for (int i = 0; i < s; ++i) b(i) = rng.coin(0.5) ? 1 : -1;
      for (int i = 0; i < s; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = b(i) * b(j) * (0.1 + rng.uniform());
      if (trial % 6 == 0) {
        const int i = testing::uniform_int(rng, 0, s - 1), j = testing::uniform_int(rng, 0, s - 1);
        m(i, j) = m(j, i) = -m(i, j);
      }
    } else {
      for (int i = 0; i < s; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.normal();
    }
    const SupportSet J = SupportSet::range(0, s, s);
    const bool expect = testing::sign_rank_one_brute(m, J.indices());
    positives += expect;
    CHECK(sign_rank_one(m, J) == expect);
  }
  CHECK(positives > 50);
}

TEST_CASE("sign_rank_one zero entries and sub-blocks") {
  Matrix m = Matrix::Ones(4, 4);
  CHECK(sign_rank_one(m, SupportSet({0, 1, 2, 3}, 4)));
  m(1, 2) = m(2, 1) = 0.0;
  CHECK_FALSE(sign_rank_one(m, SupportSet({0, 1, 2, 3}, 4)));
  CHECK(sign_rank_one(m, SupportSet({0, 1, 3}, 4)));
  m(0, 0) = -1.0;  // diagonal of b b^T is positive
  CHECK_FALSE(sign_rank_one(m, SupportSet({0, 1, 3}, 4)));
}

TEST_CASE("support_error counts") {
  const SupportError e = support_error(SupportSet({0, 1, 5}, 8), SupportSet({0, 1, 2}, 8));
  CHECK(e.false_pos == 1);
  CHECK(e.false_neg == 1);
  CHECK_FALSE(e.exact);
  CHECK(support_error(SupportSet({3}, 8), SupportSet({3}, 8)).exact);
}

TEST_CASE("persistence gap vanishes at S = Sigma and obeys the sandwich") {
  const ModelInstance m = gen_spiked(15, 1, SupportSet::range(0, 4, 15), {3.0}, 1.0, 8);
  SolverConfig c;
  c.constraint_slack = 1e-6;
  c.admm_step = 4.0;
  const PersistenceResult same = persistence_gap(m.sigma, m.sigma, 1, 2.0, c);
  CHECK(std::abs(same.gap) < 1e-5);
  CHECK(same.bound == 0.0);

  const SymMat s = sample_covariance(sample_gaussian(m, 500, 9));
  const PersistenceResult r = persistence_gap(m.sigma, s, 1, 2.0, c);
  CHECK(r.bound == doctest::Approx(4.0 * entrywise_error(s, m.sigma)));
  CHECK(r.lower_ok);
  CHECK(r.upper_ok);
}

TEST_CASE("stability of the constrained value") {
  Rng rng(41);
  const ModelInstance m = gen_spiked(10, 1, SupportSet::range(0, 3, 10), {2.0}, 1.0, 3);
  SolverConfig c;
  c.constraint_slack = 1e-6;
  for (int trial = 0; trial < 5; ++trial) {
    const SymMat delta = testing::random_symmetric(rng, 10, 0.05);
    const StabilityResult r = stability_check(m.sigma, delta, 1, 2.0, c);
    CHECK(r.bound == doctest::Approx(4.0 * norm_linf(delta.mat())));
    CHECK(r.ok);
  }
}
