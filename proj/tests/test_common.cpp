#include "doctest.h"
#include "fps/common.hpp"
#include "fps/rng.hpp"
#include "test_util.hpp"

#include <cmath>
#include <set>

using namespace fps;

TEST_CASE("SymMat symmetrizes and records asymmetry") {
  Matrix a(2, 2);
  a << 1, 2, 4, 3;
  const SymMat s(a);
  CHECK(s(0, 1) == doctest::Approx(3.0));
  CHECK(s(1, 0) == doctest::Approx(3.0));
  CHECK(s.asymmetry() == doctest::Approx(2.0));
  CHECK_THROWS_AS(SymMat::strict(a), FpsError);

  a(1, 0) = 2.0;
  CHECK(SymMat::strict(a).asymmetry() == 0.0);
}

TEST_CASE("SymMat rejects non-square and ragged input") {
  CHECK_THROWS_AS(SymMat(Matrix::Zero(2, 3)), FpsError);
  CHECK_THROWS_AS((SymMat{{1.0, 2.0}, {3.0}}), FpsError);
  try {
    SymMat(Matrix::Zero(2, 3));
  } catch (const FpsError& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
}

TEST_CASE("SymMat arithmetic and helpers") {
  const SymMat a{{1, 2}, {2, 1}};
  const SymMat b = SymMat::identity(2);
  CHECK((a + b)(0, 0) == 2.0);
  CHECK((a - b)(1, 1) == 0.0);
  CHECK((a * 2.0)(0, 1) == 4.0);
  CHECK(SymMat::diagonal({1, 2, 3})(2, 2) == 3.0);
  CHECK(SymMat::zero(3).mat().isZero());
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_FALSE(SymMat(bad).all_finite());
}

TEST_CASE("SupportSet sorts, dedups, and complements") {
  const SupportSet s({4, 1, 1, 3}, 6);
  CHECK(s.indices() == std::vector<int>{1, 3, 4});
  CHECK(s.size() == 3);
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(2));
  CHECK(s.complement().indices() == std::vector<int>{0, 2, 5});
  CHECK(s.str() == "{1,3,4}");
  CHECK(SupportSet::range(2, 5, 6).indices() == std::vector<int>{2, 3, 4});
  CHECK_THROWS_AS(SupportSet({6}, 6), FpsError);
  CHECK_THROWS_AS(SupportSet({-1}, 6), FpsError);

  Matrix h = Matrix::Zero(4, 4);
  h(1, 1) = 0.5;
  h(3, 3) = 1e-9;
  CHECK(SupportSet::from_diagonal(h, 1e-6).indices() == std::vector<int>{1});
}

TEST_CASE("Matrix norms against hand-computed values") {
  Matrix a(2, 3);
  a << 3, -4, 0, 1, 0, -2;
  CHECK(norm_l11(a) == doctest::Approx(10.0));
  CHECK(norm_linf(a) == doctest::Approx(4.0));
  CHECK(norm_l2inf(a) == doctest::Approx(5.0));
  CHECK(row_sparsity(a) == 2);
  a.row(1).setZero();
  CHECK(row_sparsity(a) == 1);
  CHECK(norm_linf(Matrix(0, 0)) == 0.0);

  Matrix m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const Matrix sub = submatrix(m, {0, 2}, {1});
  CHECK(sub.rows() == 2);
  CHECK(sub(0, 0) == 2.0);
  CHECK(sub(1, 0) == 8.0);
}

TEST_CASE("Rng engine matches the standard mt19937_64 sequence") {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489u);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next_u64();
  CHECK(x == 9981545732273789042ULL);
}

TEST_CASE("splitmix64 matches the reference generator") {
  // First output of the reference SplitMix64 from state 0.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));

  std::set<std::uint64_t> seen;
  for (std::uint64_t c = 0; c < 50; ++c)
    for (std::uint64_t t = 0; t < 50; ++t) seen.insert(derive_seed(derive_seed(11, c), t));
  CHECK(seen.size() == 2500u);
}

TEST_CASE("Rng uniform and normal moments") {
  Rng rng(42);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sn4 = 0;
  double umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sn4 += z * z * z * z;
  }
  CHECK(umin >= 0.0);
  CHECK(umax < 1.0);
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sn4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("Rng is reproducible from its seed") {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  Rng c(3);
  int heads = 0;
  for (int i = 0; i < 10000; ++i) heads += c.coin(0.25);
  CHECK(heads == doctest::Approx(2500).epsilon(0.08));
}
