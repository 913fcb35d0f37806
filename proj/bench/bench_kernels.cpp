// Serial vs OpenMP kernels, plus the end-to-end pieces they feed.
//
//   ./build/bench/fps_bench --benchmark_filter=SoftThreshold
//   OMP_NUM_THREADS=4 ./build/bench/fps_bench

#include "fps/kernels.hpp"
#include "fps/models.hpp"
#include "fps/rng.hpp"
#include "fps/solver.hpp"
#include "fps/spectral.hpp"

#include <benchmark/benchmark.h>

using namespace fps;

namespace {

Matrix gaussian(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

SymMat symmetric(int p, std::uint64_t seed) {
  const Matrix g = gaussian(p, p, seed);
  return SymMat((g + g.transpose()) / 2.0);
}

template <bool Parallel>
void BM_SoftThreshold(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Matrix a = gaussian(p, p, 1);
  Matrix out(p, p);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::soft_threshold(a, 0.5, out);
    else
      kernels::serial::soft_threshold(a, 0.5, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * p * p);
}

template <bool Parallel>
void BM_WeightedOuter(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Matrix v = gaussian(p, p, 2);
  Vector w = Vector::Zero(p);
  w.head(p / 4 + 1).setConstant(0.7);
  for (auto _ : state) {
    Matrix h = Parallel ? kernels::weighted_outer(v, w) : kernels::serial::weighted_outer(v, w);
    benchmark::DoNotOptimize(h.data());
  }
}

template <bool Parallel>
void BM_ScaledGram(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Matrix x = gaussian(4 * p, p, 3);
  for (auto _ : state) {
    Matrix g = Parallel ? kernels::scaled_gram(x, 1.0 / (4 * p)) : kernels::serial::scaled_gram(x, 1.0 / (4 * p));
    benchmark::DoNotOptimize(g.data());
  }
}

template <bool Parallel>
void BM_FrobeniusDistance(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Matrix a = gaussian(p, p, 4), b = gaussian(p, p, 5);
  for (auto _ : state) {
    double d = Parallel ? kernels::frobenius_distance(a, b) : kernels::serial::frobenius_distance(a, b);
    benchmark::DoNotOptimize(d);
  }
}

void BM_EigSym(benchmark::State& state) {
  const SymMat a = symmetric(static_cast<int>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(eig_sym(a).values.data());
}

void BM_JacobiEig(benchmark::State& state) {
  const SymMat a = symmetric(static_cast<int>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(reference::jacobi_eig(a).values.data());
}

void BM_FantopeProject(benchmark::State& state) {
  const SymMat a = symmetric(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(fantope_project(a, 2).point.mat().data());
}

void BM_SolveSpiked(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const ModelInstance m = gen_spiked(p, 1, SupportSet::range(0, 5, p), {3.0}, 1.0, 8);
  const SymMat s = sample_covariance(sample_gaussian(m, 2000, 9));
  SolverConfig c;
  c.rho = 0.3;
  c.admm_step = 4.0;
  for (auto _ : state) {
    const FpsSolution sol = solve_fps(s, c);
    state.counters["iters"] = sol.iters;
  }
}

}  // namespace

BENCHMARK(BM_SoftThreshold<false>)->Name("SoftThreshold/serial")->Arg(100)->Arg(400)->Arg(1000);
BENCHMARK(BM_SoftThreshold<true>)->Name("SoftThreshold/omp")->Arg(100)->Arg(400)->Arg(1000);
BENCHMARK(BM_WeightedOuter<false>)->Name("WeightedOuter/serial")->Arg(100)->Arg(400);
BENCHMARK(BM_WeightedOuter<true>)->Name("WeightedOuter/omp")->Arg(100)->Arg(400);
BENCHMARK(BM_ScaledGram<false>)->Name("ScaledGram/serial")->Arg(50)->Arg(200);
BENCHMARK(BM_ScaledGram<true>)->Name("ScaledGram/omp")->Arg(50)->Arg(200);
BENCHMARK(BM_FrobeniusDistance<false>)->Name("FrobeniusDistance/serial")->Arg(400)->Arg(1000);
BENCHMARK(BM_FrobeniusDistance<true>)->Name("FrobeniusDistance/omp")->Arg(400)->Arg(1000);
BENCHMARK(BM_EigSym)->Arg(50)->Arg(100)->Arg(200);
BENCHMARK(BM_JacobiEig)->Arg(50)->Arg(100)->Arg(200);
BENCHMARK(BM_FantopeProject)->Arg(100)->Arg(200);
BENCHMARK(BM_SolveSpiked)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
