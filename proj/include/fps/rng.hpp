#pragma once

#include <cstdint>
#include <random>

namespace fps {

// Seedable generator with platform-independent output.
//
// The engine is std::mt19937_64, whose sequence is fixed by the standard. The
// standard distributions are not (libstdc++ and libc++ differ), so uniform and
// normal draws are derived here from raw engine output: uniforms use the top
// 53 bits, normals use the Marsaglia polar method.
//
// Stream splitting: trial t of cell c under base seed s uses
//   derive_seed(derive_seed(s, c), t)
// where derive_seed is a SplitMix64 finalizer over (seed, stream id). Distinct
// (cell, trial) pairs therefore get decorrelated, reproducible streams no matter
// which thread runs them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double normal();   // N(0, 1)
  bool coin(double prob_true) { return uniform() < prob_true; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace fps
