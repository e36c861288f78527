#pragma once

#include "noisyts/linalg.hpp"

#include <cstdint>
#include <random>

namespace noisyts {

/// Named substreams of a trial. The numeric values are part of the seeding
/// contract: changing them changes every trajectory.
enum class StreamRole : std::uint64_t {
  kEnvInit = 1,   // theta*, gamma*, action set, feature scale
  kContexts = 2,  // true/noisy contexts and reward noise, shared by all algorithms
  kPolicy = 3,    // Thompson/LMC draws; every algorithm gets its own engine seeded from this
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic seed for (master seed, trial index, role):
/// mix64(mix64(mix64(master) ^ trial) ^ role).
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t trial, StreamRole role) {
  return mix64(mix64(mix64(master) ^ trial) ^ static_cast<std::uint64_t>(role));
}

/// mt19937_64 with the handful of draws the simulator needs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  Vec standard_normal(Index n) {
    Vec z(n);
    for (Index i = 0; i < n; ++i) z(i) = normal();
    return z;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace noisyts
