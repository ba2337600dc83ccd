#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sgsr {

/// splitmix64 finalizer; used to scramble seeds before they reach an engine.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic child-seed derivation so every (experiment, snr, trial)
/// triple owns an independent stream regardless of execution order.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b) {
  return mix64(mix64(mix64(base) ^ a) ^ (b * 0x9e3779b97f4a7c15ull));
}

/// Seeded random stream with fixed sample transforms.
///
/// The uniform and normal transforms are written out explicitly instead of
/// going through std::*_distribution so that a given seed produces the same
/// draw sequence on every standard library. Each normal() consumes exactly
/// two engine words, each uniform() one.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (cosine branch only).
  double normal() {
    // u1 in (0, 1] keeps the log argument positive.
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sgsr
