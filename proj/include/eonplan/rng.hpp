#pragma once

#include <cstdint>
#include <random>

namespace eonplan {

// Deterministic random source. Every stochastic choice in the library
// (traffic generation, epsilon-greedy exploration) draws from one of
// these, so a run is fully reproduced by its seeds. The mappings below
// avoid std::uniform_*_distribution on purpose: those are allowed to
// differ between standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform double in [a, b).
  double uniform_real(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform integer in [0, n). n must be positive.
  std::int64_t below(std::int64_t n) {
    return static_cast<std::int64_t>(uniform01() * static_cast<double>(n));
  }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + below(hi - lo + 1);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace eonplan
