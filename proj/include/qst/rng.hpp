#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qst {

// Deterministic RNG used everywhere a seed is accepted.  Streams derived
// from (seed, index) are independent, so per-trial work can be reordered
// or parallelized without changing results.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : eng_(mix(seed)) {}

  static RngStream derive(uint64_t seed, uint64_t index) {
    return RngStream(mix(seed) ^ mix(index * 0x9e3779b97f4a7c15ull + 0xbf58476d1ce4e5b9ull));
  }

  uint64_t bits() { return eng_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t x = eng_();
      if (x >= threshold) return x % n;
    }
  }

  // Index sampled from non-negative weights (need not be normalized).
  size_t discrete(const std::vector<double>& weights);

  // Index sampled from a cumulative weight table (non-decreasing, last > 0).
  size_t discrete_from_cumulative(const std::vector<double>& cumulative);

 private:
  static uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 eng_;
};

}  // namespace qst
