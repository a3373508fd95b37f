// Counter-based deterministic random numbers (splitmix64 finalizer).
// Every variate is a pure function of (seed, counter), so streams are
// reproducible bit-for-bit regardless of batching or thread count.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace convo {

inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// Uniform double in the open interval (0, 1).
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(splitmix64_at(seed_, counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform double in (lo, hi).
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  /// Standard Gaussian pair via Box-Muller; consumes counters 2k and 2k+1.
  void gaussian_pair(std::uint64_t pair_index, double& z0, double& z1) const {
    const double u1 = uniform(2 * pair_index);
    const double u2 = uniform(2 * pair_index + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(t);
    z1 = r * std::sin(t);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace convo
