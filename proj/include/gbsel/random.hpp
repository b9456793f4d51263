#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace gbsel {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used to turn sequential
/// seeds into well-mixed engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seeded random source with platform-independent output.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Seeding: engine seed = splitmix64(seed ^ stream * golden).
/// Distributions are implemented here (rejection sampling for integers,
/// 53-bit mantissa for reals, inversion for Poisson) because the standard
/// library distributions are not specified bit-for-bit.
/// Algorithm version: 1.
class Rng {
 public:
  static constexpr int kVersion = 1;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : engine_(splitmix64(seed ^ (stream * 0x9e3779b97f4a7c15ull))) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [lo, hi] (inclusive).
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = hi - lo;
    if (span == ~std::uint64_t{0}) return next_u64();
    const std::uint64_t bound = span + 1;
    // Reject the top partial bucket.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x > limit);
    return lo + x % bound;
  }

  std::size_t index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("index: empty range");
    return static_cast<std::size_t>(uniform_int(0, n - 1));
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Poisson(lambda) by sequential inversion of the CDF.
  int poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw std::invalid_argument("poisson: lambda must be finite and non-negative");
    if (lambda == 0.0) return 0;
    const double u = uniform01();
    double p = std::exp(-lambda);
    double cdf = p;
    int k = 0;
    while (u >= cdf && k < 10000) {
      ++k;
      p *= lambda / k;
      cdf += p;
      if (p == 0.0) break;
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gbsel
