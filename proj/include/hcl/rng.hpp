#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace hcl {

/// Counter-based generator: draw k of stream s under seed S is
/// splitmix64(key(S, s) + k * 0x9E3779B97F4A7C15), where key mixes the seed
/// and stream id through the same finalizer. The output depends only on
/// (seed, stream, counter), so results are identical on every platform and
/// independent streams can be handed to different subsystems.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; no cached second variate so the
  /// counter advances by exactly two per call.
  double normal() {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::vector<double> normal_vector(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = normal();
    return v;
  }

  std::vector<double> unit_vector(int n) {
    for (;;) {
      auto v = normal_vector(n);
      double s = 0;
      for (double x : v) s += x * x;
      if (s > 1e-20) {
        s = std::sqrt(s);
        for (auto& x : v) x /= s;
        return v;
      }
    }
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hcl
