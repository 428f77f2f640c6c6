#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cssk {

/// All randomness in the toolkit flows from one global seed through this
/// derivation: derive_seed(base, tag[, index]) where tag names the consumer
/// ("scene.layout", "scene.noise", "mask", "measure.noise", ...). Equal
/// configurations therefore reproduce bit-identical runs regardless of
/// evaluation order or thread count.
uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index = 0);

/// Deterministic random stream. Distributions are implemented by hand on
/// top of mt19937_64 so sequences are identical across platforms and
/// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n), n >= 1.
  int uniform_int(int n) {
    int v = static_cast<int>(uniform01() * n);
    return v >= n ? n - 1 : v;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cssk
