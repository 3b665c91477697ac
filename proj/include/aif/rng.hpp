#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace aif {

// Counter-based pseudo-random generator.
//
// The i-th output (1-based) of a stream with key k is
//
//   out(k, i) = finalize(k + i * 0x9E3779B97F4A7C15)
//
// where finalize is the splitmix64 finalizer:
//
//   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27;  z *= 0x94D049BB133111EB;
//   z ^= z >> 31;
//
// Sub-streams are derived as derive(k, id) = finalize(k ^ finalize(id + salt)),
// with salt 0xA0761D6478BD642F. Everything is pure integer arithmetic, so a
// (key, counter) pair reproduces the same draws on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  // Independent child stream; deterministic in (key, id).
  Rng derive(std::uint64_t id) const {
    return Rng(key_ ^ mix(id + 0xA0761D6478BD642FULL));
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform in [0, 1), 53 bits of mantissa.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Box-Muller; consumes two uniforms per draw.
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    // u1 = 0 would take log(0); nudge to the smallest representable draw.
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [0, n) via 128-bit multiply-shift.
  int next_index(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::next_index: n must be > 0");
    return int((static_cast<__uint128_t>(next_u64()) *
                static_cast<__uint128_t>(n)) >> 64);
  }

  // Sample from a categorical distribution; probs need not be exactly
  // normalized, trailing mass goes to the last index.
  int sample_categorical(const std::vector<double>& probs) {
    double u = next_double();
    double cum = 0.0;
    for (std::size_t a = 0; a + 1 < probs.size(); ++a) {
      cum += probs[a];
      if (u < cum) return int(a);
    }
    return int(probs.size()) - 1;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace aif
