#pragma once

#include <cmath>
#include <cstdint>

namespace had::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Keyed counter stream: one (seed, stream_id) pair per pixel gives a
// reproducible sequence that is independent of evaluation order across
// pixels, so parallel generation stays deterministic. The normal draw is
// a hand-rolled Box-Muller because std::normal_distribution's output is
// implementation-defined and would break bit-reproducibility.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id)
      : state_(splitmix64(splitmix64(seed) ^
                          (stream_id + 1) * 0xD1B54A32D192ED03ULL)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Unbiased integer in [0, m).
  std::uint64_t next_below(std::uint64_t m) {
    const std::uint64_t limit = m * (~0ULL / m);
    std::uint64_t u;
    do {
      u = next_u64();
    } while (u >= limit);
    return u % m;
  }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace had::rng
