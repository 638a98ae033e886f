#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeded RNG wrapper. The engine is std::mt19937_64 (bit-exact by the
// standard); the variate transforms are written out here because the standard
// library distributions are implementation-defined and experiment CSVs must
// reproduce bit-for-bit.

namespace force {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi] via rejection-free 64-bit modulo of a wide
  // draw; bias is negligible for the ranges used here (< 2^32).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = std::uint64_t(hi - lo) + 1;
    return lo + std::int64_t(eng_() % span);
  }

  // Standard normal via Box-Muller; the pair's second value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Independent child stream, stable under call order at the parent.
  Rng fork(std::uint64_t stream) const {
    return Rng(mix(mix(base_seed_state(), 0x9e3779b97f4a7c15ULL), stream));
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t base_seed_state() const {
    // use a copy so forking does not disturb this stream
    std::mt19937_64 copy = eng_;
    return copy();
  }

  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace force
