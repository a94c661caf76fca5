#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace mucond {

// Deterministic random helpers pinned to mt19937_64. The standard
// distributions are implementation-defined, so uniform and normal draws are
// derived from raw engine output here; seeded runs reproduce identical
// streams on any conforming standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t reject = (-n) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t v = eng_();
      if (v >= reject) return v % n;
    }
  }

  // Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mucond
