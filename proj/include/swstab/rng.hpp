#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace swstab {

// std::mt19937_64 is fully specified by the standard; the distribution
// helpers below are hand-rolled because std::uniform_*_distribution are
// implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); modulo bias is negligible at 64 bits.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  int index(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace swstab
