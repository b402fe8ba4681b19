#ifndef BCSMAG_RNG_H
#define BCSMAG_RNG_H

// Deterministic RNG. Draws go through the raw 64-bit stream with a fixed
// bit-shift mapping, never through std:: distributions, whose output is
// implementation-defined and would break byte-identical reruns.

#include <cmath>
#include <cstdint>
#include <random>

namespace bcsmag {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Standard normal via Box-Muller on the deterministic uniforms.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586477 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace bcsmag

#endif  // BCSMAG_RNG_H
