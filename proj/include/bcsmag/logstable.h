#ifndef BCSMAG_LOGSTABLE_H
#define BCSMAG_LOGSTABLE_H

// Overflow-safe kernels for the strong-coupling free energy. At low
// temperature beta*g reaches a few thousand, so cosh/sinh may never be
// formed directly; every ratio is evaluated with max-shifted exponentials.

#include <algorithm>
#include <cmath>

namespace bcsmag {

inline constexpr double kLn2 = 0.6931471805599453094;

// ln(cosh x) = |x| - ln2 + ln(1 + e^{-2|x|})
inline double log_cosh(double x) {
  const double a = std::fabs(x);
  return a - kLn2 + std::log1p(std::exp(-2.0 * a));
}

// ln( cosh a + e^{-c} cosh b ), valid for any sign of a, c and b >= 0.
// 2*(cosh a + e^{-c} cosh b) = e^{|a|} + e^{-|a|} + e^{b-c} + e^{-b-c}.
inline double log_cosh_sum(double a, double b, double c) {
  a = std::fabs(a);
  const double m = std::max(a, b - c);
  return m - kLn2 + std::log(std::exp(a - m) + std::exp(-a - m) +
                             std::exp(b - c - m) + std::exp(-b - c - m));
}

// sinh(a) / (cosh a + e^{-c} cosh b), b >= 0. Bounded by 1 in magnitude.
inline double ratio_mag(double a, double b, double c) {
  const double s = (a < 0.0) ? -1.0 : 1.0;
  a = std::fabs(a);
  const double m = std::max(a, b - c);
  const double den = std::exp(a - m) + std::exp(-a - m) +
                     std::exp(b - c - m) + std::exp(-b - c - m);
  return s * (std::exp(a - m) - std::exp(-a - m)) / den;
}

// sinh(b) / (e^{c} cosh a + cosh b), b >= 0.
// 2*(e^c cosh a + cosh b) = e^{c+|a|} + e^{c-|a|} + e^{b} + e^{-b}.
inline double ratio_gap(double a, double b, double c) {
  a = std::fabs(a);
  const double m = std::max(c + a, b);
  const double den = std::exp(c + a - m) + std::exp(c - a - m) +
                     std::exp(b - m) + std::exp(-b - m);
  return (std::exp(b - m) - std::exp(-b - m)) / den;
}

// 1 / (e^{c} cosh a + cosh b): shift-protected reciprocal, underflows to 0.
inline double inv_cosh_sum(double a, double b, double c) {
  a = std::fabs(a);
  const double m = std::max(c + a, b);
  const double den = std::exp(c + a - m) + std::exp(c - a - m) +
                     std::exp(b - m) + std::exp(-b - m);
  return 2.0 * std::exp(-m) / den;
}

// sinh(x)/x with the removable singularity filled by its series.
inline double sinhc(double x) {
  const double a = std::fabs(x);
  if (a < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

// sinh(beta*g) / (g * (e^{c} cosh a + cosh(beta*g))): the shared kernel of
// the local Cooper-pair and electron densities. Finite as g -> 0, where it
// tends to beta / (e^c cosh a + 1). Series switch below g = 1e-8.
inline double ratio_gap_over_g(double beta, double g, double a, double c) {
  const double b = beta * g;
  if (g < 1e-8) return beta * sinhc(b) * inv_cosh_sum(a, b, c);
  return ratio_gap(a, b, c) / g;
}

}  // namespace bcsmag

#endif  // BCSMAG_LOGSTABLE_H
