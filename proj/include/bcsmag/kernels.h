#ifndef BCSMAG_KERNELS_H
#define BCSMAG_KERNELS_H

// Flat array kernels used by the grid operators and the CG solver.
// A scalar reference implementation always exists; an AVX2 variant is
// selected at runtime when the CPU supports it. Both are exercised by the
// equivalence tests, and either path may be forced through ops_named().

#include <cstddef>

namespace bcsmag {
namespace kern {

struct Ops {
  const char* name;
  // sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i x[i]^2
  double (*nrm2sq)(const double* x, std::size_t n);
  // y[i] += a*x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y[i] = x[i] + a*y[i]
  void (*xpay)(const double* x, double a, double* y, std::size_t n);
  // x[i] *= a
  void (*scale)(double a, double* x, std::size_t n);
  // y[i] = m[i]*x[i]
  void (*mul)(const double* m, const double* x, double* y, std::size_t n);
};

const Ops& scalar_ops();
const Ops* avx2_ops_or_null();

// Best available implementation for this machine (decided once).
const Ops& ops();

// Lookup by name ("scalar", "avx2"); nullptr when unavailable.
const Ops* ops_named(const char* name);

}  // namespace kern
}  // namespace bcsmag

#endif  // BCSMAG_KERNELS_H
