#include "bcsmag/kernels.h"

#include <cstring>

namespace bcsmag {
namespace kern {

namespace {

double s_dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double s_nrm2sq(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void s_axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_xpay(const double* x, double a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void s_scale(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void s_mul(const double* m, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = m[i] * x[i];
}

const Ops kScalar = {"scalar", s_dot, s_nrm2sq, s_axpy,
                     s_xpay,   s_scale, s_mul};

}  // namespace

const Ops& scalar_ops() { return kScalar; }

const Ops& ops() {
  static const Ops* best = [] {
    const Ops* v = avx2_ops_or_null();
    return v ? v : &kScalar;
  }();
  return *best;
}

const Ops* ops_named(const char* name) {
  if (std::strcmp(name, "scalar") == 0) return &kScalar;
  if (std::strcmp(name, "avx2") == 0) return avx2_ops_or_null();
  return nullptr;
}

}  // namespace kern
}  // namespace bcsmag
