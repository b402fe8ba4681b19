// AVX2 kernel variants. This translation unit is compiled with -mavx2 -mfma;
// nothing here runs unless the runtime CPU check passes.

#include "bcsmag/kernels.h"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define BCSMAG_HAVE_AVX2_TU 1
#endif

namespace bcsmag {
namespace kern {

#ifdef BCSMAG_HAVE_AVX2_TU

namespace {

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double v_dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double v_nrm2sq(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void v_axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void v_xpay(const double* x, double a, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i),
                                _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void v_scale(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void v_mul(const double* m, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_mul_pd(_mm256_loadu_pd(m + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = m[i] * x[i];
}

const Ops kAvx2 = {"avx2", v_dot, v_nrm2sq, v_axpy, v_xpay, v_scale, v_mul};

}  // namespace

const Ops* avx2_ops_or_null() {
  static const Ops* v = [] {
    return (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
               ? &kAvx2
               : static_cast<const Ops*>(nullptr);
  }();
  return v;
}

#else

const Ops* avx2_ops_or_null() { return nullptr; }

#endif

}  // namespace kern
}  // namespace bcsmag
