#include "bcsmag/fft.h"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace bcsmag {

namespace {
// FFTW's planner is not reentrant; creation and destruction are serialized.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace

Fft::Fft(GridPtr g) : g_(std::move(g)) {
  const int n = g_->n;
  rbuf_ = fftw_alloc_real(g_->nreal);
  fftw_complex* cb = fftw_alloc_complex(g_->ncplx);
  cbuf_ = reinterpret_cast<double*>(cb);
  if (!rbuf_ || !cbuf_) throw std::bad_alloc();
  std::lock_guard<std::mutex> lk(planner_mutex());
  fwd_ = reinterpret_cast<fftw_plan_s*>(
      fftw_plan_dft_r2c_3d(n, n, n, rbuf_, cb, FFTW_ESTIMATE));
  inv_ = reinterpret_cast<fftw_plan_s*>(
      fftw_plan_dft_c2r_3d(n, n, n, cb, rbuf_, FFTW_ESTIMATE));
  if (!fwd_ || !inv_) throw std::runtime_error("fft: plan creation failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lk(planner_mutex());
  fftw_destroy_plan(reinterpret_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(reinterpret_cast<fftw_plan>(inv_));
  fftw_free(rbuf_);
  fftw_free(cbuf_);
}

void Fft::forward(const double* in, double* out) const {
  std::lock_guard<std::mutex> lk(mu_);
  std::memcpy(rbuf_, in, g_->nreal * sizeof(double));
  fftw_execute(reinterpret_cast<fftw_plan>(fwd_));
  std::memcpy(out, cbuf_, 2 * g_->ncplx * sizeof(double));
}

void Fft::inverse(const double* in, double* out) const {
  std::lock_guard<std::mutex> lk(mu_);
  std::memcpy(cbuf_, in, 2 * g_->ncplx * sizeof(double));
  fftw_execute(reinterpret_cast<fftw_plan>(inv_));
  const double scale = 1.0 / static_cast<double>(g_->nreal);
  for (std::size_t i = 0; i < g_->nreal; ++i) out[i] = rbuf_[i] * scale;
}

SpectralField to_spectral(const Fft& fft, const VectorField& f) {
  const GridPtr& g = fft.grid();
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < g->nreal; ++i)
      if (!std::isfinite(f.c[a][i]))
        throw std::invalid_argument("fft: non-finite field value");
  SpectralField s(g);
  for (int a = 0; a < 3; ++a) fft.forward(f.c[a].data(), s.c[a].data());
  return s;
}

VectorField from_spectral(const Fft& fft, const SpectralField& s) {
  VectorField f(fft.grid());
  for (int a = 0; a < 3; ++a) fft.inverse(s.c[a].data(), f.c[a].data());
  return f;
}

}  // namespace bcsmag
