#ifndef BCSMAG_FFT_H
#define BCSMAG_FFT_H

// Real-to-complex FFT bound to one grid. Plans are created once with
// FFTW_ESTIMATE (measured plans can differ between runs, which would break
// bit-reproducible outputs) and executed through internal aligned buffers,
// so callers never see FFTW's c2r input destruction. A mutex serializes
// buffer use; a shared Fft is thread-safe but not concurrent.

#include <mutex>

#include "bcsmag/grid.h"

struct fftw_plan_s;

namespace bcsmag {

class Fft {
 public:
  explicit Fft(GridPtr g);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  // out: interleaved re,im of length 2*ncplx; unnormalized transform.
  void forward(const double* in, double* out) const;
  // in: interleaved re,im; out: nreal values, scaled by 1/n^3 so that
  // inverse(forward(x)) == x up to roundoff.
  void inverse(const double* in, double* out) const;

  const GridPtr& grid() const { return g_; }

 private:
  GridPtr g_;
  double* rbuf_;
  double* cbuf_;  // fftw_complex storage
  fftw_plan_s* fwd_;
  fftw_plan_s* inv_;
  mutable std::mutex mu_;
};

// Component-wise transforms; to_spectral rejects non-finite input.
SpectralField to_spectral(const Fft& fft, const VectorField& f);
VectorField from_spectral(const Fft& fft, const SpectralField& s);

}  // namespace bcsmag

#endif  // BCSMAG_FFT_H
