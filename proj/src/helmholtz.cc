#include "bcsmag/helmholtz.h"

#include <cmath>
#include <stdexcept>

#include "bcsmag/field_ops.h"

namespace bcsmag {

namespace {

// Visit every r2c coefficient with its wavevector.
template <typename F>
void for_each_mode(const GridSpec& g, F&& f) {
  const int n = g.n, nh = g.n / 2 + 1;
  std::size_t q = 0;
  for (int i = 0; i < n; ++i) {
    const double k1 = g.freq[i];
    for (int j = 0; j < n; ++j) {
      const double k2 = g.freq[j];
      for (int k = 0; k < nh; ++k, ++q) f(q, k1, k2, g.freq[k]);
    }
  }
}

}  // namespace

void apply_longitudinal_hat(SpectralField& s) {
  for_each_mode(*s.g, [&](std::size_t q, double k1, double k2, double k3) {
    const double k2n = k1 * k1 + k2 * k2 + k3 * k3;
    for (int part = 0; part < 2; ++part) {
      const std::size_t p = 2 * q + part;
      const double f1 = s.c[0][p], f2 = s.c[1][p], f3 = s.c[2][p];
      if (k2n == 0.0) {
        s.c[0][p] = s.c[1][p] = s.c[2][p] = 0.0;
        continue;
      }
      const double kd = (k1 * f1 + k2 * f2 + k3 * f3) / k2n;
      s.c[0][p] = k1 * kd;
      s.c[1][p] = k2 * kd;
      s.c[2][p] = k3 * kd;
    }
  });
}

void apply_transverse_hat(SpectralField& s) {
  for_each_mode(*s.g, [&](std::size_t q, double k1, double k2, double k3) {
    const double k2n = k1 * k1 + k2 * k2 + k3 * k3;
    for (int part = 0; part < 2; ++part) {
      const std::size_t p = 2 * q + part;
      const double f1 = s.c[0][p], f2 = s.c[1][p], f3 = s.c[2][p];
      if (k2n == 0.0) {
        s.c[0][p] = s.c[1][p] = s.c[2][p] = 0.0;
        continue;
      }
      const double kd = (k1 * f1 + k2 * f2 + k3 * f3) / k2n;
      s.c[0][p] = f1 - k1 * kd;
      s.c[1][p] = f2 - k2 * kd;
      s.c[2][p] = f3 - k3 * kd;
    }
  });
}

void apply_biot_savart_hat(SpectralField& s) {
  for_each_mode(*s.g, [&](std::size_t q, double k1, double k2, double k3) {
    const double k2n = k1 * k1 + k2 * k2 + k3 * k3;
    const double f1r = s.c[0][2 * q], f1i = s.c[0][2 * q + 1];
    const double f2r = s.c[1][2 * q], f2i = s.c[1][2 * q + 1];
    const double f3r = s.c[2][2 * q], f3i = s.c[2][2 * q + 1];
    if (k2n == 0.0) {
      for (int a = 0; a < 3; ++a) s.c[a][2 * q] = s.c[a][2 * q + 1] = 0.0;
      return;
    }
    // i (k x f^) / |k|^2
    s.c[0][2 * q] = -(k2 * f3i - k3 * f2i) / k2n;
    s.c[0][2 * q + 1] = (k2 * f3r - k3 * f2r) / k2n;
    s.c[1][2 * q] = -(k3 * f1i - k1 * f3i) / k2n;
    s.c[1][2 * q + 1] = (k3 * f1r - k1 * f3r) / k2n;
    s.c[2][2 * q] = -(k1 * f2i - k2 * f1i) / k2n;
    s.c[2][2 * q + 1] = (k1 * f2r - k2 * f1r) / k2n;
  });
}

void apply_inv_laplace_hat(SpectralField& s) {
  for_each_mode(*s.g, [&](std::size_t q, double k1, double k2, double k3) {
    const double k2n = k1 * k1 + k2 * k2 + k3 * k3;
    const double w = (k2n == 0.0) ? 0.0 : 1.0 / k2n;
    for (int a = 0; a < 3; ++a) {
      s.c[a][2 * q] *= w;
      s.c[a][2 * q + 1] *= w;
    }
  });
}

void apply_neg_laplace_hat(SpectralField& s) {
  for_each_mode(*s.g, [&](std::size_t q, double k1, double k2, double k3) {
    const double k2n = k1 * k1 + k2 * k2 + k3 * k3;
    for (int a = 0; a < 3; ++a) {
      s.c[a][2 * q] *= k2n;
      s.c[a][2 * q + 1] *= k2n;
    }
  });
}

VectorField project_longitudinal(const Fft& fft, const VectorField& f) {
  SpectralField s = to_spectral(fft, f);
  apply_longitudinal_hat(s);
  return from_spectral(fft, s);
}

VectorField project_transverse(const Fft& fft, const VectorField& f) {
  SpectralField s = to_spectral(fft, f);
  apply_transverse_hat(s);
  return from_spectral(fft, s);
}

HelmholtzSplit helmholtz_split(const Fft& fft, const VectorField& f) {
  SpectralField s = to_spectral(fft, f);
  SpectralField t = s;
  apply_longitudinal_hat(s);
  apply_transverse_hat(t);
  return {from_spectral(fft, s), from_spectral(fft, t)};
}

namespace {

void require_small_mean(const VectorField& j, const char* who) {
  double linf = 0.0;
  for (int a = 0; a < 3; ++a)
    for (double v : j.c[a]) linf = std::max(linf, std::fabs(v));
  const auto m = field_mean(j);
  for (int a = 0; a < 3; ++a)
    if (std::fabs(m[a]) > 1e-10 * (1.0 + linf))
      throw std::invalid_argument(std::string(who) +
                                  ": input must be mean-free");
}

}  // namespace

VectorField biot_savart(const Fft& fft, const VectorField& j) {
  require_small_mean(j, "biot_savart");
  SpectralField s = to_spectral(fft, j);
  apply_biot_savart_hat(s);
  return from_spectral(fft, s);
}

VectorField vector_potential(const Fft& fft, const VectorField& j) {
  require_small_mean(j, "vector_potential");
  SpectralField s = to_spectral(fft, j);
  apply_inv_laplace_hat(s);
  return from_spectral(fft, s);
}

std::vector<std::array<double, 3>> biot_savart_direct(
    const Fft& fft, const VectorField& j,
    const std::vector<std::array<double, 3>>& points) {
  const GridSpec& g = *j.g;
  VectorField w = curl(fft, j);
  const double dv = g.dvol();
  const double rmin = 0.5 * g.h;  // self-cell exclusion
  std::vector<std::array<double, 3>> out(points.size(), {0.0, 0.0, 0.0});
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto& t = points[p];
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0;
    std::size_t idx = 0;
    for (int i = 0; i < g.n; ++i) {
      const double d1 = t[0] - g.coord[i];
      for (int jj = 0; jj < g.n; ++jj) {
        const double d2 = t[1] - g.coord[jj];
        const double d12 = d1 * d1 + d2 * d2;
        for (int k = 0; k < g.n; ++k, ++idx) {
          const double d3 = t[2] - g.coord[k];
          const double r = std::sqrt(d12 + d3 * d3);
          if (r < rmin) continue;
          const double inv = 1.0 / r;
          acc0 += w.c[0][idx] * inv;
          acc1 += w.c[1][idx] * inv;
          acc2 += w.c[2][idx] * inv;
        }
      }
    }
    const double pref = dv / (4.0 * M_PI);
    out[p] = {pref * acc0, pref * acc1, pref * acc2};
  }
  return out;
}

}  // namespace bcsmag
