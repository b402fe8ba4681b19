#include "bcsmag/field_ops.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "bcsmag/kernels.h"

namespace bcsmag {

namespace {

void require_same_grid(const VectorField& f, const VectorField& g) {
  if (!f.g || !g.g || f.g->n != g.g->n || f.g->box != g.g->box)
    throw std::invalid_argument("fields: grid mismatch");
}

}  // namespace

double l2_inner(const VectorField& f, const VectorField& g) {
  require_same_grid(f, g);
  const auto& ops = kern::ops();
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    s += ops.dot(f.c[a].data(), g.c[a].data(), f.g->nreal);
  return s * f.g->dvol();
}

double l2_norm_sq(const VectorField& f) {
  const auto& ops = kern::ops();
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += ops.nrm2sq(f.c[a].data(), f.g->nreal);
  return s * f.g->dvol();
}

double l2_norm(const VectorField& f) { return std::sqrt(l2_norm_sq(f)); }

double spectral_inner(const SpectralField& a, const SpectralField& b) {
  const GridSpec& g = *a.g;
  const int n = g.n, nh = g.n / 2 + 1;
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double* pa = a.c[c].data();
    const double* pb = b.c[c].data();
    std::size_t q = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < nh; ++k, ++q)
          s += g.mult(k) * (pa[2 * q] * pb[2 * q] + pa[2 * q + 1] * pb[2 * q + 1]);
  }
  const double L3 = g.box * g.box * g.box;
  const double n3 = static_cast<double>(g.nreal);
  return s * L3 / (n3 * n3);
}

namespace {

void require_mean_free(const SpectralField& a) {
  const double n3 = static_cast<double>(a.g->nreal);
  for (int c = 0; c < 3; ++c)
    if (std::fabs(a.c[c][0]) / n3 > 1e-10)
      throw std::invalid_argument(
          "fields: energy norm requires a mean-free field");
}

}  // namespace

double energy_inner_hat(const SpectralField& a, const SpectralField& b) {
  require_mean_free(a);
  require_mean_free(b);
  const GridSpec& g = *a.g;
  const int n = g.n, nh = g.n / 2 + 1;
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double* pa = a.c[c].data();
    const double* pb = b.c[c].data();
    std::size_t q = 0;
    for (int i = 0; i < n; ++i) {
      const double ki2 = g.freq[i] * g.freq[i];
      for (int j = 0; j < n; ++j) {
        const double kij2 = ki2 + g.freq[j] * g.freq[j];
        for (int k = 0; k < nh; ++k, ++q) {
          const double k2 = kij2 + g.freq[k] * g.freq[k];
          if (k2 == 0.0) continue;
          s += g.mult(k) *
               (pa[2 * q] * pb[2 * q] + pa[2 * q + 1] * pb[2 * q + 1]) / k2;
        }
      }
    }
  }
  const double L3 = g.box * g.box * g.box;
  const double n3 = static_cast<double>(g.nreal);
  return s * L3 / (n3 * n3);
}

double energy_inner(const Fft& fft, const VectorField& j1,
                    const VectorField& j2) {
  require_same_grid(j1, j2);
  return energy_inner_hat(to_spectral(fft, j1), to_spectral(fft, j2));
}

std::array<double, 3> field_mean(const VectorField& f) {
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (int a = 0; a < 3; ++a) {
    double s = 0.0;
    for (double v : f.c[a]) s += v;
    m[a] = s / static_cast<double>(f.g->nreal);
  }
  return m;
}

void remove_mean(VectorField& f) {
  const auto m = field_mean(f);
  for (int a = 0; a < 3; ++a)
    for (double& v : f.c[a]) v -= m[a];
}

SpectralField curl_hat(const SpectralField& s) {
  const GridSpec& g = *s.g;
  const int n = g.n, nh = g.n / 2 + 1;
  SpectralField out(s.g);
  std::size_t q = 0;
  for (int i = 0; i < n; ++i) {
    const double k1 = g.freq[i];
    for (int j = 0; j < n; ++j) {
      const double k2 = g.freq[j];
      for (int k = 0; k < nh; ++k, ++q) {
        const double k3 = g.freq[k];
        const double f1r = s.c[0][2 * q], f1i = s.c[0][2 * q + 1];
        const double f2r = s.c[1][2 * q], f2i = s.c[1][2 * q + 1];
        const double f3r = s.c[2][2 * q], f3i = s.c[2][2 * q + 1];
        // (curl f)^ = i k x f^
        out.c[0][2 * q] = -(k2 * f3i - k3 * f2i);
        out.c[0][2 * q + 1] = k2 * f3r - k3 * f2r;
        out.c[1][2 * q] = -(k3 * f1i - k1 * f3i);
        out.c[1][2 * q + 1] = k3 * f1r - k1 * f3r;
        out.c[2][2 * q] = -(k1 * f2i - k2 * f1i);
        out.c[2][2 * q + 1] = k1 * f2r - k2 * f1r;
      }
    }
  }
  return out;
}

VectorField curl(const Fft& fft, const VectorField& f) {
  return from_spectral(fft, curl_hat(to_spectral(fft, f)));
}

std::vector<double> divergence(const Fft& fft, const VectorField& f) {
  const GridSpec& g = *f.g;
  SpectralField s = to_spectral(fft, f);
  std::vector<double> dhat(2 * g.ncplx, 0.0);
  const int n = g.n, nh = g.n / 2 + 1;
  std::size_t q = 0;
  for (int i = 0; i < n; ++i) {
    const double k1 = g.freq[i];
    for (int j = 0; j < n; ++j) {
      const double k2 = g.freq[j];
      for (int k = 0; k < nh; ++k, ++q) {
        const double k3 = g.freq[k];
        const double dr =
            k1 * s.c[0][2 * q] + k2 * s.c[1][2 * q] + k3 * s.c[2][2 * q];
        const double di = k1 * s.c[0][2 * q + 1] + k2 * s.c[1][2 * q + 1] +
                          k3 * s.c[2][2 * q + 1];
        dhat[2 * q] = -di;  // i k . f^
        dhat[2 * q + 1] = dr;
      }
    }
  }
  std::vector<double> out(g.nreal);
  fft.inverse(dhat.data(), out.data());
  return out;
}

double cell_integral(const GridSpec& g, const std::vector<double>& s) {
  double acc = 0.0;
  for (const CellNode& cn : g.cell_nodes) acc += cn.w * s[cn.idx];
  return acc * g.dvol();
}

void apply_cell_mask(VectorField& f) {
  const auto& ops = kern::ops();
  for (int a = 0; a < 3; ++a)
    ops.mul(f.g->cell_mask.data(), f.c[a].data(), f.c[a].data(), f.g->nreal);
}

namespace {

double bump(double u) {
  return (u < 1.0) ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
}

}  // namespace

Mollifier::Mollifier(GridPtr g, double epsilon, double support_radius)
    : g_(std::move(g)), eps_(epsilon), radius_(support_radius) {
  if (!(eps_ > 0.0) || !std::isfinite(eps_) || !(radius_ > 0.0) ||
      !std::isfinite(radius_))
    throw std::invalid_argument("mollifier: epsilon and radius must be > 0");
  if (eps_ * (1.0 + 1e-12) < 2.0 * g_->h)
    throw std::invalid_argument(
        "mollifier: epsilon below grid resolution (need eps >= 2*spacing)");

  // Radial transform J(q) = int_0^1 phi(u) u^2 sinc(q u) du by Simpson;
  // normalizing by J(0) makes the multiplier exactly 1 at k = 0 and
  // |J(q)|/J(0) <= 1 since |sinc| <= 1 against a non-negative weight.
  const int nu = 2048;
  std::vector<double> w(nu + 1);
  for (int i = 0; i <= nu; ++i) {
    const double u = static_cast<double>(i) / nu;
    const double simp = (i == 0 || i == nu) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    w[i] = simp * bump(u) * u * u;
  }
  const double kmax =
      std::sqrt(3.0) * M_PI * g_->n / g_->box;
  const double qmax = eps_ * radius_ * kmax * (1.0 + 1e-9) + 1e-12;
  const int nt = 1 << 16;
  std::vector<double> table(nt + 1);
  for (int t = 0; t <= nt; ++t) {
    const double q = qmax * t / nt;
    double s = 0.0;
    for (int i = 0; i <= nu; ++i) {
      const double u = static_cast<double>(i) / nu;
      const double x = q * u;
      const double sinc = (std::fabs(x) < 1e-8) ? 1.0 - x * x / 6.0
                                                : std::sin(x) / x;
      s += w[i] * sinc;
    }
    table[t] = s;
  }
  const double j0 = table[0];
  for (double& v : table) v /= j0;

  mult_.resize(g_->ncplx);
  const int n = g_->n, nh = g_->n / 2 + 1;
  std::size_t q = 0;
  for (int i = 0; i < n; ++i) {
    const double ki2 = g_->freq[i] * g_->freq[i];
    for (int j = 0; j < n; ++j) {
      const double kij2 = ki2 + g_->freq[j] * g_->freq[j];
      for (int k = 0; k < nh; ++k, ++q) {
        const double kk = std::sqrt(kij2 + g_->freq[k] * g_->freq[k]);
        const double x = eps_ * radius_ * kk / qmax * nt;
        const int t0 = std::min(static_cast<int>(x), nt - 1);
        const double fr = x - t0;
        mult_[q] = table[t0] * (1.0 - fr) + table[t0 + 1] * fr;
      }
    }
  }
}

VectorField Mollifier::convolve(const Fft& fft, const VectorField& b) const {
  SpectralField s = to_spectral(fft, b);
  for (int a = 0; a < 3; ++a)
    for (std::size_t q = 0; q < g_->ncplx; ++q) {
      s.c[a][2 * q] *= mult_[q];
      s.c[a][2 * q + 1] *= mult_[q];
    }
  return from_spectral(fft, s);
}

VectorField Mollifier::restrict_mollify(const Fft& fft,
                                        const VectorField& b) const {
  VectorField out = convolve(fft, b);
  apply_cell_mask(out);
  return out;
}

namespace {

void put_le(double v, unsigned char* p) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(u >> (8 * i));
}

double get_le(const unsigned char* p) {
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void write_vfld1(const std::string& path, const VectorField& f) {
  const GridSpec& g = *f.g;
  const std::string tmp = path + ".tmp";
  std::FILE* fp = std::fopen(tmp.c_str(), "wb");
  if (!fp) throw std::runtime_error("vfld1: cannot open " + tmp);
  char header[128];
  std::snprintf(header, sizeof(header), "VFLD1 %d %d %d %.17g\n", g.n, g.n,
                g.n, g.box);
  std::fputs(header, fp);
  std::vector<unsigned char> buf(8 * g.nreal);
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < g.nreal; ++i) put_le(f.c[a][i], &buf[8 * i]);
    if (std::fwrite(buf.data(), 1, buf.size(), fp) != buf.size()) {
      std::fclose(fp);
      std::remove(tmp.c_str());
      throw std::runtime_error("vfld1: short write to " + tmp);
    }
  }
  if (std::fclose(fp) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("vfld1: close failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("vfld1: rename failed for " + path);
  }
}

VectorField read_vfld1(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("vfld1: cannot open " + path);
  char header[256];
  if (!std::fgets(header, sizeof(header), fp)) {
    std::fclose(fp);
    throw std::runtime_error("vfld1: missing header in " + path);
  }
  int nx = 0, ny = 0, nz = 0;
  double box = 0.0;
  if (std::sscanf(header, "VFLD1 %d %d %d %lf", &nx, &ny, &nz, &box) != 4) {
    std::fclose(fp);
    throw std::runtime_error("vfld1: malformed header in " + path);
  }
  if (nx != ny || ny != nz) {
    std::fclose(fp);
    throw std::runtime_error("vfld1: only cubic grids are supported");
  }
  GridPtr g;
  try {
    g = GridSpec::make(nx, box);
  } catch (const std::exception& e) {
    std::fclose(fp);
    throw std::runtime_error(std::string("vfld1: bad grid header: ") +
                             e.what());
  }
  VectorField f(g);
  std::vector<unsigned char> buf(8 * g->nreal);
  for (int a = 0; a < 3; ++a) {
    const std::size_t got = std::fread(buf.data(), 1, buf.size(), fp);
    if (got != buf.size()) {
      std::fclose(fp);
      throw std::runtime_error(
          "vfld1: payload length mismatch in " + path + " (component " +
          std::to_string(a) + ": expected " + std::to_string(buf.size()) +
          " bytes, got " + std::to_string(got) + ")");
    }
    for (std::size_t i = 0; i < g->nreal; ++i) f.c[a][i] = get_le(&buf[8 * i]);
  }
  unsigned char extra;
  if (std::fread(&extra, 1, 1, fp) == 1) {
    std::fclose(fp);
    throw std::runtime_error("vfld1: payload length mismatch in " + path +
                             " (trailing bytes)");
  }
  std::fclose(fp);
  return f;
}

}  // namespace bcsmag
