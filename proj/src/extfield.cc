#include "bcsmag/extfield.h"

#include <cmath>
#include <stdexcept>

#include "bcsmag/field_ops.h"
#include "bcsmag/helmholtz.h"

namespace bcsmag {

namespace {

double bump(double u) {
  return (u < 1.0) ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
}

// int_{s<w} bump(s/w) dA = w^2 * 2*pi * int_0^1 bump(u) u du.
double tube_section_integral(double w) {
  const int nu = 4096;
  double s = 0.0;
  for (int i = 0; i <= nu; ++i) {
    const double u = static_cast<double>(i) / nu;
    const double simp = (i == 0 || i == nu) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += simp * bump(u) * u;
  }
  s *= 1.0 / (3.0 * nu);
  return w * w * 2.0 * M_PI * s;
}

}  // namespace

VectorField loop_current(GridPtr g, const LoopSpec& spec) {
  if (!(spec.radius > 0.0) || !(spec.tube_radius > 0.0))
    throw std::invalid_argument("loop_current: radius and tube must be > 0");
  if (spec.tube_radius >= spec.radius)
    throw std::invalid_argument(
        "loop_current: tube radius must be smaller than the loop radius");
  double ax = spec.axis[0], ay = spec.axis[1], az = spec.axis[2];
  const double an = std::sqrt(ax * ax + ay * ay + az * az);
  if (!(an > 0.0))
    throw std::invalid_argument("loop_current: zero axis");
  ax /= an;
  ay /= an;
  az /= an;

  const double amp = spec.current / tube_section_integral(spec.tube_radius);
  VectorField j(g);
  const int n = g->n;
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    const double d1 = g->coord[i] - spec.center[0];
    for (int jj = 0; jj < n; ++jj) {
      const double d2 = g->coord[jj] - spec.center[1];
      for (int k = 0; k < n; ++k, ++idx) {
        const double d3 = g->coord[k] - spec.center[2];
        const double zp = d1 * ax + d2 * ay + d3 * az;
        const double r1 = d1 - zp * ax;
        const double r2 = d2 - zp * ay;
        const double r3 = d3 - zp * az;
        const double rho = std::sqrt(r1 * r1 + r2 * r2 + r3 * r3);
        const double ds = rho - spec.radius;
        const double s2 = ds * ds + zp * zp;
        if (s2 >= spec.tube_radius * spec.tube_radius || rho == 0.0) continue;
        const double f = amp * bump(std::sqrt(s2) / spec.tube_radius);
        // azimuthal direction axis x rho_hat
        const double p1 = (ay * r3 - az * r2) / rho;
        const double p2 = (az * r1 - ax * r3) / rho;
        const double p3 = (ax * r2 - ay * r1) / rho;
        j.c[0][idx] = f * p1;
        j.c[1][idx] = f * p2;
        j.c[2][idx] = f * p3;
      }
    }
  }
  return j;
}

ExternalField make_external_field(const Fft& fft,
                                  const std::vector<LoopSpec>& loops,
                                  bool strict_support) {
  const GridPtr& g = fft.grid();
  VectorField j(g);
  for (const LoopSpec& spec : loops) {
    VectorField one = loop_current(g, spec);
    for (int a = 0; a < 3; ++a)
      for (std::size_t i = 0; i < g->nreal; ++i) j.c[a][i] += one.c[a][i];
  }

  ExternalField out;
  double inside = 0.0, total = 0.0;
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < g->nreal; ++i) {
      const double v2 = j.c[a][i] * j.c[a][i];
      total += v2;
      inside += g->cell_mask[i] * v2;
    }
  out.cell_overlap = total > 0.0 ? std::sqrt(inside / total) : 0.0;
  if (strict_support && inside > 0.0)
    throw std::invalid_argument(
        "make_external_field: current support overlaps the unit cell");

  remove_mean(j);
  if (total > 0.0) {
    std::vector<double> dv = divergence(fft, j);
    VectorField cu = curl(fft, j);
    double dn = 0.0;
    for (double v : dv) dn += v * v;
    double cn = 0.0;
    for (int a = 0; a < 3; ++a)
      for (double v : cu.c[a]) cn += v * v;
    out.div_residual = cn > 0.0 ? std::sqrt(dn / cn) : 0.0;
  }
  out.b_ext = biot_savart(fft, j);
  out.j_ext = std::move(j);
  return out;
}

ExternalField load_external_field(const Fft& fft, const std::string& path,
                                  bool strict_support) {
  VectorField j = read_vfld1(path);
  const GridPtr& g = fft.grid();
  if (j.g->n != g->n || j.g->box != g->box)
    throw std::invalid_argument(
        "load_external_field: file grid does not match the run grid");

  ExternalField out;
  double inside = 0.0, total = 0.0;
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < g->nreal; ++i) {
      const double v2 = j.c[a][i] * j.c[a][i];
      total += v2;
      inside += g->cell_mask[i] * v2;
    }
  out.cell_overlap = total > 0.0 ? std::sqrt(inside / total) : 0.0;
  if (strict_support && inside > 0.0)
    throw std::invalid_argument(
        "load_external_field: current support overlaps the unit cell");
  // Rebind to the run grid so downstream shares one GridSpec instance.
  j.g = g;
  remove_mean(j);
  if (total > 0.0) {
    std::vector<double> dv = divergence(fft, j);
    VectorField cu = curl(fft, j);
    double dn = 0.0;
    for (double v : dv) dn += v * v;
    double cn = 0.0;
    for (int a = 0; a < 3; ++a)
      for (double v : cu.c[a]) cn += v * v;
    out.div_residual = cn > 0.0 ? std::sqrt(dn / cn) : 0.0;
  }
  out.b_ext = biot_savart(fft, j);
  out.j_ext = std::move(j);
  return out;
}

}  // namespace bcsmag
