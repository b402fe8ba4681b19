#include "bcsmag/thermo.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "bcsmag/logstable.h"

namespace bcsmag {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_finite(double x, const char* what) {
  if (!std::isfinite(x))
    throw std::invalid_argument(std::string("ModelParams: ") + what +
                                " must be finite");
}

// Momentum nodes k_j = -pi + 2 pi j / nk; the lattice is closed under
// k -> -k, so sampled evenness is well defined.
std::vector<double> sample_symbol(const Dispersion& d) {
  std::vector<double> ek(static_cast<std::size_t>(d.nk) * d.nk * d.nk);
  const double step = 2.0 * kPi / d.nk;
  std::size_t idx = 0;
  for (int i = 0; i < d.nk; ++i)
    for (int j = 0; j < d.nk; ++j)
      for (int k = 0; k < d.nk; ++k)
        ek[idx++] = d.symbol(-kPi + step * i, -kPi + step * j,
                             -kPi + step * k);
  return ek;
}

// Shared machinery for the gap solve: the functional, its stationarity
// defect, and the quasi-free variants, all over grouped field values.
struct GapEngine {
  const ModelParams& p;
  // Distinct h values with accumulated quadrature weight (sums to 1).
  std::vector<std::pair<double, double>> hw;
  // (mu - e(k))^2 over the momentum lattice; empty without dispersion.
  std::vector<double> mu_ek2;

  GapEngine(const ModelParams& params, const VectorField& B) : p(params) {
    const GridSpec& g = *B.g;
    std::map<double, double> groups;
    for (const CellNode& cn : g.cell_nodes) {
      const double bx = B.c[0][cn.idx], by = B.c[1][cn.idx],
                   bz = B.c[2][cn.idx];
      const double h = p.eta * std::sqrt(bx * bx + by * by + bz * bz);
      groups[h] += cn.w * g.dvol();
    }
    hw.assign(groups.begin(), groups.end());
    if (p.dispersion) {
      mu_ek2 = sample_symbol(*p.dispersion);
      for (double& e : mu_ek2) {
        const double d = p.mu - e;
        e = d * d;
      }
    }
  }

  double objective(double r) const {
    const double base = p.mu + kLn2 / p.beta - p.gamma * r;
    double integral = 0.0;
    if (!p.dispersion) {
      const double bg = p.beta * g_of_r(p, r);
      const double c = p.lambda * p.beta;
      for (const auto& [h, w] : hw)
        integral += w * log_cosh_sum(p.beta * h, bg, c);
    } else {
      const double g2r = p.gamma * p.gamma * r;
      std::vector<double> be(mu_ek2.size());
      for (std::size_t k = 0; k < mu_ek2.size(); ++k)
        be[k] = p.beta * std::sqrt(mu_ek2[k] + g2r);
      const double inv = 1.0 / static_cast<double>(be.size());
      for (const auto& [h, w] : hw) {
        const double a = p.beta * h;
        double acc = 0.0;
        for (double b : be) acc += log_cosh_sum(a, b, 0.0);
        integral += w * acc * inv;
      }
    }
    return base + integral / p.beta;
  }

  // Gap-equation defect psi(r); dF/dr = (gamma^2 / 2g) psi(r), so the
  // stationarity root and the residual coincide.
  double defect(double r) const {
    const double g = g_of_r(p, r);
    double s = 0.0;
    if (!p.dispersion) {
      const double bg = p.beta * g;
      const double c = p.lambda * p.beta;
      for (const auto& [h, w] : hw) s += w * ratio_gap(p.beta * h, bg, c);
    } else {
      const double g2r = p.gamma * p.gamma * r;
      std::vector<double> ek(mu_ek2.size());
      for (std::size_t k = 0; k < mu_ek2.size(); ++k)
        ek[k] = std::sqrt(mu_ek2[k] + g2r);
      const double inv = 1.0 / static_cast<double>(ek.size());
      for (const auto& [h, w] : hw) {
        const double a = p.beta * h;
        double acc = 0.0;
        for (double e : ek) acc += g * ratio_gap_over_g(p.beta, e, a, 0.0);
        s += w * acc * inv;
      }
    }
    return s - 2.0 * g / p.gamma;
  }
};

double golden_max(const GapEngine& eng, double a, double b) {
  const double phi = 0.6180339887498948482;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = eng.objective(x1), f2 = eng.objective(x2);
  for (int it = 0; it < 90 && (b - a) > 1e-17; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = eng.objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = eng.objective(x1);
    }
  }
  return 0.5 * (a + b);
}

double cell_average(const GridSpec& g, const std::vector<double>& v,
                    const std::vector<unsigned char>* region,
                    const char* what) {
  double num = 0.0, den = 0.0;
  for (const CellNode& cn : g.cell_nodes) {
    if (region && !(*region)[cn.idx]) continue;
    num += cn.w * g.dvol() * v[cn.idx];
    den += cn.w * g.dvol();
  }
  if (den <= 0.0)
    throw std::invalid_argument(std::string(what) +
                                ": region does not meet the unit cell");
  return num / den;
}

}  // namespace

void ModelParams::validate() const {
  check_finite(beta, "beta");
  check_finite(mu, "mu");
  check_finite(lambda, "lambda");
  check_finite(gamma, "gamma");
  check_finite(eta, "eta");
  if (beta <= 0.0) throw std::invalid_argument("ModelParams: beta must be > 0");
  if (gamma <= 0.0)
    throw std::invalid_argument("ModelParams: gamma must be > 0");
  if (eta <= 0.0) throw std::invalid_argument("ModelParams: eta must be > 0");
  if (dispersion) {
    if (!dispersion->symbol)
      throw std::invalid_argument("ModelParams: dispersion symbol is empty");
    if (dispersion->nk < 2)
      throw std::invalid_argument("ModelParams: dispersion nk must be >= 2");
    if (lambda != 0.0)
      throw std::invalid_argument(
          "ModelParams: dispersion requires lambda = 0");
    const double probes[8][3] = {
        {0.3, -1.1, 2.0},  {1.7, 0.4, -0.9}, {-2.6, 2.2, 0.1},
        {0.05, 0.6, -1.4}, {2.9, -2.9, 1.3}, {-0.8, -0.2, 0.7},
        {1.1, 1.9, 2.8},   {-1.5, 0.9, -2.3}};
    for (const auto& k : probes) {
      const double a = dispersion->symbol(k[0], k[1], k[2]);
      const double b = dispersion->symbol(-k[0], -k[1], -k[2]);
      if (std::fabs(a - b) > 1e-10 * (1.0 + std::fabs(a)))
        throw std::invalid_argument(
            "ModelParams: dispersion symbol is not even");
    }
  }
}

double g_of_r(const ModelParams& p, double r) {
  const double d = p.mu - p.lambda;
  return std::sqrt(d * d + p.gamma * p.gamma * r);
}

std::vector<double> field_strength(const ModelParams& p,
                                   const VectorField& B) {
  const GridSpec& g = *B.g;
  std::vector<double> h;
  h.reserve(g.cell_nodes.size());
  for (const CellNode& cn : g.cell_nodes) {
    const double bx = B.c[0][cn.idx], by = B.c[1][cn.idx],
                 bz = B.c[2][cn.idx];
    h.push_back(p.eta * std::sqrt(bx * bx + by * by + bz * bz));
  }
  return h;
}

double free_energy_functional(const ModelParams& p, double r,
                              const std::vector<double>& h_cell,
                              const GridSpec& g) {
  p.validate();
  if (r < 0.0)
    throw std::invalid_argument("free_energy_functional: r must be >= 0");
  if (h_cell.size() != g.cell_nodes.size())
    throw std::invalid_argument(
        "free_energy_functional: h_cell size does not match the cell nodes");
  const double bg = p.beta * g_of_r(p, r);
  const double c = p.lambda * p.beta;
  double integral = 0.0;
  for (std::size_t i = 0; i < h_cell.size(); ++i) {
    if (h_cell[i] < 0.0)
      throw std::invalid_argument("free_energy_functional: h_t must be >= 0");
    integral +=
        g.cell_nodes[i].w * g.dvol() * log_cosh_sum(p.beta * h_cell[i], bg, c);
  }
  return p.mu + kLn2 / p.beta - p.gamma * r + integral / p.beta;
}

double free_energy_functional(const ModelParams& p, double r,
                              const VectorField& B) {
  return free_energy_functional(p, r, field_strength(p, B), *B.g);
}

GapSolution solve_gap(const ModelParams& p, const VectorField& B) {
  p.validate();
  GapEngine eng(p, B);
  GapSolution out;
  const double d = p.mu - p.lambda;
  // Without hopping the gap equation forces r <= 1/4 - (mu-lambda)^2/gamma^2;
  // with a dispersion only the generic r <= 1/4 bound is kept.
  out.r_upper = p.dispersion
                    ? 0.25
                    : std::max(0.0, 0.25 - d * d / (p.gamma * p.gamma));
  if (out.r_upper <= 0.0) {
    out.objective = eng.objective(0.0);
    return out;
  }

  const int nscan = 1000;
  const double step = out.r_upper / nscan;
  std::vector<double> fval(nscan + 1);
  for (int i = 0; i <= nscan; ++i) fval[i] = eng.objective(i * step);
  int best = 0;
  for (int i = 1; i <= nscan; ++i)
    if (fval[i] > fval[best]) best = i;
  // Local scan maxima: candidates for refinement and the multimodal flag.
  int center = best;
  for (int i = 0; i <= nscan; ++i) {
    const bool up = (i == 0) || fval[i] >= fval[i - 1];
    const bool down = (i == nscan) || fval[i] >= fval[i + 1];
    if (!(up && down)) continue;
    if (fval[best] - fval[i] <= 1e-8) {
      if (std::abs(i - best) > 2) out.multimodal = true;
      if (i > center) center = i;  // tie-break toward the larger r
    }
  }

  const double lo = std::max(0.0, center * step - step);
  const double hi = std::min(out.r_upper, center * step + step);
  double r = golden_max(eng, lo, hi);

  // Polish on the stationarity defect, which falls through zero at an
  // interior maximum.
  double a = std::max(0.0, r - step), b = std::min(out.r_upper, r + step);
  double fa = eng.defect(a), fb = eng.defect(b);
  int widen = 0;
  while (fa <= 0.0 && a > 0.0 && widen < 8) {
    a = std::max(0.0, a - step * (1 << widen));
    fa = eng.defect(a);
    ++widen;
  }
  widen = 0;
  while (fb >= 0.0 && b < out.r_upper && widen < 8) {
    b = std::min(out.r_upper, b + step * (1 << widen));
    fb = eng.defect(b);
    ++widen;
  }
  if (fa > 0.0 && fb < 0.0) {
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      const double fm = eng.defect(mid);
      if (fm > 0.0) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
        fb = fm;
      }
    }
    r = (std::fabs(fa) <= std::fabs(fb)) ? a : b;
  } else if (fb >= 0.0 && b >= out.r_upper) {
    r = out.r_upper;  // still ascending at the admissible boundary
  } else if (fa <= 0.0 && a <= 0.0) {
    r = 0.0;  // descending from the start: normal phase
  }

  out.r_beta = r;
  out.objective = eng.objective(r);
  out.residual = std::fabs(eng.defect(r));
  out.superconducting = r > 1e-10;
  if (!out.superconducting) {
    out.r_beta = 0.0;
    out.objective = eng.objective(0.0);
    out.residual = 0.0;
  }
  return out;
}

VectorField magnetization_density(const ModelParams& p,
                                  const GapSolution& gap,
                                  const VectorField& B) {
  const GridSpec& g = *B.g;
  VectorField M(B.g);
  const double bg = p.beta * g_of_r(p, gap.r_beta);
  const double c = p.lambda * p.beta;
  for (const CellNode& cn : g.cell_nodes) {
    const double bx = B.c[0][cn.idx], by = B.c[1][cn.idx],
                 bz = B.c[2][cn.idx];
    const double mag = std::sqrt(bx * bx + by * by + bz * bz);
    if (mag == 0.0) continue;  // sinh(0) = 0
    const double f = p.eta * ratio_mag(p.beta * p.eta * mag, bg, c) / mag;
    M.c[0][cn.idx] = f * bx;
    M.c[1][cn.idx] = f * by;
    M.c[2][cn.idx] = f * bz;
  }
  return M;
}

DensityField cooper_density_local(const ModelParams& p,
                                  const GapSolution& gap,
                                  const VectorField& B,
                                  const std::vector<unsigned char>* region) {
  const GridSpec& g = *B.g;
  DensityField out;
  out.g = B.g;
  out.v.assign(g.nreal, 0.0);
  const double gr = g_of_r(p, gap.r_beta);
  const double c = p.lambda * p.beta;
  const double pref = 0.5 * p.gamma * gap.r_beta;
  for (const CellNode& cn : g.cell_nodes) {
    const double bx = B.c[0][cn.idx], by = B.c[1][cn.idx],
                 bz = B.c[2][cn.idx];
    const double h = p.eta * std::sqrt(bx * bx + by * by + bz * bz);
    out.v[cn.idx] = pref * ratio_gap_over_g(p.beta, gr, p.beta * h, c);
  }
  out.region_average = cell_average(g, out.v, region, "cooper_density_local");
  return out;
}

DensityField electron_density(const ModelParams& p, const GapSolution& gap,
                              const VectorField& B,
                              const std::vector<unsigned char>* region) {
  const GridSpec& g = *B.g;
  DensityField out;
  out.g = B.g;
  out.v.assign(g.nreal, 0.0);
  const double gr = g_of_r(p, gap.r_beta);
  const double c = p.lambda * p.beta;
  const double d = p.mu - p.lambda;
  for (const CellNode& cn : g.cell_nodes) {
    const double bx = B.c[0][cn.idx], by = B.c[1][cn.idx],
                 bz = B.c[2][cn.idx];
    const double h = p.eta * std::sqrt(bx * bx + by * by + bz * bz);
    out.v[cn.idx] = 1.0 + d * ratio_gap_over_g(p.beta, gr, p.beta * h, c);
  }
  out.region_average = cell_average(g, out.v, region, "electron_density");
  return out;
}

double pressure(const ModelParams& p, const VectorField& B) {
  return solve_gap(p, B).objective;
}

CriterionReport superconducting_criterion(const ModelParams& p,
                                          double ball_radius) {
  p.validate();
  if (ball_radius <= 0.0)
    throw std::invalid_argument(
        "superconducting_criterion: ball radius must be > 0");
  if (p.mu >= -ball_radius * p.eta)
    throw std::invalid_argument(
        "superconducting_criterion: requires mu < -R eta");
  CriterionReport rep;
  rep.gamma0 = 4.0 / (1.0 - ball_radius * p.eta / std::fabs(p.mu));
  rep.gamma_threshold = std::fabs(p.mu - p.lambda) * rep.gamma0;
  const double d = (p.mu - p.lambda) / p.gamma;
  rep.r_lower = 1.0 / (rep.gamma0 * rep.gamma0) - d * d;
  rep.applicable = p.gamma > rep.gamma_threshold;
  return rep;
}

VectorField magnetization_quasifree(const ModelParams& p,
                                    const GapSolution& gap,
                                    const VectorField& B) {
  p.validate();
  if (!p.dispersion)
    throw std::invalid_argument(
        "magnetization_quasifree: dispersion is required");
  const GridSpec& g = *B.g;
  VectorField M(B.g);
  std::vector<double> be = sample_symbol(*p.dispersion);
  const double g2r = p.gamma * p.gamma * gap.r_beta;
  for (double& e : be) {
    const double d = p.mu - e;
    e = p.beta * std::sqrt(d * d + g2r);
  }
  const double inv = 1.0 / static_cast<double>(be.size());
  std::map<double, double> memo;
  for (const CellNode& cn : g.cell_nodes) {
    const double bx = B.c[0][cn.idx], by = B.c[1][cn.idx],
                 bz = B.c[2][cn.idx];
    const double mag = std::sqrt(bx * bx + by * by + bz * bz);
    if (mag == 0.0) continue;
    const double h = p.eta * mag;
    auto [it, fresh] = memo.try_emplace(h, 0.0);
    if (fresh) {
      double acc = 0.0;
      const double a = p.beta * h;
      for (double b : be) acc += ratio_mag(a, b, 0.0);
      it->second = acc * inv;
    }
    const double f = p.eta * it->second / mag;
    M.c[0][cn.idx] = f * bx;
    M.c[1][cn.idx] = f * by;
    M.c[2][cn.idx] = f * bz;
  }
  return M;
}

ThermoObservables observables(const ModelParams& p, const GapSolution& gap,
                              const VectorField& B) {
  ThermoObservables obs;
  obs.pressure = gap.objective;
  obs.magnetization = p.dispersion ? magnetization_quasifree(p, gap, B)
                                   : magnetization_density(p, gap, B);
  obs.cooper_density = cooper_density_local(p, gap, B);
  obs.electron_density = electron_density(p, gap, B);
  obs.g_value = g_of_r(p, gap.r_beta);
  obs.critical_field = obs.g_value - p.lambda;
  return obs;
}

}  // namespace bcsmag
