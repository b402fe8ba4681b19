#ifndef BCSMAG_THERMO_H
#define BCSMAG_THERMO_H

#include <functional>
#include <optional>
#include <vector>

#include "bcsmag/grid.h"

namespace bcsmag {

// Hopping symbol e(k), sampled on a uniform nk^3 tensor grid over
// [-pi,pi)^3 with nodes k_j = -pi + 2 pi j / nk.  Must be even in k.
struct Dispersion {
  std::function<double(double, double, double)> symbol;
  int nk = 64;
};

struct ModelParams {
  double beta = 10.0;   // inverse temperature, > 0
  double mu = -1.0;     // chemical potential
  double lambda = 0.0;  // on-site (Hubbard) coupling
  double gamma = 10.0;  // BCS coupling, > 0
  double eta = 0.5;     // magnetic coupling, > 0
  std::optional<Dispersion> dispersion;  // requires lambda = 0

  void validate() const;  // throws std::invalid_argument
};

struct GapSolution {
  double r_beta = 0.0;      // order parameter, global maximizer of F
  double objective = 0.0;   // F(r_beta, B) = pressure
  double residual = 0.0;    // gap-equation defect (0 when r_beta = 0)
  double r_upper = 0.0;     // a-priori bound on r_beta
  bool superconducting = false;  // r_beta > 1e-10
  bool multimodal = false;  // scan found two near-equal local maxima
};

// Scalar observable: nodal values over the full grid (zero outside the
// unit cell) plus the average over the requested region.
struct DensityField {
  GridPtr g;
  std::vector<double> v;
  double region_average = 0.0;
};

struct CriterionReport {
  bool applicable = false;     // gamma above the threshold
  double gamma0 = 0.0;         // 4 / (1 - R eta / |mu|)
  double gamma_threshold = 0.0;  // |mu - lambda| gamma0
  double r_lower = 0.0;        // gamma0^{-2} - (mu-lambda)^2/gamma^2
};

struct ThermoObservables {
  double pressure = 0.0;
  VectorField magnetization;
  DensityField cooper_density;
  DensityField electron_density;
  double critical_field = 0.0;  // h_c = g - lambda
  double g_value = 0.0;         // g at r_beta
};

// g_r = sqrt((mu-lambda)^2 + gamma^2 r).
double g_of_r(const ModelParams& p, double r);

// h_t = eta |B(t)| at the unit-cell nodes, in cell_nodes order.
std::vector<double> field_strength(const ModelParams& p,
                                   const VectorField& B);

// F(r, B) = mu + ln2/beta - gamma r
//           + (1/beta) Int_cell ln{cosh(beta h_t) + e^{-lambda beta} cosh(beta g_r)}.
// h_cell holds h_t at the cell nodes of g (see field_strength).
double free_energy_functional(const ModelParams& p, double r,
                              const std::vector<double>& h_cell,
                              const GridSpec& g);
double free_energy_functional(const ModelParams& p, double r,
                              const VectorField& B);

// Global maximizer of r -> F(r, B) over [0, r_upper]: coarse scan at
// step r_upper/1000, golden-section refinement, then bisection on the
// stationarity condition until the gap-equation residual is at
// machine level.  With a dispersion present the functional is replaced
// by its quasi-free counterpart built from the Bogoliubov energies
// E_k = sqrt((mu - e(k))^2 + gamma^2 r); the solve then costs
// O(scan x distinct h values x nk^3).
GapSolution solve_gap(const ModelParams& p, const VectorField& B);

// M_t = 1[cell] eta sinh(beta h_t)/(cosh(beta h_t)+e^{-beta lambda} cosh(beta g)) B/|B|.
VectorField magnetization_density(const ModelParams& p,
                                  const GapSolution& gap,
                                  const VectorField& B);

// r_{beta,t} = gamma r sinh(beta g) / (2 g (e^{beta lambda} cosh(beta h_t) + cosh(beta g))).
// region, when given, is a full-grid byte mask; the average runs over
// region intersected with the cell, volume-normalized.
DensityField cooper_density_local(const ModelParams& p,
                                  const GapSolution& gap,
                                  const VectorField& B,
                                  const std::vector<unsigned char>* region
                                  = nullptr);

// d_t = 1 + (mu-lambda) sinh(beta g)/(g (e^{beta lambda} cosh(beta h_t) + cosh(beta g))).
DensityField electron_density(const ModelParams& p, const GapSolution& gap,
                              const VectorField& B,
                              const std::vector<unsigned char>* region
                              = nullptr);

// p_inf(B) = F(r_beta, B).
double pressure(const ModelParams& p, const VectorField& B);

// Lower bound for r_beta over the ball b_R(0); requires mu < -R eta.
CriterionReport superconducting_criterion(const ModelParams& p,
                                          double ball_radius);

// Quasi-free magnetization: the scalar prefactor is the momentum
// average of sinh(beta h_t)/(cosh(beta h_t)+cosh(beta E_k)).
VectorField magnetization_quasifree(const ModelParams& p,
                                    const GapSolution& gap,
                                    const VectorField& B);

ThermoObservables observables(const ModelParams& p, const GapSolution& gap,
                              const VectorField& B);

}  // namespace bcsmag

#endif  // BCSMAG_THERMO_H
