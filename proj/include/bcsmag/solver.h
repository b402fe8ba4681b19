#ifndef BCSMAG_SOLVER_H
#define BCSMAG_SOLVER_H

// Variational Meissner solver on the unit cell. Feasible inductions are
// B = S(j) with the current j masked to the cell c; the pure screening
// problem A minimizes (1/2)||B + B_ext||_2^2, its dual J is the same
// quadratic in the magnetic energy norm, and the full problem ascends
// G(B) = -(1/2)||B + B_ext||_2^2 + p_inf(T_eps(B + B_ext)).
//
// The continuum minimizer of A is a surface current on the cell boundary;
// on a grid it appears as a shell of width set by the resolution. Such a
// shell cannot be spectrally divergence-free to round-off, so the current
// type records its transversality defect instead of hiding it.

#include <iosfwd>
#include <string>
#include <vector>

#include "bcsmag/fft.h"
#include "bcsmag/grid.h"
#include "bcsmag/thermo.h"

namespace bcsmag {

struct CurrentDensity {
  VectorField j;
  double support_violation = 0.0;  // ||j outside c||_2 / ||j||_2
  double div_residual = 0.0;       // ||div j||_2 / ||curl j||_2
  double div_tol = 1e-8;           // threshold this instance was checked against
};

// Measures the support and divergence ratios of j. Throws
// std::invalid_argument when the support ratio exceeds 1e-10, or when
// enforce_div is set and the divergence ratio exceeds div_tol.
CurrentDensity analyze_current(const Fft& fft, VectorField j,
                               double div_tol = 1e-8, bool enforce_div = true);

struct SolveOptions {
  // Relative induction-space error target for the inner solver. The
  // masked normal operator carries a continuum of near-null boundary
  // modes, so its normal residual stalls; what converges is the energy
  // norm ||S(j) - S(j*)||_2, tracked by a window estimate of the CG
  // quadrature gap against the driving field norm. The estimate is a
  // lower bound: the slow boundary-mode tail can exceed it, so the stop
  // is a stagnation test at the target level.
  double cg_tol = 1e-6;
  int cg_max_iter = 10000;
  double ascent_tol = 1e-5;     // stationarity target, scaled by ||B_ext||_2;
                                // meaningful only at or above cg_tol
  int max_outer = 200;
  double damping = 0.5;         // initial line-search step per outer iteration
  int max_backtracks = 30;
  int multistart = 2;           // 1: from the A minimizer; 2: also from zero
  std::ostream* log = nullptr;  // JSON-lines sink: iter, objective, el_residual, step
};

struct StartSummary {
  std::string name;
  double objective = 0.0;
  double el_residual = 0.0;
  bool converged = false;
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> objective_trace;  // one entry per accepted step
  double el_residual = 0.0;    // ||(B0 - B_int) - P_perp M||_2 over c;
                               // for the quadratic solves, the relative
                               // normal-equation residual
  double grad_residual = 0.0;  // ||S(ascent direction)||_2, the discrete
                               // stationarity measure; for the quadratic
                               // solves, the estimated induction error
  double suppression = 0.0;    // interior ||B + B_ext||_2 / ||B_ext||_2
  double surface_fraction = 0.0;  // share of ||j||_1 in the boundary shell
  double step_final = 0.0;
  bool converged = false;
  std::string diagnosis;  // "", "stall", "oscillation", "max-iterations"
  std::vector<StartSummary> starts;
};

// Least-squares membership in the feasible set: minimizes
// ||S(j) - X||_2 over currents masked to the cell, by preconditioned
// conjugate gradient on the normal equations. Requires mean-free X.
struct Projection {
  VectorField b;  // S(j)
  CurrentDensity j;
  int iterations = 0;
  double residual = 0.0;  // estimated ||S(j) - X||_2 error / ||X||_2
  bool converged = false;
};
Projection project_onto_B(const Fft& fft, const VectorField& x,
                          const SolveOptions& opts = {});

// Screening problem: min (1/2)||B + B_ext||_2^2 over feasible B.
struct ScreenSolution {
  VectorField b_int;
  CurrentDensity j_int;
  double objective = 0.0;
  SolveReport report;
};
ScreenSolution solve_A(const Fft& fft, const VectorField& b_ext,
                       const SolveOptions& opts = {});

// Current-space form: min (1/2)||j + j_ext||_h^2 over transverse currents
// in the cell, evaluated through the energy inner product on the
// transverse part. Same quadratic as solve_A under the isometry.
struct CurrentSolution {
  CurrentDensity j_perp;  // masked minimizer; S sees its transverse part
  VectorField b;          // S(j_perp)
  double objective = 0.0;
  SolveReport report;
};
CurrentSolution solve_J(const Fft& fft, const VectorField& j_ext,
                        const SolveOptions& opts = {});

// G = -(1/2)||B + B_ext||_2^2 + p_inf(T_eps(B + B_ext)). eps = 0 uses the
// plain cell restriction; eps > 0 requires eps >= 2 h.
double objective_G(const Fft& fft, const ModelParams& p, const VectorField& b,
                   const VectorField& b_ext, double eps,
                   double support_radius = 1.0);

// Projected gradient ascent on G over feasible B: the ascent direction is
// the least-squares projection of -(B + B_ext) + conv(xi_eps, M) onto the
// feasible set, with the gap re-solved at every outer iterate and a
// backtracking line search. Multi-start per SolveOptions; the best
// converged start wins and every start is summarized in the report.
struct FullSolution {
  VectorField b0;
  CurrentDensity j0;
  GapSolution gap;
  double objective = 0.0;
  VectorField b_int;  // screening minimizer, solved once and reused
  double eps = 0.0;
  double support_radius = 1.0;
  SolveReport report;
};
FullSolution solve_full(const Fft& fft, const ModelParams& p,
                        const VectorField& b_ext, double eps,
                        double support_radius = 1.0,
                        const SolveOptions& opts = {});

// Meissner diagnostics of a solved configuration: interior suppression
// outside an eps R_xi + 3 cell boundary shell, surface concentration of
// the screening current, the interior Cooper pair average against the
// zero-field gap, and the critical-field margin.
struct VerificationReport {
  double suppression = 0.0;
  double surface_fraction = 0.0;
  double r_beta = 0.0;            // gap at the solved field
  double cooper_interior = 0.0;   // interior average of the local density
  double r_beta_zero = 0.0;       // gap at zero field
  double h_c = 0.0;
  double hc_margin = 0.0;         // h_c - sup_t h_t over the cell
  bool normal_phase = false;
  bool converged = false;
};
VerificationReport verify_meissner(const Fft& fft, const ModelParams& p,
                                   const VectorField& b0,
                                   const CurrentDensity& j0,
                                   const VectorField& b_ext, double eps,
                                   double support_radius, bool converged);
void write_verification_csv(std::ostream& os, const VerificationReport& rep);

// Self-consistency constant z = min_h { beta cosh(beta h) e^{beta lambda}
// / cosh(beta g_r) + eta / h } with r solved on the mollified-restricted
// deviation field. When z < 1/eta the deviation obeys
// ||B_eps - B_int||_2 <= |c \ c_eps|^{1/2} / (1/eta - z).
struct ContractionBound {
  double z = 0.0;
  double h_opt = 0.0;
  double r = 0.0;
  bool applicable = false;
  double bound = 0.0;
};
ContractionBound lemma_contraction(const Fft& fft, const ModelParams& p,
                                   const VectorField& deviation, double eps,
                                   double support_radius = 1.0);

// |c \ c_eps| with c_eps the cell shrunk by eps R_xi from every face.
double cell_complement_volume(double eps, double support_radius);

// One solve_full per eps (decreasing list); deviations from the screening
// minimizer with the high-temperature bound when beta < 1/eta, the log-log
// slope of deviation against eps, and a monotonicity flag.
struct SweepRow {
  double eps = 0.0;
  double deviation = 0.0;        // ||B_eps - B_int||_2
  double bound = 0.0;            // |c \ c_eps|^{1/2} / (1/eta - beta), or 0
  double complement_sqrt = 0.0;  // |c \ c_eps|^{1/2}
  double objective = 0.0;
  bool converged = false;
};
struct SweepResult {
  std::vector<SweepRow> rows;
  double slope = 0.0;
  bool monotone = false;
};
SweepResult epsilon_sweep(const Fft& fft, const ModelParams& p,
                          const VectorField& b_ext,
                          const std::vector<double>& eps_list,
                          double support_radius = 1.0,
                          const SolveOptions& opts = {});

// Interior indicator: cell nodes deeper than margin from the cell faces.
std::vector<unsigned char> interior_region(const GridSpec& g, double margin);
double interior_suppression(const VectorField& b_tot,
                            const VectorField& b_ext, double margin);
// Share of the l1 mass of j on nodes within shell_cells spacings of the
// cell boundary.
double surface_fraction_l1(const VectorField& j, int shell_cells = 3);

}  // namespace bcsmag

#endif  // BCSMAG_SOLVER_H
