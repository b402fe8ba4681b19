#ifndef BCSMAG_FIELD_OPS_H
#define BCSMAG_FIELD_OPS_H

// Inner products, differential operators, the mollify-restrict operator,
// and VFLD1 field serialization.

#include <string>
#include <vector>

#include "bcsmag/fft.h"
#include "bcsmag/grid.h"

namespace bcsmag {

// Riemann-sum inner product h^3 * sum f.g. Throws on grid mismatch.
double l2_inner(const VectorField& f, const VectorField& g);
double l2_norm_sq(const VectorField& f);
double l2_norm(const VectorField& f);

// Same inner product evaluated from r2c coefficients (Parseval form,
// conjugate pairs counted via the k3 multiplicity).
double spectral_inner(const SpectralField& a, const SpectralField& b);

// Energy inner product sum_{k!=0} conj(j1^)(k).j2^(k)/|k|^2 in the same
// Parseval normalization: the magnetic 1/(4pi|t-s|) kernel in Fourier form.
// Throws if either field has a mean component beyond 1e-10.
double energy_inner_hat(const SpectralField& a, const SpectralField& b);
double energy_inner(const Fft& fft, const VectorField& j1,
                    const VectorField& j2);

std::array<double, 3> field_mean(const VectorField& f);
void remove_mean(VectorField& f);

// Spectral curl / divergence; exact on band-limited fields.
SpectralField curl_hat(const SpectralField& s);
VectorField curl(const Fft& fft, const VectorField& f);
std::vector<double> divergence(const Fft& fft, const VectorField& f);

// Quadrature over the unit cell with fractional boundary weights.
double cell_integral(const GridSpec& g, const std::vector<double>& s);

// Pointwise multiply each component by the cell indicator.
void apply_cell_mask(VectorField& f);

// Mollifier xi_eps = eps^-3 xi(./eps) with the standard radial bump
// xi(x) proportional to exp(-1/(1-|x/R|^2)) for |x| < R, unit integral.
// Its Fourier transform Psi(eps*R*|k|) is precomputed on this grid as a
// real multiplier with Psi(0) = 1 and |Psi| <= 1, so convolution is an
// exact L^2 contraction.
class Mollifier {
 public:
  // Requires eps >= 2*spacing. Throws std::invalid_argument otherwise.
  Mollifier(GridPtr g, double epsilon, double support_radius);

  double epsilon() const { return eps_; }
  double support_radius() const { return radius_; }
  // Largest admissible eps in Meissner solves: 1/(2 R_xi).
  double epsilon_xi() const { return 0.5 / radius_; }

  // Convolution xi_eps * B alone.
  VectorField convolve(const Fft& fft, const VectorField& b) const;
  // The operator T_eps: cell mask applied after convolution.
  VectorField restrict_mollify(const Fft& fft, const VectorField& b) const;

  const std::vector<double>& multiplier() const { return mult_; }

 private:
  GridPtr g_;
  double eps_;
  double radius_;
  std::vector<double> mult_;  // ncplx entries
};

// VFLD1 dump: header "VFLD1 <nx> <ny> <nz> <box_side>\n" then three
// component blocks of little-endian f64, row-major, last axis fastest.
// Writing goes through a temp file renamed into place. Readers reject
// payload length mismatches.
void write_vfld1(const std::string& path, const VectorField& f);
VectorField read_vfld1(const std::string& path);

}  // namespace bcsmag

#endif  // BCSMAG_FIELD_OPS_H
