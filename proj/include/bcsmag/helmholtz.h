#ifndef BCSMAG_HELMHOLTZ_H
#define BCSMAG_HELMHOLTZ_H

// Helmholtz projections, the Biot-Savart operator S and vector potential A.
// All operators are diagonal Fourier multipliers built from the same grid
// frequency table, so composition identities (curl S = P_perp, div S = 0,
// S curl = id on transverse fields) hold to transform round-off.

#include "bcsmag/fft.h"
#include "bcsmag/grid.h"

namespace bcsmag {

struct HelmholtzSplit {
  VectorField longitudinal;  // P_par f
  VectorField transverse;    // P_perp f
};

// In-place spectral forms. The k = 0 coefficient maps to zero in all of
// them (mean-free convention for 1/|k|^2 operators).
void apply_longitudinal_hat(SpectralField& s);
void apply_transverse_hat(SpectralField& s);
void apply_biot_savart_hat(SpectralField& s);   // i k x . / |k|^2
void apply_inv_laplace_hat(SpectralField& s);   // . / |k|^2
void apply_neg_laplace_hat(SpectralField& s);   // . * |k|^2

VectorField project_longitudinal(const Fft& fft, const VectorField& f);
VectorField project_transverse(const Fft& fft, const VectorField& f);
HelmholtzSplit helmholtz_split(const Fft& fft, const VectorField& f);

// S(j): divergence-free induction of the current j. Rejects inputs whose
// mean exceeds 1e-10 relative to the field scale.
VectorField biot_savart(const Fft& fft, const VectorField& j);

// A(j) = j^/|k|^2; curl A = S(j_perp) and -Laplace A = j (mean-free j).
VectorField vector_potential(const Fft& fft, const VectorField& j);

// Free-space midpoint quadrature of (1/4pi) int (curl j)(s)/|t-s| d^3s at
// the given points, excluding the singular self cell. Slow oracle for the
// spectral S on compactly supported currents.
std::vector<std::array<double, 3>> biot_savart_direct(
    const Fft& fft, const VectorField& j,
    const std::vector<std::array<double, 3>>& points);

}  // namespace bcsmag

#endif  // BCSMAG_HELMHOLTZ_H
