#ifndef BCSMAG_EXTFIELD_H
#define BCSMAG_EXTFIELD_H

// External current configurations and the inductions they generate.
// Currents are azimuthal bump-profile tubes around circular loops: exactly
// divergence-free in the continuum and compactly supported, so they can be
// placed disjoint from the unit cell.

#include <string>
#include <vector>

#include "bcsmag/fft.h"
#include "bcsmag/grid.h"

namespace bcsmag {

struct LoopSpec {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 3> axis{0.0, 0.0, 1.0};  // normalized internally
  double radius = 0.9;       // loop radius
  double tube_radius = 0.25; // minor radius of the current tube
  double current = 1.0;      // total current through the tube cross-section
};

struct ExternalField {
  VectorField j_ext;
  VectorField b_ext;          // biot_savart(j_ext)
  double div_residual = 0.0;  // ||div j||_2 / ||curl j||_2
  double cell_overlap = 0.0;  // ||j restricted to c||_2 / ||j||_2
};

// Nodal current density of one loop; normalized so the flux through the
// tube cross-section equals spec.current, then de-meaned exactly.
VectorField loop_current(GridPtr g, const LoopSpec& spec);

// Sum of loop currents plus its induction and support diagnostics.
// strict_support: throw when the current touches the unit cell.
ExternalField make_external_field(const Fft& fft,
                                  const std::vector<LoopSpec>& loops,
                                  bool strict_support = false);

// Same contract with the current read from a VFLD1 file.
ExternalField load_external_field(const Fft& fft, const std::string& path,
                                  bool strict_support = false);

}  // namespace bcsmag

#endif  // BCSMAG_EXTFIELD_H
