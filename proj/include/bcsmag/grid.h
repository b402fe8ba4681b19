#ifndef BCSMAG_GRID_H
#define BCSMAG_GRID_H

// Uniform periodic grid on the torus [-L/2, L/2)^3 together with the
// geometry of the unit cell c = [-1/2, 1/2]^3 embedded in it. Node i along
// an axis sits at t_i = -L/2 + i*h with h = L/n, so the cell boundary never
// coincides with a node for the supported (even n, L >= 2) parameters.

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace bcsmag {

struct GridSpec;
using GridPtr = std::shared_ptr<const GridSpec>;

struct CellNode {
  std::size_t idx;  // flat row-major node index
  double w;         // fractional cell overlap weight in (0, 1]
};

struct GridSpec {
  int n;          // nodes per axis, even, >= 16
  double box;     // torus side L, >= 2
  double h;       // spacing L/n
  std::size_t nreal;   // n^3
  std::size_t ncplx;   // n*n*(n/2+1), r2c spectral size

  std::vector<double> coord;   // node coordinates, length n
  std::vector<double> freq;    // angular frequencies 2*pi*m~/L, length n
  std::vector<double> mask1d;  // per-axis indicator |t| < 1/2
  std::vector<double> wght1d;  // per-axis fractional overlap with [-1/2,1/2]

  std::vector<double> cell_mask;    // n^3 product of mask1d, values 0/1
  std::vector<double> cell_weight;  // n^3 product of wght1d
  std::vector<CellNode> cell_nodes; // nodes with positive weight

  // Validates and builds the tables. Throws std::invalid_argument.
  static GridPtr make(int n, double box);

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }
  std::size_t cindex(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * (n / 2 + 1) + k;
  }

  // Quadrature volume element h^3; cell_weight sums to exactly 1/h^3.
  double dvol() const { return h * h * h; }

  // Spectral sum multiplicity of r2c index k3 (conjugate pairs stored once).
  double mult(int k3) const { return (k3 == 0 || 2 * k3 == n) ? 1.0 : 2.0; }
};

// Three nodal component arrays over a shared grid.
struct VectorField {
  GridPtr g;
  std::array<std::vector<double>, 3> c;

  VectorField() = default;
  explicit VectorField(GridPtr grid)
      : g(std::move(grid)),
        c{std::vector<double>(g->nreal, 0.0), std::vector<double>(g->nreal, 0.0),
          std::vector<double>(g->nreal, 0.0)} {}

  void set_zero() {
    for (auto& v : c) std::fill(v.begin(), v.end(), 0.0);
  }
};

// Spectral (r2c) counterpart: interleaved re,im pairs per component.
struct SpectralField {
  GridPtr g;
  std::array<std::vector<double>, 3> c;  // each of length 2*ncplx

  SpectralField() = default;
  explicit SpectralField(GridPtr grid)
      : g(std::move(grid)),
        c{std::vector<double>(2 * g->ncplx, 0.0),
          std::vector<double>(2 * g->ncplx, 0.0),
          std::vector<double>(2 * g->ncplx, 0.0)} {}
};

}  // namespace bcsmag

#endif  // BCSMAG_GRID_H
