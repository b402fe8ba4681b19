#include "bcsmag/grid.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bcsmag {

GridPtr GridSpec::make(int n, double box) {
  if (n < 16 || n % 2 != 0)
    throw std::invalid_argument("grid: n must be even and >= 16, got " +
                                std::to_string(n));
  if (!(box >= 2.0) || !std::isfinite(box))
    throw std::invalid_argument("grid: box side must be >= 2, got " +
                                std::to_string(box));

  auto g = std::make_shared<GridSpec>();
  g->n = n;
  g->box = box;
  g->h = box / n;
  g->nreal = static_cast<std::size_t>(n) * n * n;
  g->ncplx = static_cast<std::size_t>(n) * n * (n / 2 + 1);

  g->coord.resize(n);
  g->freq.resize(n);
  g->mask1d.resize(n);
  g->wght1d.resize(n);
  const double h = g->h;
  const double two_pi = 2.0 * M_PI;
  for (int i = 0; i < n; ++i) {
    const double t = -box / 2.0 + i * h;
    g->coord[i] = t;
    const int mt = (2 * i < n) ? i : i - n;
    g->freq[i] = two_pi * mt / box;
    // Closed-cell indicator with a spacing-scaled tolerance: for
    // commensurate grids the faces of c land exactly on node planes, and
    // the screening currents need those planes inside the support.
    g->mask1d[i] = (std::fabs(t) <= 0.5 + 1e-9 * h) ? 1.0 : 0.0;
    // Fraction of the node interval [t-h/2, t+h/2] inside [-1/2, 1/2].
    const double lo = std::max(t - h / 2.0, -0.5);
    const double hi = std::min(t + h / 2.0, 0.5);
    g->wght1d[i] = std::clamp((hi - lo) / h, 0.0, 1.0);
  }

  g->cell_mask.resize(g->nreal);
  g->cell_weight.resize(g->nreal);
  std::size_t p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double mij = g->mask1d[i] * g->mask1d[j];
      const double wij = g->wght1d[i] * g->wght1d[j];
      for (int k = 0; k < n; ++k, ++p) {
        g->cell_mask[p] = mij * g->mask1d[k];
        const double w = wij * g->wght1d[k];
        g->cell_weight[p] = w;
        if (w > 0.0) g->cell_nodes.push_back({p, w});
      }
    }
  return g;
}

}  // namespace bcsmag
