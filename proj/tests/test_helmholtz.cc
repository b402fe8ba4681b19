#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bcsmag/extfield.h"
#include "bcsmag/fft.h"
#include "bcsmag/field_ops.h"
#include "bcsmag/helmholtz.h"
#include "bcsmag/rng.h"
#include "testutil.h"

using namespace bcsmag;
using namespace bcsmag::testutil;

namespace {

VectorField gradient_field(const Fft& fft, const VectorField& seed) {
  // grad of a scalar built from the first component of the seed.
  const GridPtr& g = fft.grid();
  std::vector<double> phat(2 * g->ncplx);
  fft.forward(seed.c[0].data(), phat.data());
  SpectralField s(g);
  const int n = g->n, nh = g->n / 2 + 1;
  std::size_t q = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < nh; ++k, ++q) {
        const double ks[3] = {g->freq[i], g->freq[j], g->freq[k]};
        for (int a = 0; a < 3; ++a) {
          s.c[a][2 * q] = -ks[a] * phat[2 * q + 1];
          s.c[a][2 * q + 1] = ks[a] * phat[2 * q];
        }
      }
  return from_spectral(fft, s);
}

}  // namespace

TEST_CASE("projection identities on random band-limited fields") {
  auto g = GridSpec::make(32, 4.0);
  Fft fft(g);
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    VectorField f = random_band_limited(fft, rng, 8);
    remove_mean(f);
    const double scale = l2_norm(f);

    VectorField pl = project_longitudinal(fft, f);
    VectorField pt = project_transverse(fft, f);

    // Completeness P_par + P_perp = id on mean-free fields.
    VectorField sum(g);
    for (int a = 0; a < 3; ++a)
      for (std::size_t i = 0; i < g->nreal; ++i)
        sum.c[a][i] = pl.c[a][i] + pt.c[a][i];
    CHECK(l2_diff(sum, f) <= 1e-12 * scale);

    // Idempotence and mutual annihilation.
    CHECK(l2_diff(project_longitudinal(fft, pl), pl) <= 1e-12 * scale);
    CHECK(l2_diff(project_transverse(fft, pt), pt) <= 1e-12 * scale);
    CHECK(l2_norm(project_transverse(fft, pl)) <= 1e-12 * scale);
    CHECK(l2_norm(project_longitudinal(fft, pt)) <= 1e-12 * scale);

    // Orthogonality.
    CHECK(std::fabs(l2_inner(pl, pt)) <= 1e-12 * scale * scale);

    // Split components are curl-free / divergence-free.
    VectorField cpl = curl(fft, pl);
    CHECK(l2_norm(cpl) <= 1e-10 * (1.0 + scale));
    std::vector<double> dpt = divergence(fft, pt);
    double dnorm = 0.0;
    for (double v : dpt) dnorm += v * v;
    CHECK(std::sqrt(dnorm * g->dvol()) <= 1e-10 * (1.0 + scale));
  }
}

TEST_CASE("pure inputs: gradients project to zero, transverse to identity") {
  auto g = GridSpec::make(32, 4.0);
  Fft fft(g);
  Rng rng(32);
  VectorField seed = random_band_limited(fft, rng, 6);
  VectorField gr = gradient_field(fft, seed);
  const double scale = 1.0 + l2_norm(gr);
  CHECK(l2_norm(project_transverse(fft, gr)) <= 1e-12 * scale);
  CHECK(l2_norm(biot_savart(fft, gr)) <= 1e-12 * scale);

  VectorField tr = project_transverse(fft, random_band_limited(fft, rng, 6));
  CHECK(l2_diff(project_transverse(fft, tr), tr) <=
        1e-12 * (1.0 + l2_norm(tr)));
}

TEST_CASE("biot_savart operator identities") {
  auto g = GridSpec::make(32, 4.0);
  Fft fft(g);
  Rng rng(33);
  for (int trial = 0; trial < 5; ++trial) {
    VectorField j = random_band_limited(fft, rng, 8);
    remove_mean(j);
    const double scale = 1.0 + l2_norm(j);

    VectorField b = biot_savart(fft, j);

    // div S = 0.
    std::vector<double> db = divergence(fft, b);
    double dn = 0.0;
    for (double v : db) dn += v * v;
    CHECK(std::sqrt(dn * g->dvol()) <= 1e-10 * scale);

    // curl S = P_perp (generalized Maxwell equation).
    VectorField cb = curl(fft, b);
    VectorField jp = project_transverse(fft, j);
    CHECK(l2_diff(cb, jp) <= 1e-10 * scale);

    // S kills the longitudinal part: S(j) = S(j_perp).
    VectorField bp = biot_savart(fft, jp);
    CHECK(l2_diff(b, bp) <= 1e-12 * scale);

    // Right inverse: S(curl B) = B for divergence-free B.
    VectorField back = biot_savart(fft, cb);
    CHECK(l2_diff(back, b) <= 1e-10 * (1.0 + l2_norm(b)));

    // Isometry against the energy norm.
    const double lhs = l2_inner(b, b);
    const double rhs = energy_inner(fft, jp, jp);
    CHECK(std::fabs(lhs - rhs) <= 1e-10 * (1.0 + std::fabs(lhs)));
  }

  VectorField c(g);
  std::fill(c.c[1].begin(), c.c[1].end(), 1.0);
  CHECK_THROWS_AS(biot_savart(fft, c), std::invalid_argument);
}

TEST_CASE("biot_savart is self-adjoint in l2") {
  auto g = GridSpec::make(32, 4.0);
  Fft fft(g);
  Rng rng(34);
  VectorField u = random_band_limited(fft, rng, 8);
  VectorField v = random_band_limited(fft, rng, 8);
  remove_mean(u);
  remove_mean(v);
  const double a = l2_inner(biot_savart(fft, u), v);
  const double b = l2_inner(u, biot_savart(fft, v));
  CHECK(std::fabs(a - b) <= 1e-11 * (1.0 + std::fabs(a)));
}

TEST_CASE("vector potential: curl A = S, -Laplace A = j") {
  auto g = GridSpec::make(32, 4.0);
  Fft fft(g);
  Rng rng(35);
  VectorField j = random_band_limited(fft, rng, 8);
  remove_mean(j);
  const double scale = 1.0 + l2_norm(j);

  VectorField a = vector_potential(fft, j);
  VectorField ca = curl(fft, a);
  VectorField sj = biot_savart(fft, project_transverse(fft, j));
  CHECK(l2_diff(ca, sj) <= 1e-10 * scale);

  SpectralField sa = to_spectral(fft, a);
  apply_neg_laplace_hat(sa);
  VectorField lap = from_spectral(fft, sa);
  // -Laplace A reproduces j up to its removed mean (already zero here).
  CHECK(l2_diff(lap, j) <= 1e-10 * scale);
}

TEST_CASE("loop field: on-axis value 1/(2a) against classical oracles") {
  // Loop radius a = 8 h at 64^3.  The periodic field differs from the
  // free-space one by its removed box mean (2/3) m / V; the image-loop
  // dipole sum cancels by cubic symmetry (checked against 128^3, where
  // the measured offset matches 2m/3V to 4%).  The finite tube shifts
  // the center value by the section average of the ring formula.  Both
  // corrections are classical, so the corrected comparison is tight;
  // the raw comparison carries the documented systematics budget:
  // tube -1.1%, box mean -0.8%, sampling of a 3.2 h tube -1.6%.
  auto g = GridSpec::make(64, 4.0);
  Fft fft(g);
  LoopSpec spec;
  spec.center = {0.0, 0.0, 0.0};
  spec.axis = {0.0, 0.0, 1.0};
  spec.radius = 0.5;
  spec.tube_radius = 0.2;
  spec.current = 1.0;
  VectorField j = loop_current(g, spec);
  remove_mean(j);
  VectorField b = biot_savart(fft, j);

  const int c0 = g->n / 2;  // coord = 0
  CHECK(g->coord[c0] == doctest::Approx(0.0));
  const double bz = b.c[2][g->index(c0, c0, c0)];
  const double thin = 1.0 / (2.0 * spec.radius);

  // Bump-weighted section averages: the on-axis ring formula
  // a^2/(2(a^2+z^2)^{3/2}) and the squared radius (dipole moment).
  double num = 0.0, den = 0.0, rho2 = 0.0;
  const int nq = 400;
  for (int iu = 0; iu <= nq; ++iu)
    for (int iv = 0; iv <= nq; ++iv) {
      const double da = spec.tube_radius * (2.0 * iu / nq - 1.0);
      const double dz = spec.tube_radius * (2.0 * iv / nq - 1.0);
      const double s = std::sqrt(da * da + dz * dz) / spec.tube_radius;
      if (s >= 1.0) continue;
      const double w = std::exp(-1.0 / (1.0 - s * s));
      const double a = spec.radius + da;
      num += w * a * a / (2.0 * std::pow(a * a + dz * dz, 1.5));
      den += w;
      rho2 += w * a * a;
    }
  const double ring_avg = num / den;
  const double moment = M_PI * rho2 / den * spec.current;
  const double vol = g->box * g->box * g->box;
  const double mean_shift = 2.0 * moment / (3.0 * vol);
  INFO("spectral center Bz=" << bz << " thin-loop=" << thin
       << " ring-average=" << ring_avg << " box-mean shift=" << mean_shift);
  CHECK(std::fabs(bz + mean_shift - ring_avg) <= 0.02 * thin);
  CHECK(std::fabs(bz - thin) <= 0.045 * thin);
}

TEST_CASE("direct quadrature cross-validates the spectral field") {
  // Loop diameter 2a = box/4 keeps the free-space quadrature and the
  // periodic spectral field comparable without corrections; the tube
  // spans 4 h so sampling error stays small.  Points sit in the
  // high-field core around the loop center.
  auto g = GridSpec::make(64, 4.0);
  Fft fft(g);
  LoopSpec spec;
  spec.center = {0.0, 0.0, 0.0};
  spec.axis = {0.0, 0.0, 1.0};
  spec.radius = 0.5;
  spec.tube_radius = 0.25;
  spec.current = 1.0;
  VectorField j = loop_current(g, spec);
  remove_mean(j);

  VectorField zero(g);
  auto z = biot_savart_direct(fft, zero, {{0.1, 0.2, 0.3}});
  CHECK(z[0][0] == 0.0);
  CHECK(z[0][1] == 0.0);
  CHECK(z[0][2] == 0.0);

  VectorField b = biot_savart(fft, j);
  const int c0 = g->n / 2;
  std::vector<std::array<double, 3>> pts;
  std::vector<std::size_t> nidx;
  const int offs[10][3] = {{0, 0, 0}, {2, 0, 0},  {0, 2, 0}, {-2, 0, 0},
                           {0, -2, 0}, {1, 1, 0}, {0, 0, 2}, {0, 0, -2},
                           {0, 0, 4}, {2, 0, 2}};
  for (const auto& o : offs) {
    const int i = c0 + o[0], jn = c0 + o[1], k = c0 + o[2];
    pts.push_back({g->coord[i], g->coord[jn], g->coord[k]});
    nidx.push_back(g->index(i, jn, k));
  }
  auto direct = biot_savart_direct(fft, j, pts);
  const double thin = 1.0 / (2.0 * spec.radius);
  INFO("direct center Bz=" << direct[0][2] << " thin-loop=" << thin);
  CHECK(std::fabs(direct[0][2] - thin) <= 0.02 * thin);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const double sx = b.c[0][nidx[p]], sy = b.c[1][nidx[p]],
                 sz = b.c[2][nidx[p]];
    const double mag = std::sqrt(sx * sx + sy * sy + sz * sz);
    const double dx = direct[p][0] - sx, dy = direct[p][1] - sy,
                 dz2 = direct[p][2] - sz;
    const double diff = std::sqrt(dx * dx + dy * dy + dz2 * dz2);
    INFO("point " << p << " |spectral|=" << mag << " |diff|=" << diff);
    CHECK(diff <= 0.03 * mag);
  }
}

TEST_CASE("external field construction: support and divergence checks") {
  auto g = GridSpec::make(64, 4.0);
  Fft fft(g);
  LoopSpec spec;
  spec.center = {0.0, 0.0, 1.1};
  spec.axis = {0.0, 0.0, 1.0};
  spec.radius = 0.9;
  spec.tube_radius = 0.25;
  ExternalField ext = make_external_field(fft, {spec}, true);
  CHECK(ext.cell_overlap == 0.0);
  // Nodal sampling of the 4 h tube leaves a small solenoidality defect
  // in j_ext (reported, not fatal); measured 0.050 at this resolution.
  INFO("div residual " << ext.div_residual);
  CHECK(ext.div_residual < 0.08);

  // The induction is divergence-free by construction for any j_ext.
  LoopSpec offset;
  offset.center = {0.0, 0.0, 1.0};
  offset.axis = {0.0, 0.0, 1.0};
  offset.radius = 0.8;
  offset.tube_radius = 0.2;
  ExternalField ext2 = make_external_field(fft, {offset}, true);
  std::vector<double> db = divergence(fft, ext2.b_ext);
  double dn = 0.0;
  for (double v : db) dn += v * v;
  const double bn = l2_norm(ext2.b_ext);
  CHECK(std::sqrt(dn * g->dvol()) <= 1e-10 * (1.0 + bn));

  // A loop threaded through the cell trips strict mode; without strict
  // mode the overlap fraction is reported instead.
  LoopSpec bad;
  bad.center = {0.0, 0.0, 0.0};
  bad.axis = {0.0, 0.0, 1.0};
  bad.radius = 0.3;
  bad.tube_radius = 0.12;
  CHECK_THROWS_AS(make_external_field(fft, {bad}, true),
                  std::invalid_argument);
  ExternalField lax = make_external_field(fft, {bad}, false);
  CHECK(lax.cell_overlap > 0.0);

  // Zero current, zero field.
  ExternalField zero = make_external_field(fft, {}, true);
  CHECK(l2_norm(zero.b_ext) == 0.0);
}

TEST_CASE("helmholtz pair produces a near-uniform field over the cell") {
  // Coil radius 1.6 with separation equal to the radius; the box is
  // widened to 6 so the periodic coil images stay far from the cell.
  auto g = GridSpec::make(96, 6.0);
  Fft fft(g);
  LoopSpec top, bot;
  top.center = {0.0, 0.0, 0.8};
  bot.center = {0.0, 0.0, -0.8};
  top.axis = bot.axis = {0.0, 0.0, 1.0};
  top.radius = bot.radius = 1.6;
  top.tube_radius = bot.tube_radius = 0.25;
  top.current = bot.current = 1.0;
  ExternalField ext = make_external_field(fft, {top, bot}, true);
  CHECK(ext.cell_overlap == 0.0);

  double bmin = 1e300, bmax = 0.0;
  for (const CellNode& cn : g->cell_nodes) {
    const double bx = ext.b_ext.c[0][cn.idx], by = ext.b_ext.c[1][cn.idx],
                 bz = ext.b_ext.c[2][cn.idx];
    const double m = std::sqrt(bx * bx + by * by + bz * bz);
    bmin = std::min(bmin, m);
    bmax = std::max(bmax, m);
  }
  INFO("cell |B| range [" << bmin << ", " << bmax << "]");
  CHECK((bmax - bmin) / bmax <= 0.10);
  // Field points along the coil axis at the center.
  const std::size_t mid = g->index(g->n / 2, g->n / 2, g->n / 2);
  CHECK(ext.b_ext.c[2][mid] > 0.0);
  CHECK(std::fabs(ext.b_ext.c[0][mid]) < 0.02 * ext.b_ext.c[2][mid]);
}
