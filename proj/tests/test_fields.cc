#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "bcsmag/extfield.h"
#include "bcsmag/fft.h"
#include "bcsmag/field_ops.h"
#include "bcsmag/grid.h"
#include "bcsmag/rng.h"
#include "testutil.h"

using namespace bcsmag;
using namespace bcsmag::testutil;

TEST_CASE("grid construction validates its invariants") {
  CHECK_THROWS_AS(GridSpec::make(15, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::make(14, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::make(32, 1.5), std::invalid_argument);
  auto g = GridSpec::make(32, 4.0);
  CHECK(g->h == doctest::Approx(0.125));
  CHECK(g->coord[0] == doctest::Approx(-2.0));
  CHECK(g->nreal == 32768u);
}

TEST_CASE("cell mask is the closed-cell indicator") {
  auto g = GridSpec::make(32, 4.0);
  const double tol = 0.5 + 1e-9 * g->h;
  std::size_t count = 0, on_face = 0;
  for (int i = 0; i < g->n; ++i)
    for (int j = 0; j < g->n; ++j)
      for (int k = 0; k < g->n; ++k) {
        const bool in = std::fabs(g->coord[i]) <= tol &&
                        std::fabs(g->coord[j]) <= tol &&
                        std::fabs(g->coord[k]) <= tol;
        CHECK(g->cell_mask[g->index(i, j, k)] == (in ? 1.0 : 0.0));
        if (in) ++count;
      }
  // 32 nodes per axis on box 4 put the faces of c exactly on node planes;
  // the closed cell keeps them, so the count is (1/h + 1)^3.
  for (int i = 0; i < g->n; ++i)
    if (std::fabs(std::fabs(g->coord[i]) - 0.5) < 1e-12) ++on_face;
  CHECK(on_face == 2);
  CHECK(count == 9u * 9u * 9u);
}

TEST_CASE("cell weights integrate the unit cell exactly") {
  for (int n : {16, 32, 48}) {
    for (double box : {4.0, 2.4, 3.0}) {
      auto g = GridSpec::make(n, box);
      double s = 0.0;
      for (const CellNode& cn : g->cell_nodes) s += cn.w;
      CHECK(std::fabs(s * g->dvol() - 1.0) < 1e-12);
    }
  }
  // cell_integral of the constant 1 is the cell volume.
  auto g = GridSpec::make(32, 4.0);
  std::vector<double> one(g->nreal, 1.0);
  CHECK(cell_integral(*g, one) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("transform round trip and spectral locations") {
  auto g = GridSpec::make(32, 4.0);
  Fft fft(g);

  // Constant field: all spectral mass at k = 0.
  VectorField cf(g);
  std::fill(cf.c[0].begin(), cf.c[0].end(), 1.0);
  SpectralField s = to_spectral(fft, cf);
  CHECK(s.c[0][0] == doctest::Approx(static_cast<double>(g->nreal)));
  double off = 0.0;
  for (std::size_t q = 1; q < g->ncplx; ++q)
    off = std::max(off, std::fabs(s.c[0][2 * q]) + std::fabs(s.c[0][2 * q + 1]));
  CHECK(off < 1e-9);

  // Plane wave cos(2 pi t1 / L) e2: two conjugate coefficients, one stored
  // pair at (1,0,0) and (n-1,0,0) in the k3 = 0 plane.
  VectorField pw(g);
  for (int i = 0; i < g->n; ++i)
    for (int j = 0; j < g->n; ++j)
      for (int k = 0; k < g->n; ++k)
        pw.c[1][g->index(i, j, k)] =
            std::cos(2.0 * M_PI * g->coord[i] / g->box);
  SpectralField sp = to_spectral(fft, pw);
  // The index-space DFT sees the node origin at t = -L/2, so odd modes
  // pick up a factor (-1)^m: the m = +-1 coefficients are -n^3/2.
  const double half = static_cast<double>(g->nreal) / 2.0;
  CHECK(sp.c[1][2 * g->cindex(1, 0, 0)] ==
        doctest::Approx(-half).epsilon(1e-10));
  CHECK(sp.c[1][2 * g->cindex(g->n - 1, 0, 0)] ==
        doctest::Approx(-half).epsilon(1e-10));
  double others = 0.0;
  for (std::size_t q = 0; q < g->ncplx; ++q) {
    if (q == g->cindex(1, 0, 0) || q == g->cindex(g->n - 1, 0, 0)) continue;
    others = std::max(others, std::fabs(sp.c[1][2 * q]) +
                                  std::fabs(sp.c[1][2 * q + 1]));
  }
  CHECK(others < 1e-8);

  // Random field round trip.
  Rng rng(21);
  VectorField f(g);
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < g->nreal; ++i) f.c[a][i] = rng.uniform(-1, 1);
  VectorField back = from_spectral(fft, to_spectral(fft, f));
  CHECK(linf_diff(f, back) < 1e-12 * (1.0 + linf(f)));

  // Non-finite input rejected.
  VectorField bad(g);
  bad.c[2][7] = std::nan("");
  CHECK_THROWS_AS(to_spectral(fft, bad), std::invalid_argument);
}

TEST_CASE("l2 inner product: constant volume, orthogonality, Parseval") {
  auto g = GridSpec::make(32, 4.0);
  Fft fft(g);

  VectorField e1(g);
  std::fill(e1.c[0].begin(), e1.c[0].end(), 1.0);
  CHECK(l2_inner(e1, e1) == doctest::Approx(64.0).epsilon(1e-13));

  VectorField a(g), b(g);
  for (int i = 0; i < g->n; ++i)
    for (int j = 0; j < g->n; ++j)
      for (int k = 0; k < g->n; ++k) {
        a.c[0][g->index(i, j, k)] =
            std::cos(2.0 * M_PI * g->coord[i] / g->box);
        b.c[0][g->index(i, j, k)] =
            std::sin(4.0 * M_PI * g->coord[j] / g->box);
      }
  CHECK(std::fabs(l2_inner(a, b)) < 1e-12);

  Rng rng(22);
  VectorField f = random_band_limited(fft, rng, 10);
  const double nodal = l2_inner(f, f);
  const double spec = spectral_inner(to_spectral(fft, f), to_spectral(fft, f));
  CHECK(std::fabs(nodal - spec) <= 1e-12 * (1.0 + std::fabs(nodal)));

  auto g2 = GridSpec::make(16, 4.0);
  VectorField other(g2);
  CHECK_THROWS_AS(l2_inner(e1, other), std::invalid_argument);
}

TEST_CASE("energy inner product: single mode value and mean guard") {
  auto g = GridSpec::make(32, 4.0);
  Fft fft(g);
  const double L = g->box;

  VectorField f(g);
  for (int i = 0; i < g->n; ++i)
    for (int j = 0; j < g->n; ++j)
      for (int k = 0; k < g->n; ++k)
        f.c[1][g->index(i, j, k)] =
            std::cos(2.0 * M_PI * g->coord[i] / L);
  const double k0 = 2.0 * M_PI / L;
  const double expect = (L * L * L / 2.0) / (k0 * k0);
  CHECK(energy_inner(fft, f, f) == doctest::Approx(expect).epsilon(1e-12));

  // Positivity on random mean-free fields.
  Rng rng(23);
  VectorField r = random_band_limited(fft, rng, 8);
  remove_mean(r);
  CHECK(energy_inner(fft, r, r) >= 0.0);

  VectorField c(g);
  std::fill(c.c[0].begin(), c.c[0].end(), 0.5);
  CHECK_THROWS_AS(energy_inner(fft, c, c), std::invalid_argument);
}

TEST_CASE("energy inner product matches the direct 1/(4pi|t-s|) oracle") {
  // Compact loop current inside the cell; double midpoint quadrature of
  // the Coulomb kernel with self-pair exclusion vs the spectral value.
  auto g = GridSpec::make(64, 4.0);
  Fft fft(g);
  LoopSpec spec;
  spec.center = {0.0, 0.0, 0.0};
  spec.axis = {0.0, 0.0, 1.0};
  spec.radius = 0.55;
  spec.tube_radius = 0.22;
  spec.current = 1.0;
  VectorField j = loop_current(g, spec);
  remove_mean(j);
  const double spectral = energy_inner(fft, j, j);

  struct Node {
    double t[3];
    double v[3];
  };
  std::vector<Node> nodes;
  for (int i = 0; i < g->n; ++i)
    for (int jj = 0; jj < g->n; ++jj)
      for (int k = 0; k < g->n; ++k) {
        const std::size_t idx = g->index(i, jj, k);
        const double v0 = j.c[0][idx], v1 = j.c[1][idx], v2 = j.c[2][idx];
        if (v0 == 0.0 && v1 == 0.0 && v2 == 0.0) continue;
        nodes.push_back({{g->coord[i], g->coord[jj], g->coord[k]},
                         {v0, v1, v2}});
      }
  double direct = 0.0;
  double self = 0.0;
  for (std::size_t p = 0; p < nodes.size(); ++p) {
    self += nodes[p].v[0] * nodes[p].v[0] + nodes[p].v[1] * nodes[p].v[1] +
            nodes[p].v[2] * nodes[p].v[2];
    for (std::size_t q = p + 1; q < nodes.size(); ++q) {
      const double d0 = nodes[p].t[0] - nodes[q].t[0];
      const double d1 = nodes[p].t[1] - nodes[q].t[1];
      const double d2 = nodes[p].t[2] - nodes[q].t[2];
      const double dist = std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
      const double dot = nodes[p].v[0] * nodes[q].v[0] +
                         nodes[p].v[1] * nodes[q].v[1] +
                         nodes[p].v[2] * nodes[q].v[2];
      direct += dot / dist;
    }
  }
  const double dv = g->dvol();
  // Diagonal blocks: int int over one cube pair of 1/|t-s| equals
  // 1.88231... * h^5 (Coulomb integral of the unit cube with itself).
  const double kCubeSelf = 1.8823126443897;
  direct = 2.0 * direct * dv * dv / (4.0 * M_PI) +
           self * kCubeSelf * std::pow(g->h, 5) / (4.0 * M_PI);
  const double rel = std::fabs(direct - spectral) / spectral;
  INFO("spectral=" << spectral << " direct=" << direct << " rel=" << rel);
  CHECK(rel < 0.01);
}

TEST_CASE("curl and divergence identities") {
  auto g = GridSpec::make(32, 4.0);
  Fft fft(g);
  const double L = g->box;

  // curl(sin(2 pi t2 / L) e1) = -(2 pi / L) cos(2 pi t2 / L) e3.
  VectorField f(g);
  for (int i = 0; i < g->n; ++i)
    for (int j = 0; j < g->n; ++j)
      for (int k = 0; k < g->n; ++k)
        f.c[0][g->index(i, j, k)] =
            std::sin(2.0 * M_PI * g->coord[j] / L);
  VectorField cf = curl(fft, f);
  double err = 0.0;
  for (int i = 0; i < g->n; ++i)
    for (int j = 0; j < g->n; ++j)
      for (int k = 0; k < g->n; ++k) {
        const std::size_t idx = g->index(i, j, k);
        const double want =
            -(2.0 * M_PI / L) * std::cos(2.0 * M_PI * g->coord[j] / L);
        err = std::max(err, std::fabs(cf.c[2][idx] - want));
        err = std::max(err, std::fabs(cf.c[0][idx]));
        err = std::max(err, std::fabs(cf.c[1][idx]));
      }
  CHECK(err < 1e-12);

  // div curl = 0 on a random smooth field.
  Rng rng(24);
  VectorField r = random_band_limited(fft, rng, 8);
  VectorField cr = curl(fft, r);
  std::vector<double> dcr = divergence(fft, cr);
  double dmax = 0.0;
  for (double v : dcr) dmax = std::max(dmax, std::fabs(v));
  CHECK(dmax < 1e-10);
}

TEST_CASE("mollifier: validation, contraction, unit mass, locality") {
  auto g = GridSpec::make(32, 4.0);
  Fft fft(g);
  CHECK_THROWS_AS(Mollifier(g, 0.1, 0.1), std::invalid_argument);  // < 2h
  CHECK_THROWS_AS(Mollifier(g, -1.0, 0.1), std::invalid_argument);

  Mollifier m(g, 0.3, 1.0);
  CHECK(m.epsilon_xi() == doctest::Approx(0.5));
  // Multiplier is 1 at k = 0 (unit mass) and bounded by 1 everywhere.
  CHECK(m.multiplier()[0] == doctest::Approx(1.0).epsilon(1e-14));
  double mx = 0.0;
  for (double v : m.multiplier()) mx = std::max(mx, std::fabs(v));
  CHECK(mx <= 1.0 + 1e-14);

  // Contraction in L2.
  Rng rng(25);
  VectorField f = random_band_limited(fft, rng, 10);
  VectorField tf = m.restrict_mollify(fft, f);
  CHECK(l2_norm(tf) <= l2_norm(f) + 1e-12);

  // Constant field inside a ball containing c: T_eps B equals B inside
  // the shrunken cell, deviation confined to the eps*R boundary shell.
  VectorField cone(g);
  for (int i = 0; i < g->n; ++i)
    for (int j = 0; j < g->n; ++j)
      for (int k = 0; k < g->n; ++k) {
        const double x = g->coord[i], y = g->coord[j], z = g->coord[k];
        const double rr = std::sqrt(x * x + y * y + z * z);
        cone.c[2][g->index(i, j, k)] = rr < 1.6 ? 1.0 : 0.0;
      }
  Mollifier msm(g, 0.25, 1.0);
  VectorField t = msm.restrict_mollify(fft, cone);
  const double shell = 0.25 * 1.0;  // eps * R
  double inner_err = 0.0;
  for (int i = 0; i < g->n; ++i)
    for (int j = 0; j < g->n; ++j)
      for (int k = 0; k < g->n; ++k) {
        const double x = g->coord[i], y = g->coord[j], z = g->coord[k];
        const std::size_t idx = g->index(i, j, k);
        const double m8 =
            std::max({std::fabs(x), std::fabs(y), std::fabs(z)});
        if (m8 < 0.5 - shell - g->h)
          inner_err = std::max(inner_err, std::fabs(t.c[2][idx] - 1.0));
        if (m8 > 0.5 + 1e-9 * g->h)
          CHECK(t.c[2][idx] == 0.0);
      }
  INFO("interior deviation " << inner_err);
  CHECK(inner_err < 5e-3);
}

TEST_CASE("mollify-restrict converges to plain restriction as eps -> 0") {
  auto g = GridSpec::make(48, 4.0);
  Fft fft(g);
  Rng rng(26);
  VectorField f = random_band_limited(fft, rng, 5);
  VectorField masked = f;
  apply_cell_mask(masked);
  double prev = 1e300;
  for (double eps : {0.8, 0.4, 0.2}) {
    Mollifier m(g, eps, 0.5);
    VectorField t = m.restrict_mollify(fft, f);
    const double dev = l2_diff(t, masked);
    INFO("eps=" << eps << " dev=" << dev);
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("vfld1 round trip and corruption rejection") {
  auto g = GridSpec::make(16, 4.0);
  Fft fft(g);
  Rng rng(27);
  VectorField f = random_band_limited(fft, rng, 5);
  const std::string path = "vfld_test_roundtrip.bin";
  write_vfld1(path, f);
  VectorField back = read_vfld1(path);
  CHECK(back.g->n == 16);
  CHECK(back.g->box == 4.0);
  CHECK(linf_diff(f, back) == 0.0);

  // Truncate the payload: reader must reject with a length message.
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  REQUIRE(fp);
  std::fseek(fp, 0, SEEK_END);
  const long len = std::ftell(fp);
  std::fseek(fp, 0, SEEK_SET);
  std::vector<unsigned char> all(len);
  REQUIRE(std::fread(all.data(), 1, all.size(), fp) == all.size());
  std::fclose(fp);
  const std::string cut = "vfld_test_truncated.bin";
  fp = std::fopen(cut.c_str(), "wb");
  REQUIRE(fp);
  std::fwrite(all.data(), 1, all.size() - 100, fp);
  std::fclose(fp);
  CHECK_THROWS_WITH_AS(read_vfld1(cut),
                       doctest::Contains("payload length mismatch"),
                       std::runtime_error);

  // Trailing garbage is also a payload mismatch.
  const std::string fat = "vfld_test_trailing.bin";
  fp = std::fopen(fat.c_str(), "wb");
  REQUIRE(fp);
  std::fwrite(all.data(), 1, all.size(), fp);
  const char junk = 'x';
  std::fwrite(&junk, 1, 1, fp);
  std::fclose(fp);
  CHECK_THROWS_WITH_AS(read_vfld1(fat),
                       doctest::Contains("payload length mismatch"),
                       std::runtime_error);

  std::remove(path.c_str());
  std::remove(cut.c_str());
  std::remove(fat.c_str());
}

TEST_CASE("vfld1 writes are byte-identical across repeated dumps") {
  auto g = GridSpec::make(16, 4.0);
  Fft fft(g);
  Rng rng(28);
  VectorField f = random_band_limited(fft, rng, 4);
  const std::string p1 = "vfld_det_a.bin", p2 = "vfld_det_b.bin";
  write_vfld1(p1, f);
  write_vfld1(p2, f);
  auto slurp = [](const std::string& p) {
    std::FILE* fp = std::fopen(p.c_str(), "rb");
    REQUIRE(fp);
    std::fseek(fp, 0, SEEK_END);
    std::vector<unsigned char> b(std::ftell(fp));
    std::fseek(fp, 0, SEEK_SET);
    REQUIRE(std::fread(b.data(), 1, b.size(), fp) == b.size());
    std::fclose(fp);
    return b;
  };
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
