#include <cmath>
#include <random>

#include "doctest.h"
#include "mhdbl/lp.hpp"

using namespace mhdbl;

namespace {

GridSpec lp_grid(int nx = 64, int ny = 33) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.ymax = 8.0;
  return g;
}

// random band-limited real field with Gaussian y-envelope
Field random_field(const GridSpec& g, std::mt19937_64& rng, Boundary bc = Boundary::dirichlet) {
  std::normal_distribution<double> n(0.0, 1.0);
  Field f(g, bc);
  const int cut = g.dealias_cutoff();
  for (int i = 0; i < g.ny; ++i) {
    const double env = std::exp(-g.y(i) * g.y(i) / 4);
    for (int j = 0; j <= cut; ++j) f(i, j) = env * cplx{n(rng), j == 0 ? 0.0 : n(rng)} / (1.0 + j);
  }
  return f;
}

Field single_mode(const GridSpec& g, int j, double amp = 1.0) {
  Field f(g);
  for (int i = 0; i < g.ny; ++i) f(i, j) = amp * std::exp(-g.y(i));
  return f;
}

double max_diff(const Field& a, const Field& b) { return (a - b).max_abs(); }

}  // namespace

TEST_CASE("profile pieces") {
  CHECK(lp_chi(0.5) == 1.0);
  CHECK(lp_chi(0.75) == 1.0);
  CHECK(lp_chi(4.0 / 3.0) == 0.0);
  CHECK(lp_phi(0.7) == 0.0);
  CHECK(lp_phi(8.0 / 3.0) == 0.0);
  // tau = 1: only k = -1, 0 contribute
  CHECK(lp_phi(2.0) + lp_phi(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lp_phi(4.0) == 0.0);
  CHECK(lp_phi(0.5) == 0.0);
}

TEST_CASE("partition of unity on grid frequencies") {
  const auto g = lp_grid(128);
  const auto p = DyadicPartition::build(g);
  const int lo = static_cast<int>(std::floor(std::log2(3.0 * g.xi(1) / 8.0)));
  const int hi = static_cast<int>(std::ceil(std::log2(8.0 * g.xi(g.nx / 2) / 3.0)));
  CHECK(p.k_min() >= lo);
  CHECK(p.k_max() <= hi);
  double worst = 0.0;
  for (int j = 1; j < g.n_modes(); ++j) {
    double s = 0.0;
    for (int k = p.k_min(); k <= p.k_max(); ++k) s += p.phi(k, j);
    worst = std::max(worst, std::abs(s - 1.0));
    // chi + sum_{k>=0} phi = 1
    double t = p.chi(0, j);
    for (int k = 0; k <= p.k_max(); ++k) t += p.phi(k, j);
    worst = std::max(worst, std::abs(t - 1.0));
  }
  CHECK(worst < 1e-12);
  for (int j = 0; j < g.n_modes(); ++j) {
    CHECK(p.phi(lo - 1, j) == 0.0);
    CHECK(p.phi(hi + 1, j) == 0.0);
  }
  // almost orthogonality at table level
  for (int k = p.k_min(); k <= p.k_max(); ++k)
    for (int k2 = k + 2; k2 <= p.k_max(); ++k2)
      for (int j = 0; j < g.n_modes(); ++j) CHECK(p.phi(k, j) * p.phi(k2, j) == 0.0);
}

TEST_CASE("projections reconstruct") {
  const auto g = lp_grid();
  const auto p = DyadicPartition::build(g);
  const auto one = single_mode(g, 1);
  CHECK(max_diff(lp_project(p, one, -1) + lp_project(p, one, 0), one) < 1e-15);
  CHECK(lp_project(p, Field(g), 0).max_abs() == 0.0);

  std::mt19937_64 rng(3);
  const auto f = random_field(g, rng);
  Field sum(g);
  for (int i = 0; i < g.ny; ++i) sum(i, 0) = f(i, 0);
  for (int k = p.k_min(); k <= p.k_max(); ++k) sum += lp_project(p, f, k);
  CHECK(max_diff(sum, f) < 1e-12);
}

TEST_CASE("besov norm: zero, homogeneity, triangle") {
  const auto g = lp_grid();
  const auto p = DyadicPartition::build(g);
  std::mt19937_64 rng(11);
  const auto f = random_field(g, rng);
  const auto h = random_field(g, rng);
  CHECK(besov_norm(p, Field(g), 0.5) == 0.0);
  const double nf = besov_norm(p, f, 0.5, {1.0, 0.0, 0.1});
  CHECK(besov_norm(p, 3.5 * f, 0.5, {1.0, 0.0, 0.1}) == doctest::Approx(3.5 * nf).epsilon(1e-12));
  CHECK(besov_norm(p, f + h, 0.5) <= besov_norm(p, f, 0.5) + besov_norm(p, h, 0.5) + 1e-12);
}

TEST_CASE("besov norm against a physical-space shell oracle") {
  // Delta_k f computed by direct convolution sums in physical space at double
  // resolution, then plain quadrature.
  const auto g = lp_grid(32, 41);
  const auto p = DyadicPartition::build(g);
  Field f(g);
  for (int i = 0; i < g.ny; ++i)
    for (int j = 1; j <= 8; ++j) f(i, j) = std::exp(-g.y(i) * g.y(i) / 2) * std::exp(-0.1 * j * j) * cplx{1.0, 0.3 * j};

  auto g2 = g;
  g2.nx = 2 * g.nx;
  double oracle = 0.0;
  for (int k = p.k_min(); k <= p.k_max(); ++k) {
    double sq = 0.0;
    for (int i = 0; i < g.ny; ++i) {
      double row = 0.0;
      for (int n = 0; n < g2.nx; ++n) {
        const double x = g2.x(n);
        double v = 0.0;
        for (int j = 1; j <= 8; ++j) v += 2.0 * lp_phi(std::ldexp(g.xi(j), -k)) * std::real(f(i, j) * std::exp(cplx{0.0, g.xi(j) * x}));
        row += v * v;
      }
      row *= g2.dx();
      sq += (i == 0 || i == g.ny - 1) ? 0.5 * row : row;
    }
    oracle += std::exp2(0.5 * k) * std::sqrt(sq * g.dy());
  }
  CHECK(besov_norm(p, f, 0.5) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("besov_h_norm on profiles") {
  const auto g = lp_grid();
  const auto p = DyadicPartition::build(g);
  std::vector<cplx> zero(g.n_modes());
  CHECK(besov_h_norm(p, zero, 0.5) == 0.0);
  std::vector<cplx> m(g.n_modes());
  m[3] = 0.5;  // cos(3x)
  double expect = 0.0;
  int count = 0;
  for (int k = p.k_min(); k <= p.k_max(); ++k) {
    const double w = lp_phi(std::ldexp(3.0, -k));
    if (w == 0.0) continue;
    ++count;
    expect += std::exp2(0.5 * k) * w * std::sqrt(g.lx * 2.0 * 0.25);
  }
  CHECK(count <= 2);
  CHECK(besov_h_norm(p, m, 0.5) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("gevrey multiplier") {
  const auto g = lp_grid();
  const auto f = single_mode(g, 2);
  CHECK(max_diff(gevrey_multiplier(f, 0.0), f) == 0.0);
  CHECK(std::abs(gevrey_multiplier(f, 0.1)(0, 2)) == doctest::Approx(1.221402758160170).epsilon(1e-14));
  std::mt19937_64 rng(5);
  const auto r = random_field(g, rng);
  CHECK(max_diff(gevrey_multiplier(gevrey_multiplier(r, 0.07), 0.13), gevrey_multiplier(r, 0.2)) < 1e-12);
  CHECK_THROWS_AS(gevrey_multiplier(r, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(gevrey_multiplier(r, 1e3), std::overflow_error);
}

TEST_CASE("Bony decomposition") {
  const auto g = lp_grid();
  const auto p = DyadicPartition::build(g);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_field(g, rng);
    const auto h = random_field(g, rng, Boundary::neumann);
    const auto b = paraproduct(p, f, h);
    CHECK(max_diff(b.t_fg + b.t_gf + b.remainder, dealiased_product(f, h)) < 1e-10);
  }
  // f in a low shell, g in a high shell: T_g f = R = 0
  const auto lo = single_mode(g, 1);
  const auto hi = single_mode(g, 10);
  const auto b = paraproduct(p, lo, hi);
  CHECK(b.t_gf.max_abs() < 1e-15);
  CHECK(b.remainder.max_abs() < 1e-15);
  CHECK(max_diff(b.t_fg, dealiased_product(lo, hi)) < 1e-14);
}

TEST_CASE("Bernstein sanity bound") {
  const auto g = lp_grid(128);
  const auto p = DyadicPartition::build(g);
  std::mt19937_64 rng(23);
  const auto f = random_field(g, rng);
  for (int k = p.k_min(); k <= p.k_max(); ++k) {
    const auto fk = lp_project(p, f, k);
    const double n = weighted_l2(fk, 0.0, 0.0);
    if (n == 0.0) continue;
    CHECK(weighted_l2(ddx(fk), 0.0, 0.0) <= 8.0 / 3.0 * std::exp2(k) * n * (1 + 1e-9));
  }
}

TEST_CASE("Chemin-Lerner accumulator") {
  const auto g = lp_grid();
  const auto p = DyadicPartition::build(g);
  std::mt19937_64 rng(29);
  const auto f = random_field(g, rng);
  const auto sn = shell_norms(p, f);

  CLAccumulator acc(p.k_min(), p.n_shells(), 0.5, 2.0);
  for (int n = 0; n < 100; ++n) acc.add(sn, 0.01);
  CHECK(acc.norm() == doctest::Approx(besov_norm(p, f, 0.5)).epsilon(1e-12));

  CLAccumulator zero(p.k_min(), p.n_shells(), 0.5, 2.0);
  for (int n = 0; n < 10; ++n) zero.add(sn, 0.1, 0.0);
  CHECK(zero.norm() == 0.0);

  // ||.|| = <t>^{-1}: int_0^100 <t>^{-2} dt = 1 - 1/101
  CLAccumulator dec(p.k_min(), p.n_shells(), 0.0, 2.0);
  const double dt = 1e-3;
  std::vector<double> one(p.n_shells(), 0.0);
  for (int n = 0; n < 100000; ++n) {
    one[0] = 1.0 / (1.0 + n * dt);
    dec.add(one, dt);
  }
  CHECK(dec.sums()[0] == doctest::Approx(1.0 - 1.0 / 101.0).epsilon(2e-3));

  CLAccumulator mx(p.k_min(), p.n_shells(), 0.0, CLAccumulator::infinity_p);
  one[0] = 2.0;
  mx.add(one, 0.1);
  one[0] = 1.0;
  mx.add(one, 0.1);
  CHECK(mx.sums()[0] == 2.0);
}
