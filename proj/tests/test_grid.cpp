#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mhdbl/errors.hpp"
#include "mhdbl/grid.hpp"

using namespace mhdbl;

namespace {

GridSpec small_grid(int nx = 16, int ny = 401, double ymax = 20.0) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.ymax = ymax;
  return g;
}

// x-independent field with profile p(y) in the mean mode.
template <class F>
Field mean_profile(const GridSpec& g, F p, Boundary bc = Boundary::dirichlet) {
  Field f(g, bc);
  for (int i = 0; i < g.ny; ++i) f(i, 0) = p(g.y(i));
  return f;
}

}  // namespace

TEST_CASE("grid validation rejects bad specs") {
  GridSpec g = small_grid();
  CHECK_NOTHROW(g.validate());
  g.nx = 12;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = small_grid();
  g.ny = 8;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = small_grid();
  g.ymax = 3.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("forward transform of constants and single modes") {
  const auto g = small_grid(16, 32, 8.0);
  auto p = make_physical(g);
  for (auto& v : p.values) v = 1.0;
  auto f = forward(p);
  CHECK(f(3, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
  for (int j = 1; j < f.nm(); ++j) CHECK(std::abs(f(3, j)) < 1e-15);

  for (int i = 0; i < g.ny; ++i)
    for (int n = 0; n < g.nx; ++n) p(i, n) = std::cos(g.x(n)) * std::exp(-g.y(i));
  f = forward(p);
  for (int i = 0; i < g.ny; ++i) {
    CHECK(std::abs(f(i, 1) - cplx{0.5 * std::exp(-g.y(i)), 0.0}) < 1e-15);
    CHECK(std::abs(f(i, 2)) < 1e-15);
  }
}

TEST_CASE("round trip and Parseval on a random field") {
  const auto g = small_grid(32, 40, 8.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto p = make_physical(g);
  for (auto& v : p.values) v = u(rng);
  const auto f = forward(p);
  const auto q = inverse(f);
  double err = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k) err = std::max(err, std::abs(p.values[k] - q.values[k]));
  CHECK(err < 1e-12);

  // plain L2 norm vs direct trapezoid-in-y, rectangle-in-x double sum
  double direct = 0.0;
  for (int i = 0; i < g.ny; ++i) {
    double row = 0.0;
    for (int n = 0; n < g.nx; ++n) row += p(i, n) * p(i, n);
    row *= g.dx();
    direct += (i == 0 || i == g.ny - 1) ? 0.5 * row : row;
  }
  direct = std::sqrt(direct * g.dy());
  CHECK(weighted_l2(f, 0.0, 0.0) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("ddx is exact on resolved modes") {
  const auto g = small_grid(16, 20, 8.0);
  auto p = make_physical(g);
  for (auto& v : p.values) v = 3.0;
  CHECK(ddx(forward(p)).max_abs() == 0.0);

  for (int i = 0; i < g.ny; ++i)
    for (int n = 0; n < g.nx; ++n) p(i, n) = std::sin(2.0 * g.x(n));
  const auto d = inverse(ddx(forward(p)));
  double err = 0.0;
  for (int i = 0; i < g.ny; ++i)
    for (int n = 0; n < g.nx; ++n) err = std::max(err, std::abs(d(i, n) - 2.0 * std::cos(2.0 * g.x(n))));
  CHECK(err < 1e-13);
}

TEST_CASE("ddx agrees with a fourth-order finite difference") {
  // periodic Gaussian bump exp(cos x): FD error ~ dx^4
  auto run = [](int nx) {
    const auto g = small_grid(nx, 17, 8.0);
    auto p = make_physical(g);
    for (int i = 0; i < g.ny; ++i)
      for (int n = 0; n < g.nx; ++n) p(i, n) = std::exp(std::cos(g.x(n))) * std::exp(-g.y(i) * g.y(i));
    const auto d = inverse(ddx(forward(p)));
    const double h = g.dx();
    double err = 0.0;
    for (int i = 0; i < g.ny; ++i)
      for (int n = 0; n < g.nx; ++n) {
        auto at = [&](int m) { return p(i, (m + g.nx) % g.nx); };
        const double fd = (-at(n + 2) + 8.0 * at(n + 1) - 8.0 * at(n - 1) + at(n - 2)) / (12.0 * h);
        err = std::max(err, std::abs(fd - d(i, n)));
      }
    return err;
  };
  const double e1 = run(32);
  const double e2 = run(64);
  CHECK(e1 < 2e-3);
  CHECK(e1 / e2 > 12.0);
}

TEST_CASE("d2dy: linear, Gaussian and Neumann profiles") {
  auto g = small_grid(8, 201, 10.0);
  const auto lin = d2dy(mean_profile(g, [](double y) { return y; }));
  for (int i = 1; i < g.ny - 1; ++i) CHECK(std::abs(lin(i, 0)) < 1e-9);

  auto err_for = [](int ny) {
    const auto gg = small_grid(8, ny, 10.0);
    const auto d = d2dy(mean_profile(gg, [](double y) { return y * std::exp(-y * y / 2); }));
    double err = 0.0;
    for (int i = 0; i < gg.ny - 1; ++i) {
      const double y = gg.y(i);
      err = std::max(err, std::abs(d(i, 0).real() - (y * y * y - 3.0 * y) * std::exp(-y * y / 2)));
    }
    return err;
  };
  const double e1 = err_for(201);
  const double e2 = err_for(401);
  CHECK(e1 < 1e-2);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));

  // Neumann closure: second difference at 0 matches f''(0) = -3 for (1-y^2)e^{-y^2/2}
  auto nb = mean_profile(g, [](double y) { return (1 - y * y) * std::exp(-y * y / 2); }, Boundary::neumann);
  CHECK(d2dy(nb)(0, 0).real() == doctest::Approx(-3.0).epsilon(1e-3));
  CHECK(std::abs(ddy(nb)(0, 0)) == 0.0);
}

TEST_CASE("y integrals against closed forms") {
  const auto g = small_grid(8, 801, 16.0);
  const auto zero = Field(g);
  CHECK(integrate_y_tail(zero).max_abs() == 0.0);
  CHECK(integrate_y_from0(zero).max_abs() == 0.0);

  const auto f1 = mean_profile(g, [](double y) { return y * std::exp(-y * y / 2); });
  const auto t1 = integrate_y_tail(f1);
  const auto b1 = integrate_y_from0(f1);
  const auto f2 = mean_profile(g, [](double y) { return (y - y * y * y / 2) * std::exp(-y * y / 2); });
  const auto t2 = integrate_y_tail(f2);
  const auto b2 = integrate_y_from0(f2);
  double e = 0.0;
  for (int i = 0; i < g.ny; ++i) {
    const double y = g.y(i), gs = std::exp(-y * y / 2);
    e = std::max(e, std::abs(t1(i, 0).real() - gs));
    e = std::max(e, std::abs(b1(i, 0).real() - (1 - gs)));
    e = std::max(e, std::abs(t2(i, 0).real() + y * y / 2 * gs));
    e = std::max(e, std::abs(b2(i, 0).real() - y * y / 2 * gs));
  }
  CHECK(e < 1e-4);
  CHECK(t1(g.ny - 1, 0) == cplx{0.0, 0.0});

  // tail + from0 = total, per node
  const auto tot = integrate_y_total(f1);
  for (int i = 0; i < g.ny; ++i) CHECK(std::abs(t1(i, 0) + b1(i, 0) - tot[0]) < 1e-14);
}

TEST_CASE("weighted L2 of a Gaussian") {
  const auto g = small_grid(8, 2001, 40.0);
  const auto f = mean_profile(g, [](double y) { return std::exp(-y * y / 4); });
  const double n = weighted_l2(f, 1.0, 0.0);
  CHECK(n * n == doctest::Approx(g.lx * std::sqrt(std::numbers::pi)).epsilon(1e-8));
  CHECK(weighted_l2(Field(g), 1.0, 0.0) == 0.0);
}

TEST_CASE("weights beyond double range are handled in log space") {
  // Psi(0, 100) = 1250 > log(DBL_MAX); the field vanishes fast enough there
  const auto g = small_grid(8, 4001, 100.0);
  const auto f = mean_profile(g, [](double y) { return std::exp(-y * y / 2); });
  CHECK(std::isfinite(weighted_l2(f, 1.0, 0.0)));
  CHECK(tail_ratio(f, 1.0, 0.0) < 1e-8);
  const auto slow = mean_profile(g, [](double y) { return std::exp(-y); });
  CHECK_THROWS_AS(weighted_l2(slow, 1.0, 0.0), TailViolation);
}
