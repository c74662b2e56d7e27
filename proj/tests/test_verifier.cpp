#include <chrono>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mhdbl/errors.hpp"
#include "mhdbl/verifier.hpp"

using namespace mhdbl;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

YProfile gaussian4() {
  return {[](double y) { return std::exp(-y * y / 4.0); },
          [](double y) { return -0.5 * y * std::exp(-y * y / 4.0); }, 20.0};
}

}  // namespace

TEST_CASE("poincare: gaussian equality case") {
  const auto r = poincare_check(gaussian4(), 0.0, 1.0);
  CHECK(r.lhs == doctest::Approx(kSqrtPi / 2).epsilon(1e-12));
  CHECK(r.rhs1 == doctest::Approx(kSqrtPi / 2).epsilon(1e-12));
  CHECK(r.rhs2 == doctest::Approx(3 * kSqrtPi / 8).epsilon(1e-12));
  CHECK(r.pass());
  CHECK(std::abs(r.slack1) < 1e-12);

  const auto c = poincare_check(gaussian4(), 0.0, 1.0, 401);
  const auto f = poincare_check(gaussian4(), 0.0, 1.0, 801);
  CHECK(std::abs(f.lhs - kSqrtPi / 2) < 1e-6);
  CHECK(std::abs(f.rhs1 - kSqrtPi / 2) < 1e-6);
  CHECK(std::abs(c.lhs - f.lhs) < 1e-6);
}

TEST_CASE("poincare: zero profile and tail guard") {
  YProfile z{[](double) { return 0.0; }, [](double) { return 0.0; }, 10.0};
  const auto r = poincare_check(z, 1.0, 1.0);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs1 == 0.0);
  CHECK(r.pass());

  // e^{-y^2/16} is not integrable against e^{y^2/4}
  YProfile wide{[](double y) { return std::exp(-y * y / 16.0); },
                [](double y) { return -y / 8.0 * std::exp(-y * y / 16.0); }, 20.0};
  CHECK_THROWS_AS(poincare_check(wide, 0.0, 1.0), TailViolation);
}

TEST_CASE("poincare: strict inequality away from the extremal profile") {
  // narrower Gaussian, t > 0, other kappa
  YProfile g{[](double y) { return std::exp(-y * y); }, [](double y) { return -2 * y * std::exp(-y * y); }, 10.0};
  for (double k : {0.8, 1.5}) {
    const auto r = poincare_check(g, 1.0, k);
    CHECK(r.pass());
    CHECK(r.slack1 > 0.1);
  }
}

TEST_CASE("poincare: random suite of 450 cases passes quickly") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = poincare_suite(20240611);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(s.cases.size() == 450);
  CHECK(s.failures == 0);
  CHECK(s.min_slack >= -1e-10);
  CHECK(secs < 10.0);
}

TEST_CASE("sup constants") {
  CHECK(dawson_integral(0.0) == 0.0);
  CHECK(scaled_erfc_integral(0.0) == doctest::Approx(kSqrtPi / 2).epsilon(1e-13));
  // closed form through erfc
  for (double y : {0.3, 1.0, 2.5})
    CHECK(scaled_erfc_integral(y) ==
          doctest::Approx(std::exp(y * y) * kSqrtPi / 2 * std::erfc(y)).epsilon(1e-12));
  const auto c = sup_constants();
  CHECK(std::abs(c.sup1 - 0.541044) < 1e-5);
  CHECK(std::abs(c.argmax1 - 0.924139) < 1e-5);
  CHECK(std::abs(c.sup2 - 0.886227) < 1e-6);
  CHECK(std::abs(c.sup2 - kSqrtPi / 2) < 1e-13);
  CHECK(c.argmax2 == 0.0);
  CHECK(c.sup2_monotone);
}

TEST_CASE("convexity: r = 0 equality, random pairs hold") {
  const auto [f, g] = random_pair(7, 12);
  const auto e = multiplier_convexity_check(f, g, 0.0);
  CHECK(e.pass);
  CHECK(std::abs(e.max_violation) < 1e-14);
  int fails = 0;
  for (int i = 0; i < 50; ++i)
    for (double r : {0.05, 0.2}) {
      const auto [a, b] = random_pair(1000 + i, 10);
      if (!multiplier_convexity_check(a, b, r).pass) ++fails;
    }
  CHECK(fails == 0);
  CHECK_THROWS_AS(multiplier_convexity_check(f, g, -1.0), ConfigError);
}

TEST_CASE("convexity: single modes in closed form") {
  // f = e^{2ix}, g = e^{3ix} as complex single modes: both sides e^{5r} |phi_k(5)| sqrt(lx)
  Spectrum1D f, g;
  f.c.assign(7, {});
  g.c.assign(7, {});
  f.c[3 + 2] = 1.0;
  g.c[3 + 3] = 1.0;
  const auto r = multiplier_convexity_check(f, g, 0.2);
  CHECK(r.pass);
  CHECK(std::abs(r.max_violation) < 1e-14);
}

TEST_CASE("product law ratio") {
  std::vector<cplx> h(4, cplx{});
  h[3] = 0.5;
  const auto f = Spectrum1D::from_half(2 * std::numbers::pi, h);
  const double r = product_law_ratio(f, f);
  CHECK(std::isfinite(r));
  CHECK(r > 0.0);
  const auto z = Spectrum1D::from_half(2 * std::numbers::pi, std::vector<cplx>(4, cplx{}));
  CHECK(product_law_ratio(z, f) == 0.0);

  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto [a, b] = random_pair(500 + i, 21);
    const auto [c, d] = random_pair(500 + i, 42);
    m1 = std::max(m1, product_law_ratio(a, b));
    m2 = std::max(m2, product_law_ratio(c, d));
  }
  CHECK(std::isfinite(m1));
  CHECK(std::abs(m2 / m1 - 1.0) < 0.2);
}

TEST_CASE("fit_decay") {
  std::vector<double> t, v, w, c;
  for (int i = 0; i <= 200; ++i) {
    const double s = 10.0 + 0.45 * i;
    t.push_back(s);
    v.push_back(3.0 * std::pow(1.0 + s, -0.75));
    c.push_back(2.0);
  }
  auto f = fit_decay(t, v, 10.0, 100.0);
  CHECK(std::abs(f.exponent + 0.75) < 1e-6);
  CHECK(f.std_error < 1e-10);
  CHECK(std::abs(fit_decay(t, c, 10.0, 100.0).exponent) < 1e-12);

  std::vector<double> tl, vl;
  for (int i = 0; i <= 400; ++i) {
    const double s = std::exp(std::log(1e6) * i / 400.0);
    tl.push_back(s);
    vl.push_back(std::pow(1.0 + s, -0.75) * (1.0 + 0.1 * std::sin(std::log(s))));
  }
  CHECK(std::abs(fit_decay(tl, vl, 1.0, 1e6).exponent + 0.75) < 0.02);

  CHECK_THROWS_AS(fit_decay(t, v, 10.0, 12.0), ConfigError);
  std::vector<double> bad = v;
  bad[5] = 0.0;
  CHECK_THROWS_AS(fit_decay(t, bad, 10.0, 100.0), ConfigError);
}

TEST_CASE("theta_report") {
  NormSeries s;
  for (int i = 0; i <= 10; ++i) {
    SampleRow r;
    r.t = i;
    s.push_back(r);
  }
  Params p;
  auto z = theta_report(s, p);
  CHECK(z.theta_final == 0.0);
  CHECK(z.tail_fraction == 0.0);
  CHECK(z.band_ok);
  CHECK(z.band_bound == doctest::Approx(0.05));

  for (auto& r : s) {
    r.theta = 0.01 * (1.0 - std::exp(-r.t));
    r.gh_integral = 2.0 * r.theta;
  }
  z = theta_report(s, p);
  CHECK(z.theta_half == s[5].theta);
  CHECK(z.tail_fraction == doctest::Approx((s[10].theta - s[5].theta) / s[10].theta));
  CHECK(z.gh_tail_fraction == doctest::Approx(z.tail_fraction));
  CHECK(z.band_ok);
}

TEST_CASE("sample_column names") {
  SampleRow r;
  r.norm_gh = 4.0;
  CHECK(sample_column(r, "norm_gh") == 4.0);
  for (const char* n : kNormColumns) CHECK_NOTHROW(sample_column(r, n));
  CHECK_THROWS_AS(sample_column(r, "nope"), ConfigError);
}
