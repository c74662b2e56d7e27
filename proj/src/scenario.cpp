#include "mhdbl/scenario.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mhdbl/errors.hpp"

namespace mhdbl {

namespace {

using boost::math::quadrature::gauss_kronrod;

template <class F>
double integrate(F f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

// e^{-1/s} with its first two derivatives, all zero for s <= 0.
struct Glue {
  double g = 0.0, g1 = 0.0, g2 = 0.0;
};

Glue glue(double s) {
  Glue r;
  if (s <= 0.0) return r;
  r.g = std::exp(-1.0 / s);
  if (r.g == 0.0) return r;
  const double s2 = s * s;
  r.g1 = r.g / s2;
  r.g2 = r.g * (1.0 / (s2 * s2) - 2.0 / (s2 * s));
  return r;
}

// T(s) = G(s) / (G(s) + G(1-s)) and derivatives up to order 2.
void transition(double s, double& t0, double& t1, double& t2) {
  if (s <= 0.0) {
    t0 = t1 = t2 = 0.0;
    return;
  }
  if (s >= 1.0) {
    t0 = 1.0;
    t1 = t2 = 0.0;
    return;
  }
  const Glue a = glue(s);
  Glue b = glue(1.0 - s);
  b.g1 = -b.g1;  // d/ds of G(1-s)
  const double d = a.g + b.g;
  const double d1 = a.g1 + b.g1;
  const double n = a.g1 * b.g - a.g * b.g1;
  const double n1 = a.g2 * b.g - a.g * b.g2;
  t0 = a.g / d;
  t1 = n / (d * d);
  t2 = (n1 * d - 2.0 * n * d1) / (d * d * d);
}

// bump(y) = exp(-1/((y-1)(2-y))) on (1,2) and derivatives up to order 2.
void bump(double y, double& b0, double& b1, double& b2) {
  b0 = b1 = b2 = 0.0;
  if (y <= 1.0 || y >= 2.0) return;
  const double q = (y - 1.0) * (2.0 - y);
  const double q1 = 3.0 - 2.0 * y;
  const Glue g = glue(q);
  b0 = g.g;
  b1 = g.g1 * q1;
  b2 = g.g2 * q1 * q1 + g.g1 * (-2.0);
}

double rho(double y, double c) {
  double t0, t1, t2, b0, b1, b2;
  transition(y - 1.0, t0, t1, t2);
  bump(y, b0, b1, b2);
  return t0 + c * b0;
}

std::vector<cplx> scaled(const std::vector<cplx>& v, double s) {
  std::vector<cplx> out(v);
  for (auto& c : out) c *= s;
  return out;
}

std::vector<cplx> ddx_row(const GridSpec& g, const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double k = (2 * static_cast<int>(j) == g.nx) ? 0.0 : g.xi(static_cast<int>(j));
    out[j] = cplx{0.0, k} * v[j];
  }
  return out;
}

std::vector<cplx> product_row(const GridSpec& g, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  auto pa = inverse_row(g, a);
  const auto pb = inverse_row(g, b);
  for (std::size_t n = 0; n < pa.size(); ++n) pa[n] *= pb[n];
  auto out = forward_row(g, pa);
  dealias_row(g, out);
  return out;
}

std::vector<cplx> gevrey_row(const GridSpec& g, const std::vector<cplx>& v, double r) {
  std::vector<cplx> out(v);
  for (std::size_t j = 0; j < v.size(); ++j) out[j] *= std::exp(r * g.xi(static_cast<int>(j)));
  return out;
}

// int_T^inf <t>^p dt
double power_tail(double p, double horizon) {
  if (p >= -1.0) return std::numeric_limits<double>::infinity();
  return std::pow(1.0 + horizon, p + 1.0) / (-p - 1.0);
}

}  // namespace

void Params::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("params.kappa must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("params.epsilon must be positive");
  if (!(delta > 0.0)) throw ConfigError("params.delta must be positive");
  if (!(lambda > 0.0)) throw ConfigError("params.lambda must be positive");
  if (!(nu_u > 0.0)) throw ConfigError("params.nu_u must be positive");
  if (nu_b < 0.0) throw ConfigError("params.nu_b must be positive (or 0 for kappa)");
}

DerivedExponents derived_exponents(const Params& p) {
  if (!(p.kappa > 0.0)) throw ConfigError("kappa must be positive");
  DerivedExponents d;
  if (p.kappa < 2.0) d.l_kappa = p.kappa * (2.0 - p.kappa) / 4.0;
  if (p.kappa > 0.5) d.ell_kappa = (2.0 * p.kappa - 1.0) / (4.0 * p.kappa * p.kappa);
  return d;
}

// --- cutoff ------------------------------------------------------------------

Cutoff Cutoff::build(const GridSpec& grid) {
  const double h = grid.dy();
  const int inside = static_cast<int>(std::floor(2.0 / h + 1e-9)) - static_cast<int>(std::ceil(1.0 / h - 1e-9)) + 1;
  if (inside < 16)
    throw ConfigError("grid too coarse for the cutoff layer: " + std::to_string(inside) +
                      " nodes in [1,2], need 16 (raise grid.ny or lower grid.ymax)");
  Cutoff c;
  const double mass = integrate([](double y) {
    double b0, b1, b2;
    bump(y, b0, b1, b2);
    return b0;
  }, 1.0, 2.0);
  // int_1^2 T(y-1) dy = 1/2 by symmetry; the bump supplies the remaining 3/2
  c.c_ = 1.5 / mass;
  c.chi_.resize(grid.ny);
  c.d1_.resize(grid.ny);
  c.d2_.resize(grid.ny);
  c.d3_.resize(grid.ny);
  for (int i = 0; i < grid.ny; ++i) {
    const double y = grid.y(i);
    c.chi_[i] = c.chi(y);
    c.d1_[i] = c.d1(y);
    c.d2_[i] = c.d2(y);
    c.d3_[i] = c.d3(y);
  }
  return c;
}

double Cutoff::chi(double y) const {
  if (y <= 1.0) return 0.0;
  if (y >= 2.0) return y;
  const double c = c_;
  return integrate([c](double s) { return rho(s, c); }, 1.0, y);
}

double Cutoff::d1(double y) const {
  if (y <= 1.0) return 0.0;
  if (y >= 2.0) return 1.0;
  return rho(y, c_);
}

double Cutoff::d2(double y) const {
  if (y <= 1.0 || y >= 2.0) return 0.0;
  double t0, t1, t2, b0, b1, b2;
  transition(y - 1.0, t0, t1, t2);
  bump(y, b0, b1, b2);
  return t1 + c_ * b1;
}

double Cutoff::d3(double y) const {
  if (y <= 1.0 || y >= 2.0) return 0.0;
  double t0, t1, t2, b0, b1, b2;
  transition(y - 1.0, t0, t1, t2);
  bump(y, b0, b1, b2);
  return t2 + c_ * b2;
}

// --- far field -----------------------------------------------------------------

FarField FarField::trivial(const GridSpec& grid) {
  FarField f;
  f.grid_ = grid;
  f.g_.assign(grid.n_modes(), cplx{0.0, 0.0});
  return f;
}

FarField FarField::decaying(const GridSpec& grid, const Params& p, double amplitude, double alpha,
                            std::vector<cplx> g_modes) {
  if (p.bbar() != 0.0 && amplitude != 0.0)
    throw ConfigError("kappa = 1 supports only the trivial far field (U = B = 0)");
  if (g_modes.size() != static_cast<std::size_t>(grid.n_modes())) throw ConfigError("far-field profile size mismatch");
  if (std::abs(g_modes[0]) != 0.0) throw ConfigError("far-field profile must have zero x-mean");
  if (!(alpha > 0.0)) throw ConfigError("scenario.alpha must be positive");
  FarField f;
  f.grid_ = grid;
  f.amplitude_ = amplitude;
  f.alpha_ = alpha;
  dealias_row(grid, g_modes);
  f.g_ = std::move(g_modes);
  return f;
}

std::vector<cplx> FarField::default_profile(const GridSpec& grid) {
  std::vector<cplx> g(grid.n_modes(), cplx{0.0, 0.0});
  for (int j = 1; j <= grid.dealias_cutoff(); ++j) g[j] = std::exp(-grid.xi(j) * grid.xi(j));
  return g;
}

std::vector<cplx> FarField::U(double t) const { return scaled(g_, amplitude_ * std::pow(1.0 + t, -alpha_)); }
std::vector<cplx> FarField::B(double) const { return std::vector<cplx>(g_.size(), cplx{0.0, 0.0}); }
std::vector<cplx> FarField::dtU(double t) const {
  return scaled(g_, -alpha_ * amplitude_ * std::pow(1.0 + t, -alpha_ - 1.0));
}
std::vector<cplx> FarField::dtB(double) const { return std::vector<cplx>(g_.size(), cplx{0.0, 0.0}); }

double FarField::bernoulli_residual(const DyadicPartition& p, double t, double bbar) const {
  const auto u = U(t);
  auto b1 = B(t);
  b1[0] += bbar;
  const auto dxu = ddx_row(grid_, u);
  const auto dxb = ddx_row(grid_, b1);
  auto r = dtB(t);
  const auto p1 = product_row(grid_, u, dxb);
  const auto p2 = product_row(grid_, b1, dxu);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] += p1[j] - p2[j];
  return besov_h_norm(p, r, 0.5);
}

// --- assumptions ---------------------------------------------------------------

AssumptionReport assumption_check(const FarField& ff, const DyadicPartition& p, double delta, double epsilon,
                                  double horizon) {
  AssumptionReport r;
  if (ff.is_trivial()) {
    r.decay_ok = r.integral_ok = true;
    return r;
  }
  const auto& g = ff.grid();
  const double a = ff.amplitude();
  const double al = ff.alpha();
  // separable family: shell norms of e^{delta|D|} g carry all x-dependence
  const auto eg = gevrey_row(g, ff.profile(), delta);
  const double g32 = besov_h_norm(p, eg, 1.5);
  const double g12 = besov_h_norm(p, eg, 0.5);

  // sup_t <t>^{9/4} <t>^{-alpha}: sampled on [0,horizon], analytic beyond
  double sup = 0.0;
  const int samples = 2000;
  for (int n = 0; n <= samples; ++n) sup = std::max(sup, std::pow(1.0 + horizon * n / samples, 2.25 - al));
  sup = al >= 2.25 ? std::max(sup, std::pow(1.0 + horizon, 2.25 - al)) : std::numeric_limits<double>::infinity();
  r.linf_b32 = a * sup * g32;

  // int <t>^{7/2} (|dt a|^2 + |a|^2), a(t) = <t>^{-alpha}
  const double i2 = integrate([al](double t) {
    const double s = 1.0 + t;
    return std::pow(s, 3.5 - 2.0 * al) * (1.0 + al * al / (s * s));
  }, 0.0, horizon) + power_tail(3.5 - 2.0 * al, horizon) + al * al * power_tail(1.5 - 2.0 * al, horizon);
  r.l2_b12 = a * std::sqrt(i2) * g12;

  const double i1 = integrate([al](double t) { return std::pow(1.0 + t, 1.25 - al); }, 0.0, horizon) +
                    power_tail(1.25 - al, horizon);
  r.l1_b12 = a * i1 * g12;

  r.decay_ok = r.linf_b32 + r.l2_b12 <= epsilon;
  r.integral_ok = r.l1_b12 <= epsilon;
  return r;
}

double budget_amplitude(const DyadicPartition& p, const std::vector<cplx>& g, double alpha, double delta,
                        double epsilon, double fraction) {
  Params unit;
  unit.kappa = 2.0;  // any kappa with bbar = 0
  const auto ff = FarField::decaying(p.grid(), unit, 1.0, alpha, g);
  const auto r = assumption_check(ff, p, delta, epsilon, 100.0);
  const double worst = std::max(r.linf_b32 + r.l2_b12, r.l1_b12);
  if (!std::isfinite(worst) || worst == 0.0) throw ConfigError("far-field profile has no finite assumption budget");
  return fraction * epsilon / worst;
}

// --- source terms ----------------------------------------------------------------

SourceTerms source_terms(const FarField& ff, const Cutoff* cutoff, const Params& p, double t) {
  const auto& g = ff.grid();
  SourceTerms s{Field(g, Boundary::dirichlet), Field(g, Boundary::neumann), Field(g, Boundary::dirichlet),
                Field(g, Boundary::neumann)};
  const double bbar = p.bbar();
  if (ff.is_trivial()) return s;
  if (cutoff == nullptr) throw std::invalid_argument("cutoff required for a nontrivial far field");

  const auto U = ff.U(t), B = ff.B(t), Ut = ff.dtU(t), Bt = ff.dtB(t);
  const auto Ux = ddx_row(g, U), Bx = ddx_row(g, B);
  const auto uux = product_row(g, U, Ux), bbx = product_row(g, B, Bx);
  const auto ubx = product_row(g, U, Bx), bux = product_row(g, B, Ux);
  const auto& chi = cutoff->chi_nodes();
  const auto& c1 = cutoff->d1_nodes();
  const auto& c2 = cutoff->d2_nodes();
  const auto& c3 = cutoff->d3_nodes();
  for (int i = 0; i < g.ny; ++i) {
    const double lin = 1.0 - c1[i];
    const double qu = 1.0 - c1[i] * c1[i] + chi[i] * c2[i];
    const double qb = 1.0 - c1[i] * c1[i] - chi[i] * c2[i];
    for (int j = 0; j < g.n_modes(); ++j) {
      s.m_u(i, j) = lin * (Ut[j] - bbar * Bx[j]) + c3[i] * U[j] + qu * (uux[j] - bbx[j]);
      s.m_b(i, j) = lin * (Bt[j] - bbar * Ux[j]) + c3[i] * B[j] + qb * (ubx[j] - bux[j]);
    }
  }
  // the products are exact zeros for y >= 2; keep them so
  for (int i = 0; i < g.ny; ++i)
    if (g.y(i) >= 2.0)
      for (int j = 0; j < g.n_modes(); ++j) s.m_u(i, j) = s.m_b(i, j) = 0.0;
  s.M_u = -1.0 * integrate_y_tail(s.m_u);
  s.M_b = -1.0 * integrate_y_tail(s.m_b);
  return s;
}

// --- initial data ----------------------------------------------------------------

InitialData initial_data_standard(const GridSpec& grid, const Params& p, const std::vector<cplx>& a_modes,
                                  double weight_a) {
  if (a_modes.size() != static_cast<std::size_t>(grid.n_modes())) throw ConfigError("a(x) profile size mismatch");
  const double eps = p.epsilon;
  auto pu = [](double y) { return (y - y * y * y / 2.0) * std::exp(-y * y / 2.0); };
  auto pb = [](double y) { return (1.0 - y * y) * std::exp(-y * y / 2.0); };
  auto dpb = [](double y) { return (y * y * y - 3.0 * y) * std::exp(-y * y / 2.0); };
  auto pg = [](double y) { return (y - y * y * y / 4.0) * std::exp(-y * y / 2.0); };
  const double k = p.kappa;
  auto ph = [k](double y) { return (1.0 - y * y + y * y / (2.0 * k)) * std::exp(-y * y / 2.0); };

  InitialData d{Field(grid, Boundary::dirichlet), Field(grid, Boundary::neumann), {}};
  Field G(grid, Boundary::dirichlet), H(grid, Boundary::neumann);
  auto a = a_modes;
  dealias_row(grid, a);
  for (int i = 0; i < grid.ny; ++i) {
    const double y = grid.y(i);
    for (int j = 0; j < grid.n_modes(); ++j) {
      d.u0(i, j) = eps * pu(y) * a[j];
      d.b0(i, j) = eps * pb(y) * a[j];
      G(i, j) = eps * pg(y) * a[j];
      H(i, j) = eps * ph(y) * a[j];
    }
  }

  auto& r = d.report;
  const auto amax_row = inverse_row(grid, a);
  double amax = 0.0;
  for (double v : amax_row) amax = std::max(amax, std::abs(v));
  r.x_mean = eps * std::abs(a[0]);
  r.u0_wall = eps * amax * std::abs(pu(0.0));
  r.dyb0_wall = eps * amax * std::abs(dpb(0.0));
  r.int_u0 = eps * amax * std::abs(integrate(pu, 0.0, 40.0));
  r.int_b0 = eps * amax * std::abs(integrate(pb, 0.0, 40.0));
  for (double v : inverse_row(grid, integrate_y_total(d.u0))) r.int_u0_grid = std::max(r.int_u0_grid, std::abs(v));
  for (double v : inverse_row(grid, integrate_y_total(d.b0))) r.int_b0_grid = std::max(r.int_b0_grid, std::abs(v));
  const auto part = DyadicPartition::build(grid);
  r.smallness = besov_norm(part, G, H, 0.5, {weight_a, 0.0, p.delta});
  r.smallness_bound = std::sqrt(eps);
  r.pass = r.x_mean == 0.0 && r.u0_wall < 1e-12 && r.dyb0_wall < 1e-12 && r.int_u0 < 1e-8 * eps &&
           r.int_b0 < 1e-8 * eps && r.smallness <= r.smallness_bound;
  if (!r.pass) {
    std::ostringstream os;
    os << "initial data rejected: x-mean " << r.x_mean << ", wall values " << r.u0_wall << "/" << r.dyb0_wall
       << ", y-integrals " << r.int_u0 << "/" << r.int_b0 << ", smallness " << r.smallness << " (bound "
       << r.smallness_bound << ")";
    throw ConfigError(os.str());
  }
  return d;
}

}  // namespace mhdbl
