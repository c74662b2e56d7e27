#include "mhdbl/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mhdbl/errors.hpp"

namespace mhdbl {

namespace {

using boost::math::quadrature::gauss_kronrod;

template <class F>
double gk(F f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

// Adaptive quadrature on unit-length pieces so narrow peaks are not missed.
template <class F>
double gk_pieces(F f, double a, double b) {
  const int n = std::max(1, static_cast<int>(std::ceil(b - a)));
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += gauss_kronrod<double, 31>::integrate(f, a + i * h, a + (i + 1) * h, 8, 1e-13);
  return s;
}

template <class F>
double trapezoid(F f, double a, double b, int nodes) {
  const double h = (b - a) / (nodes - 1);
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < nodes - 1; ++i) s += f(a + i * h);
  return s * h;
}

double xi_of(double lx, int j) { return 2.0 * std::numbers::pi * std::abs(j) / lx; }

// Shell norms ||phi(2^{-k}|xi|) c||_{L^2} over the full spectrum, for all k
// whose support meets the spectrum. Returns (k_lo, norms).
std::pair<int, std::vector<double>> shells_1d(const Spectrum1D& f) {
  const int n = f.n();
  if (n == 0) return {0, {}};
  const double xmin = xi_of(f.lx, 1), xmax = xi_of(f.lx, n);
  const int k_lo = static_cast<int>(std::floor(std::log2(0.375 * xmin)));
  const int k_hi = static_cast<int>(std::ceil(std::log2(xmax * 4.0 / 3.0)));
  std::vector<double> out(k_hi - k_lo + 1, 0.0);
  for (int k = k_lo; k <= k_hi; ++k) {
    double e = 0.0;
    for (int j = -n; j <= n; ++j) {
      if (j == 0) continue;
      const double w = lp_phi(std::ldexp(xi_of(f.lx, j), -k));
      if (w != 0.0) e += w * w * std::norm(f.c[j + n]);
    }
    out[k - k_lo] = std::sqrt(f.lx * e);
  }
  return {k_lo, out};
}

Spectrum1D modulus_weighted(const Spectrum1D& f, double r) {
  Spectrum1D g = f;
  const int n = f.n();
  for (int j = -n; j <= n; ++j) g.c[j + n] = std::abs(f.c[j + n]) * std::exp(r * xi_of(f.lx, j));
  return g;
}

}  // namespace

// ---------------------------------------------------------------- Poincare

YProfile GaussianMixture::profile() const {
  double ext = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) ext = std::max(ext, mu[m] + 15.0 * s[m]);
  auto self = *this;
  YProfile p;
  p.f = [self](double y) {
    double v = 0.0;
    for (std::size_t m = 0; m < self.c.size(); ++m) {
      const double z = (y - self.mu[m]) / self.s[m];
      v += self.c[m] * std::exp(-0.5 * z * z);
    }
    return v;
  };
  p.df = [self](double y) {
    double v = 0.0;
    for (std::size_t m = 0; m < self.c.size(); ++m) {
      const double z = (y - self.mu[m]) / self.s[m];
      v -= self.c[m] * z / self.s[m] * std::exp(-0.5 * z * z);
    }
    return v;
  };
  p.extent = ext;
  return p;
}

PoincareResult poincare_check(const YProfile& prof, double t, double kappa, int nodes) {
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (nodes == 1 || nodes < 0) throw ConfigError("quadrature needs at least two nodes");
  const double kt = kappa * (1.0 + t);
  const double L = prof.extent;
  // e^{Psi_kappa} g, formed as a product so the weight alone never overflows
  // where g is negligible
  auto wt = [kt](double y, double g) {
    const double e = y * y / (8.0 * kt);
    if (e < 600.0) return g * std::exp(e);
    if (g == 0.0) return 0.0;
    return std::copysign(std::exp(std::log(std::abs(g)) + e), g);
  };

  double peak = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double y = L * i / 400.0;
    peak = std::max({peak, std::abs(wt(y, prof.f(y))), std::abs(wt(y, prof.df(y)))});
  }
  const double edge = std::max(std::abs(wt(L, prof.f(L))), std::abs(wt(L, prof.df(L))));
  if (peak > 0.0 && edge > 1e-8 * peak) {
    std::ostringstream os;
    os << "weighted profile not negligible at y=" << L << " (ratio " << edge / peak << ")";
    throw TailViolation(os.str());
  }

  auto a = [&](double y) { const double g = wt(y, prof.df(y)); return g * g; };
  auto b = [&](double y) { const double g = wt(y, prof.f(y)); return g * g; };
  auto c = [&](double y) { const double g = wt(y, y * prof.f(y)); return g * g; };
  double ia, ib, ic;
  if (nodes == 0) {
    ia = gk_pieces(a, 0.0, L);
    ib = gk_pieces(b, 0.0, L);
    ic = gk_pieces(c, 0.0, L);
  } else {
    ia = trapezoid(a, 0.0, L, nodes);
    ib = trapezoid(b, 0.0, L, nodes);
    ic = trapezoid(c, 0.0, L, nodes);
  }
  PoincareResult r;
  r.lhs = ia;
  r.rhs1 = ib / (2.0 * kt);
  r.rhs2 = ib / (4.0 * kt) + ic / (16.0 * kt * kt);
  r.pass1 = r.lhs >= r.rhs1 - kPoincareTol * r.lhs;
  r.pass2 = r.lhs >= r.rhs2 - kPoincareTol * r.lhs;
  if (r.lhs > 0.0) {
    r.slack1 = (r.lhs - r.rhs1) / r.lhs;
    r.slack2 = (r.lhs - r.rhs2) / r.lhs;
  }
  return r;
}

PoincareSuite poincare_suite(std::uint64_t seed, int n_mixtures) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GaussianMixture> mixes(n_mixtures);
  for (auto& g : mixes) {
    const int k = 1 + static_cast<int>(unit(rng) * 3.0);
    for (int i = 0; i < k; ++i) {
      g.c.push_back(2.0 * unit(rng) - 1.0);
      g.mu.push_back(3.0 * unit(rng));
      // s^2 <= 0.72 < min kappa <t> = 0.8 keeps e^{2 Psi_kappa} f^2 integrable
      g.s.push_back(0.3 + 0.55 * unit(rng));
    }
  }
  PoincareSuite out;
  out.min_slack = std::numeric_limits<double>::infinity();
  const double ts[] = {0.0, 1.0, 10.0};
  const double ks[] = {0.8, 1.0, 1.5};
  for (int m = 0; m < n_mixtures; ++m) {
    const YProfile p = mixes[m].profile();
    for (double t : ts)
      for (double k : ks) {
        PoincareCase c{m, t, k, poincare_check(p, t, k)};
        out.min_slack = std::min({out.min_slack, c.result.slack1, c.result.slack2});
        if (!c.result.pass()) ++out.failures;
        out.cases.push_back(c);
      }
  }
  if (out.cases.empty()) out.min_slack = 0.0;
  return out;
}

// ------------------------------------------------------------ sup constants

double dawson_integral(double y) {
  if (y == 0.0) return 0.0;
  return gk([y](double z) { return std::exp((z - y) * (z + y)); }, 0.0, y);
}

double scaled_erfc_integral(double y) {
  // substitute z = y + s: int_0^inf e^{-s(2y+s)} ds
  return gk([y](double s) { return std::exp(-s * (2.0 * y + s)); }, 0.0, std::numeric_limits<double>::infinity());
}

SupConstants sup_constants() {
  SupConstants r;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.5, b = 1.5;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = dawson_integral(x1), f2 = dawson_integral(x2);
  while (b - a > 1e-10) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = dawson_integral(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = dawson_integral(x2);
    }
  }
  r.argmax1 = 0.5 * (a + b);
  r.sup1 = dawson_integral(r.argmax1);

  r.sup2 = scaled_erfc_integral(0.0);
  r.argmax2 = 0.0;
  r.sup2_monotone = true;
  double prev = r.sup2;
  for (int i = 1; i <= 1000; ++i) {
    const double v = scaled_erfc_integral(0.01 * i);
    if (v > prev) r.sup2_monotone = false;
    if (v > r.sup2) {
      r.sup2 = v;
      r.argmax2 = 0.01 * i;
    }
    prev = v;
  }
  return r;
}

// ---------------------------------------------------- (u,b) versus (G,H)

GhRatios gh_equivalence_check(const Model& m, const Field& u, const Field& b, double t, double gamma,
                              double radius) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0,1)");
  const auto pp = reconstruct_phipsi(u, b);
  const auto gh = compute_gh(u, b, pp.first, pp.second, t, m.params.kappa);
  const Weighting wl{gamma * m.weight_a, t, radius};
  const Weighting wr{m.weight_a, t, radius};
  const auto& P = m.partition;
  const double st = std::sqrt(1.0 + t);

  const Field du = ddy(u), db = ddy(b), dG = ddy(gh.first), dH = ddy(gh.second);
  const std::vector<double> num[6] = {shell_norms(P, pp.first, wl),  shell_norms(P, u, wl), shell_norms(P, du, wl),
                                      shell_norms(P, pp.second, wl), shell_norms(P, b, wl), shell_norms(P, db, wl)};
  std::vector<double> den[6] = {shell_norms(P, gh.first, wr),  shell_norms(P, gh.first, wr),  shell_norms(P, dG, wr),
                                shell_norms(P, gh.second, wr), shell_norms(P, gh.second, wr), shell_norms(P, dH, wr)};
  for (int q : {0, 3})
    for (double& v : den[q]) v *= st;

  GhRatios r;
  const int ns = P.n_shells();
  r.shells.assign(ns, {});
  for (int q = 0; q < 6; ++q) {
    const double top = *std::max_element(den[q].begin(), den[q].end());
    for (int k = 0; k < ns; ++k) {
      if (!(den[q][k] > 1e-14 * top) || den[q][k] < 1e-300) continue;
      const double v = num[q][k] / den[q][k];
      r.shells[k][q] = v;
      r.max[q] = std::max(r.max[q], v);
      r.vacuous = false;
      if (!std::isfinite(v)) r.finite = false;
    }
  }
  return r;
}

// ------------------------------------------------------- Gevrey convexity

Spectrum1D Spectrum1D::from_half(double lx, std::span<const cplx> half) {
  Spectrum1D s;
  s.lx = lx;
  const int n = static_cast<int>(half.size()) - 1;
  s.c.assign(2 * n + 1, cplx{});
  for (int j = 0; j <= n; ++j) {
    s.c[n + j] = half[j];
    s.c[n - j] = std::conj(half[j]);
  }
  return s;
}

Spectrum1D convolve(const Spectrum1D& f, const Spectrum1D& g) {
  const int nf = f.n(), ng = g.n(), n = nf + ng;
  Spectrum1D h;
  h.lx = f.lx;
  h.c.assign(2 * n + 1, cplx{});
  for (int i = -nf; i <= nf; ++i) {
    const cplx a = f.c[i + nf];
    if (a == cplx{}) continue;
    for (int j = -ng; j <= ng; ++j) h.c[i + j + n] += a * g.c[j + ng];
  }
  return h;
}

ConvexityResult multiplier_convexity_check(const Spectrum1D& f, const Spectrum1D& g, double r) {
  if (r < 0.0) throw ConfigError("radius must be non-negative");
  Spectrum1D lhs = convolve(modulus_weighted(f, 0.0), modulus_weighted(g, 0.0));
  const int n = lhs.n();
  for (int j = -n; j <= n; ++j) lhs.c[j + n] *= std::exp(r * xi_of(lhs.lx, j));
  const Spectrum1D rhs = convolve(modulus_weighted(f, r), modulus_weighted(g, r));
  const auto [k0, ls] = shells_1d(lhs);
  const auto rs = shells_1d(rhs).second;
  ConvexityResult out;
  out.shells = static_cast<int>(ls.size());
  for (std::size_t k = 0; k < ls.size(); ++k) {
    if (rs[k] > 0.0)
      out.max_violation = std::max(out.max_violation, (ls[k] - rs[k]) / rs[k]);
    else if (ls[k] > 0.0)
      out.max_violation = std::numeric_limits<double>::infinity();
  }
  out.pass = out.max_violation <= 1e-10;
  return out;
}

std::pair<Spectrum1D, Spectrum1D> random_pair(std::uint64_t seed, int band, double lx) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> hf(band + 1), hg(band + 1);
  for (int j = 1; j <= band; ++j) {
    const double a = 1.0 / ((1.0 + j) * (1.0 + j));
    const double fr = u(rng), fi = u(rng), gr = u(rng), gi = u(rng);
    hf[j] = a * cplx(fr, fi);
    hg[j] = a * cplx(gr, gi);
  }
  return {Spectrum1D::from_half(lx, hf), Spectrum1D::from_half(lx, hg)};
}

// --------------------------------------------------------- product law

double besov_1d(const Spectrum1D& f, double s) {
  const auto [k0, sh] = shells_1d(f);
  double v = 0.0;
  for (std::size_t i = 0; i < sh.size(); ++i) v += std::pow(2.0, (k0 + static_cast<int>(i)) * s) * sh[i];
  return v;
}

double product_law_ratio(const Spectrum1D& f, const Spectrum1D& g) {
  const double nf = besov_1d(f, 0.5), ng = besov_1d(g, 0.5);
  if (nf == 0.0 || ng == 0.0) return 0.0;
  return besov_1d(convolve(f, g), 0.5) / (nf * ng);
}

// --------------------------------------------------------- decay fits

double sample_column(const SampleRow& r, std::string_view name) {
  if (name == "t") return r.t;
  if (name == "theta") return r.theta;
  if (name == "radius") return r.radius;
  if (name == "norm_ub") return r.norm_ub;
  if (name == "norm_gh") return r.norm_gh;
  if (name == "norm_dy_gh") return r.norm_dy_gh;
  if (name == "norm_phipsi") return r.norm_phipsi;
  if (name == "cl_dyub_sq") return r.cl_dyub_sq;
  if (name == "gh_integral") return r.gh_integral;
  if (name == "flux") return r.flux;
  throw ConfigError("unknown column: " + std::string(name));
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> value, double t1, double t2) {
  if (t.size() != value.size()) throw ConfigError("time and value columns differ in length");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t1 || t[i] > t2) continue;
    if (!(value[i] > 1e-300)) {
      std::ostringstream os;
      os << "value " << value[i] << " at t=" << t[i] << " is not positive enough for a log fit";
      throw ConfigError(os.str());
    }
    x.push_back(std::log1p(t[i]));
    y.push_back(std::log(value[i]));
  }
  const int n = static_cast<int>(x.size());
  if (n < 20) throw ConfigError("fit window holds " + std::to_string(n) + " samples, need at least 20");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  DecayFit f;
  f.samples = n;
  f.exponent = sxy / sxx;
  double ssr = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = y[i] - my - f.exponent * (x[i] - mx);
    ssr += e * e;
  }
  f.std_error = std::sqrt(ssr / (n - 2) / sxx);
  return f;
}

DecayFit fit_decay(const NormSeries& s, std::string_view column, double t1, double t2) {
  std::vector<double> t, v;
  for (const auto& r : s) {
    t.push_back(r.t);
    v.push_back(sample_column(r, column));
  }
  return fit_decay(t, v, t1, t2);
}

// ------------------------------------------------------- analytic band

ThetaReport theta_report(const NormSeries& s, const Params& p) {
  ThetaReport r;
  r.band_bound = p.delta / (2.0 * p.lambda);
  if (s.empty()) {
    r.band_ok = true;
    return r;
  }
  const SampleRow& last = s.back();
  const double half = 0.5 * last.t;
  const SampleRow* mid = &s.front();
  for (const auto& row : s)
    if (std::abs(row.t - half) < std::abs(mid->t - half)) mid = &row;
  r.theta_final = last.theta;
  r.theta_half = mid->theta;
  r.gh_integral = last.gh_integral;
  if (r.theta_final > 0.0) r.tail_fraction = (r.theta_final - mid->theta) / r.theta_final;
  if (r.gh_integral > 0.0) r.gh_tail_fraction = (r.gh_integral - mid->gh_integral) / r.gh_integral;
  r.band_ok = r.theta_final < r.band_bound;
  return r;
}

}  // namespace mhdbl
