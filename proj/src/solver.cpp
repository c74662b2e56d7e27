#include "mhdbl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mhdbl/errors.hpp"

namespace mhdbl {

namespace {

struct XProfiles {
  std::vector<double> U, B, Ux, Bx;
};

XProfiles farfield_rows(const FarField& ff, double t) {
  const auto& g = ff.grid();
  auto u = ff.U(t), b = ff.B(t);
  std::vector<cplx> ux(u.size()), bx(b.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double k = (2 * static_cast<int>(j) == g.nx) ? 0.0 : g.xi(static_cast<int>(j));
    ux[j] = cplx{0.0, k} * u[j];
    bx[j] = cplx{0.0, k} * b[j];
  }
  return {inverse_row(g, u), inverse_row(g, b), inverse_row(g, ux), inverse_row(g, bx)};
}

Field from_physical(PhysicalField&& p, Boundary bc) {
  Field f = forward(p, bc);
  dealias(f);
  return f;
}

// Tridiagonal system (I - r L) x = d for the diffusion of one field, where L
// is the second difference with the boundary closure of the tag. The matrix is
// real and shared by every x-mode.
class DiffusionSolve {
 public:
  DiffusionSolve(int ny, double r, Boundary bc) : bc_(bc) {
    first_ = bc == Boundary::neumann ? 0 : 1;
    const int last = ny - 2;
    n_ = last - first_ + 1;
    a_.assign(n_, -r);
    b_.assign(n_, 1.0 + 2.0 * r);
    c_.assign(n_, -r);
    if (bc == Boundary::neumann) c_[0] = -2.0 * r;  // even ghost b_{-1} = b_1
    // forward elimination coefficients
    cp_.resize(n_);
    den_.resize(n_);
    den_[0] = b_[0];
    cp_[0] = c_[0] / den_[0];
    for (int k = 1; k < n_; ++k) {
      den_[k] = b_[k] - a_[k] * cp_[k - 1];
      cp_[k] = c_[k] / den_[k];
    }
  }

  int first() const { return first_; }
  int size() const { return n_; }

  void solve(std::vector<cplx>& d) const {
    d[0] /= den_[0];
    for (int k = 1; k < n_; ++k) d[k] = (d[k] - a_[k] * d[k - 1]) / den_[k];
    for (int k = n_ - 2; k >= 0; --k) d[k] -= cp_[k] * d[k + 1];
  }

 private:
  Boundary bc_;
  int first_ = 1;
  int n_ = 0;
  std::vector<double> a_, b_, c_, cp_, den_;
};

// x^{n+1} = (I - r L)^{-1} [(I + r L) x^n + dt E], r = dt nu / (2 dy^2).
Field crank_nicolson(const Field& x, const Field& e, double dt, double nu) {
  const auto& g = x.grid();
  const double h2 = g.dy() * g.dy();
  const double r = 0.5 * dt * nu / h2;
  const DiffusionSolve sys(g.ny, r, x.boundary());
  const int first = sys.first();
  const int n = sys.size();
  Field out(g, x.boundary());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.n_modes(); ++j) {
    std::vector<cplx> d(n);
    for (int k = 0; k < n; ++k) {
      const int i = first + k;
      const cplx below = i == 0 ? x(1, j) : x(i - 1, j);  // Neumann ghost at i = 0
      const cplx lap = below - 2.0 * x(i, j) + x(i + 1, j);
      d[k] = x(i, j) + r * lap + dt * e(i, j);
    }
    sys.solve(d);
    for (int k = 0; k < n; ++k) out(first + k, j) = d[k];
  }
  return out;
}

void check_finite(const State& s) {
  if (!s.u.all_finite() || !s.b.all_finite()) {
    std::ostringstream os;
    os << "non-finite values at t=" << s.t;
    throw Divergence(os.str());
  }
}

}  // namespace

Model Model::make(const GridSpec& grid, const Params& params, FarField farfield, double weight_a) {
  grid.validate();
  params.validate();
  Model m;
  m.grid = grid;
  m.params = params;
  if (!farfield.is_trivial()) m.cutoff = Cutoff::build(grid);
  m.farfield = std::move(farfield);
  m.partition = DyadicPartition::build(grid);
  m.weight_a = weight_a;
  return m;
}

State make_state(const Model& m, Field u0, Field b0) {
  if (!(u0.grid() == m.grid) || !(b0.grid() == m.grid)) throw std::invalid_argument("initial data grid mismatch");
  State s;
  u0.set_boundary(Boundary::dirichlet);
  b0.set_boundary(Boundary::neumann);
  dealias(u0);
  dealias(b0);
  for (int j = 0; j < m.grid.n_modes(); ++j) {
    u0(0, j) = 0.0;
    u0(m.grid.ny - 1, j) = 0.0;
    b0(m.grid.ny - 1, j) = 0.0;
  }
  s.u = std::move(u0);
  s.b = std::move(b0);
  s.nu_prev = Field(m.grid, Boundary::dirichlet);
  s.nb_prev = Field(m.grid, Boundary::neumann);
  return s;
}

double radius(const Model& m, const State& s) { return m.params.delta - m.params.lambda * s.theta; }

double column_flux(const Field& u) {
  double worst = 0.0;
  for (double v : inverse_row(u.grid(), integrate_y_total(u))) worst = std::max(worst, std::abs(v));
  return worst;
}

FieldPair recover_vh(const Field& u, const Field& b, double flux_tol) {
  if (std::isfinite(flux_tol)) {
    const double fu = column_flux(u);
    const double fb = column_flux(b);
    if (fu > flux_tol || fb > flux_tol) {
      std::ostringstream os;
      os << "column flux " << std::max(fu, fb) << " exceeds tolerance " << flux_tol;
      throw IntegrityError(os.str());
    }
  }
  Field v = -1.0 * ddx(integrate_y_from0(u));
  Field h = -1.0 * ddx(integrate_y_from0(b));
  v.set_boundary(Boundary::dirichlet);
  h.set_boundary(Boundary::dirichlet);
  return {std::move(v), std::move(h)};
}

FieldPair reconstruct_phipsi(const Field& u, const Field& b) {
  Field phi = -1.0 * integrate_y_tail(u);
  Field psi = -1.0 * integrate_y_tail(b);
  phi.set_boundary(Boundary::dirichlet);
  psi.set_boundary(Boundary::dirichlet);
  return {std::move(phi), std::move(psi)};
}

FieldPair compute_gh(const Field& u, const Field& b, const Field& phi, const Field& psi, double t, double kappa) {
  const auto& g = u.grid();
  std::vector<double> cu(g.ny), cb(g.ny);
  for (int i = 0; i < g.ny; ++i) {
    cu[i] = g.y(i) / (2.0 * (1.0 + t));
    cb[i] = cu[i] / kappa;
  }
  Field G = u + multiply_y(phi, cu);
  Field H = b + multiply_y(psi, cb);
  G.set_boundary(Boundary::dirichlet);
  H.set_boundary(Boundary::neumann);
  return {std::move(G), std::move(H)};
}

FieldPair rhs_explicit(const Model& m, const Field& u, const Field& b, double t) {
  const auto& g = m.grid;
  const auto vh = recover_vh(u, b);
  const auto pu = inverse(u), pb = inverse(b);
  const auto pux = inverse(ddx(u)), pbx = inverse(ddx(b));
  const auto puy = inverse(ddy(u)), pby = inverse(ddy(b));
  const auto pv = inverse(vh.first), ph = inverse(vh.second);

  const bool far = !m.farfield.is_trivial();
  XProfiles ff;
  if (far) ff = farfield_rows(m.farfield, t);
  const Cutoff* cut = m.cutoff_ptr();

  auto nu = make_physical(g), nb = make_physical(g);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g.ny; ++i) {
    const double c0 = far ? cut->chi_nodes()[i] : 0.0;
    const double c1 = far ? cut->d1_nodes()[i] : 0.0;
    const double c2 = far ? cut->d2_nodes()[i] : 0.0;
    for (int n = 0; n < g.nx; ++n) {
      const double uu = pu(i, n), bb = pb(i, n), ux = pux(i, n), bx = pbx(i, n);
      const double uy = puy(i, n), by = pby(i, n), v = pv(i, n), h = ph(i, n);
      double au = -(uu * ux - bb * bx + v * uy - h * by);
      double ab = -(uu * bx - bb * ux + v * by - h * uy);
      if (far) {
        const double U = ff.U[n], B = ff.B[n], Ux = ff.Ux[n], Bx = ff.Bx[n];
        au -= c1 * (U * ux - B * bx) + c1 * (Ux * uu - Bx * bb) + c0 * (-Ux * uy + Bx * by) + c2 * (U * v - B * h);
        ab -= c1 * (U * bx - B * ux) + c1 * (Bx * uu - Ux * bb) + c0 * (-Ux * by + Bx * uy) + c2 * (B * v - U * h);
      }
      nu(i, n) = au;
      nb(i, n) = ab;
    }
  }
  Field tu = from_physical(std::move(nu), Boundary::dirichlet);
  Field tb = from_physical(std::move(nb), Boundary::neumann);

  const double bbar = m.params.bbar();
  if (bbar != 0.0) {
    tu += bbar * ddx(b);
    tb += bbar * ddx(u);
  }
  if (far) {
    const auto src = source_terms(m.farfield, cut, m.params, t);
    tu += src.m_u;
    tb += src.m_b;
  }
  return {std::move(tu), std::move(tb)};
}

double choose_dt(const Model& m, const State& s, double dt_max, double cfl) {
  double umax = 0.0;
  for (double v : inverse(s.u).values) umax = std::max(umax, std::abs(v));
  double Umax = 0.0;
  if (!m.farfield.is_trivial())
    for (double v : inverse_row(m.grid, m.farfield.U(s.t))) Umax = std::max(Umax, std::abs(v));
  const double speed = umax + Umax;
  if (speed == 0.0) return dt_max;
  return std::min(dt_max, cfl * m.grid.dx() / speed);
}

ThetaRate theta_rhs(const Model& m, const Field& u, const Field& b, double t, double r) {
  ThetaRate rate;
  if (r < 0.0) r = 0.0;
  const auto pp = reconstruct_phipsi(u, b);
  const auto gh = compute_gh(u, b, pp.first, pp.second, t, m.params.kappa);
  const Field dG = ddy(gh.first);
  const Field dH = ddy(gh.second);
  const Field* fs[] = {&dG, &dH};
  rate.gh_term = std::pow(1.0 + t, 0.25) * besov_norm(m.partition, fs, 0.5, {m.weight_a, t, r});
  if (!m.farfield.is_trivial()) {
    const auto U = m.farfield.U(t), B = m.farfield.B(t);
    std::vector<cplx> mag(U.size());
    for (std::size_t j = 0; j < U.size(); ++j) mag[j] = std::sqrt(std::norm(U[j]) + std::norm(B[j]));
    rate.ff_term = std::pow(1.0 + t, 1.25) / std::sqrt(m.params.epsilon) * besov_h_norm(m.partition, mag, 0.5, r);
  }
  return rate;
}

StepInfo step_imex(const Model& m, State& s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const double r0 = radius(m, s);
  if (r0 <= 0.0) throw RadiusExhausted("analytic radius exhausted before the step");
  const double nu = m.params.diff_u();
  const double nb = m.params.diff_b();

  auto n0 = rhs_explicit(m, s.u, s.b, s.t);
  Field u1, b1;
  if (!s.has_history) {
    const Field us = crank_nicolson(s.u, n0.first, dt, nu);
    const Field bs = crank_nicolson(s.b, n0.second, dt, nb);
    const auto ns = rhs_explicit(m, us, bs, s.t + dt);
    u1 = crank_nicolson(s.u, 0.5 * (n0.first + ns.first), dt, nu);
    b1 = crank_nicolson(s.b, 0.5 * (n0.second + ns.second), dt, nb);
  } else {
    const double w = dt / s.dt_prev;
    const Field eu = (1.0 + 0.5 * w) * n0.first - (0.5 * w) * s.nu_prev;
    const Field eb = (1.0 + 0.5 * w) * n0.second - (0.5 * w) * s.nb_prev;
    u1 = crank_nicolson(s.u, eu, dt, nu);
    b1 = crank_nicolson(s.b, eb, dt, nb);
  }
  s.u = std::move(u1);
  s.b = std::move(b1);
  s.nu_prev = std::move(n0.first);
  s.nb_prev = std::move(n0.second);
  s.has_history = true;
  s.dt_prev = dt;
  s.t += dt;
  s.step += 1;
  check_finite(s);

  const auto rate = theta_rhs(m, s.u, s.b, s.t, r0);
  s.theta += dt * rate.total();
  if (!std::isfinite(s.theta)) throw Divergence("theta is not finite");
  if (radius(m, s) <= 0.0) {
    std::ostringstream os;
    os << "analytic radius exhausted at t=" << s.t << " (theta=" << s.theta << ")";
    throw RadiusExhausted(os.str());
  }
  return {dt, rate.total(), rate.gh_term, rate.ff_term};
}

GridSpec kappa_rescaled_grid(const GridSpec& g, double kappa) {
  GridSpec out = g;
  out.ymax = g.ymax / std::sqrt(kappa);
  return out;
}

Field kappa_rescale_map(const Field& f, double kappa, const GridSpec& target) {
  const auto& src = f.grid();
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (target.nx != src.nx || target.lx != src.lx || target.dealias_fraction != src.dealias_fraction)
    throw ConfigError("rescaling target must share the x grid");
  const double sk = std::sqrt(kappa);
  if (sk * target.dy() > 2.0 * src.dy() * (1.0 + 1e-12))
    throw ConfigError("rescaling target under-resolves the source in y");
  Field out(target, f.boundary());
  const double h = src.dy();
  for (int i = 0; i < target.ny; ++i) {
    const double y = sk * target.y(i);
    if (y > src.ymax * (1.0 + 1e-12)) continue;
    const double pos = y / h;
    const int near = static_cast<int>(std::lround(pos));
    if (std::abs(pos - near) < 1e-9 && near < src.ny) {
      for (int j = 0; j < src.n_modes(); ++j) out(i, j) = f(near, j);
      continue;
    }
    int k0 = static_cast<int>(std::floor(pos)) - 1;
    k0 = std::clamp(k0, 0, src.ny - 4);
    double w[4];
    for (int a = 0; a < 4; ++a) {
      w[a] = 1.0;
      for (int c = 0; c < 4; ++c)
        if (c != a) w[a] *= (pos - (k0 + c)) / static_cast<double>(a - c);
    }
    for (int j = 0; j < src.n_modes(); ++j) {
      cplx v = 0.0;
      for (int a = 0; a < 4; ++a) v += w[a] * f(k0 + a, j);
      out(i, j) = v;
    }
  }
  return out;
}

Eqs2Residual eqs2_residual(const Model& m, const State& before, const State& after) {
  const auto& g = m.grid;
  const double dt = after.t - before.t;
  if (!(dt > 0.0)) throw std::invalid_argument("states must be in increasing time order");
  const auto p0 = reconstruct_phipsi(before.u, before.b);
  const auto p1 = reconstruct_phipsi(after.u, after.b);
  const Field& u = after.u;
  const Field& b = after.b;
  const Field& phi = p1.first;
  const Field& psi = p1.second;
  const double t = after.t;

  const Field phix = ddx(phi), psix = ddx(psi);
  const auto pu = inverse(u), pb = inverse(b);
  const auto pphi = inverse(phi), ppsi = inverse(psi);
  const auto pphix = inverse(phix), ppsix = inverse(psix);
  const auto puy = inverse(ddy(u)), pby = inverse(ddy(b));

  const bool far = !m.farfield.is_trivial();
  XProfiles ff;
  if (far) ff = farfield_rows(m.farfield, t);
  const Cutoff* cut = m.cutoff_ptr();

  // local terms, and integrands of the tail integrals
  auto lphi = make_physical(g), lpsi = make_physical(g), tail1 = make_physical(g), tail2 = make_physical(g);
  for (int i = 0; i < g.ny; ++i) {
    const double c0 = far ? cut->chi_nodes()[i] : 0.0;
    const double c1 = far ? cut->d1_nodes()[i] : 0.0;
    const double c2 = far ? cut->d2_nodes()[i] : 0.0;
    for (int n = 0; n < g.nx; ++n) {
      const double uu = pu(i, n), bb = pb(i, n), fx = pphix(i, n), sx = ppsix(i, n);
      double a = uu * fx - bb * sx;
      double c = uu * sx - bb * fx;
      tail1(i, n) = fx * puy(i, n) - sx * pby(i, n);
      if (far) {
        const double U = ff.U[n], B = ff.B[n], Ux = ff.Ux[n], Bx = ff.Bx[n];
        const double f = pphi(i, n), s = ppsi(i, n);
        a += c1 * (U * fx - B * sx) + c0 * (-Ux * uu + Bx * bb) + 2.0 * c1 * (Ux * f - Bx * s);
        c += c1 * (U * sx - B * fx) + c0 * (-Ux * bb + Bx * uu);
        tail2(i, n) = c2 * (U * fx - B * sx) + c2 * (Ux * f - Bx * s);
      }
      lphi(i, n) = a;
      lpsi(i, n) = c;
    }
  }
  Field rphi = (1.0 / dt) * (phi - p0.first);
  Field rpsi = (1.0 / dt) * (psi - p0.second);
  // dyy phi = dy u, dyy psi = dy b
  rphi -= m.params.diff_u() * ddy(u);
  rpsi -= m.params.diff_b() * ddy(b);
  const double bbar = m.params.bbar();
  if (bbar != 0.0) {
    rphi -= bbar * psix;
    rpsi -= bbar * phix;
  }
  rphi += from_physical(std::move(lphi), Boundary::dirichlet);
  rpsi += from_physical(std::move(lpsi), Boundary::dirichlet);
  rphi += 2.0 * integrate_y_tail(from_physical(std::move(tail1), Boundary::dirichlet));
  if (far) {
    rphi += 2.0 * integrate_y_tail(from_physical(std::move(tail2), Boundary::dirichlet));
    const auto src = source_terms(m.farfield, cut, m.params, t);
    rphi -= src.M_u;
    rpsi -= src.M_b;
  }
  return {besov_norm(m.partition, rphi, 0.5), besov_norm(m.partition, rpsi, 0.5)};
}

double heat_energy_slack(const Field& f0, const Field& f1, double t0, double t1, double alpha, double beta) {
  const double dt = t1 - t0;
  const double tm = 0.5 * (t0 + t1);
  const Field fm = 0.5 * (f0 + f1);
  const Field dtf = (1.0 / dt) * (f1 - f0);
  const Field lhs_vec = dtf - beta * d2dy(fm);
  const Field wfm = apply_weight(fm, alpha, tm);
  const double lhs = inner_l2(apply_weight(lhs_vec, alpha, tm), wfm);
  const Field w1 = apply_weight(f1, alpha, t1);
  const Field w0 = apply_weight(f0, alpha, t0);
  const double ddt = 0.5 * (inner_l2(w1, w1) - inner_l2(w0, w0)) / dt;
  const Field wdy = apply_weight(ddy(fm), alpha, tm);
  const double dy2 = inner_l2(wdy, wdy);
  const double rhs = ddt + (beta - 0.5 * beta * beta * alpha) * dy2;
  const double scale = dy2 + inner_l2(wfm, wfm) / (1.0 + tm);
  if (scale == 0.0) return 0.0;
  return (lhs - rhs) / scale;
}

}  // namespace mhdbl
