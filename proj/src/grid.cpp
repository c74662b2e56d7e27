#include "mhdbl/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "mhdbl/errors.hpp"

namespace mhdbl {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW plans for one transform length. Plans are created once under a lock and
// then executed through the new-array interface, which is thread-safe.
class Plans {
 public:
  explicit Plans(int n) : n_(n) {
    std::vector<double> r(n);
    std::vector<fftw_complex> c(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c_ = fftw_plan_dft_r2c_1d(n, r.data(), c.data(), flags);
    c2r_ = fftw_plan_dft_c2r_1d(n, c.data(), r.data(), flags);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
  }

  void r2c(const double* in, cplx* out) const {
    thread_local std::vector<double> scratch;
    scratch.assign(in, in + n_);
    fftw_execute_dft_r2c(r2c_, scratch.data(), reinterpret_cast<fftw_complex*>(out));
  }
  void c2r(const cplx* in, double* out) const {
    thread_local std::vector<cplx> scratch;
    scratch.assign(in, in + n_ / 2 + 1);
    fftw_execute_dft_c2r(c2r_, reinterpret_cast<fftw_complex*>(scratch.data()), out);
  }

 private:
  int n_;
  fftw_plan r2c_;
  fftw_plan c2r_;
};

const Plans& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Plans>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plans>(n);
  return *slot;
}

void check_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("field grids differ");
}

}  // namespace

void GridSpec::validate() const {
  if (nx < 8 || !is_pow2(nx)) throw ConfigError("grid.nx must be a power of two >= 8, got " + std::to_string(nx));
  if (ny < 16) throw ConfigError("grid.ny must be >= 16, got " + std::to_string(ny));
  if (!(ymax > 4.0)) throw ConfigError("grid.ymax must exceed 4");
  if (!(lx > 0.0) || !std::isfinite(lx)) throw ConfigError("grid.lx must be positive");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) throw ConfigError("grid.dealias must lie in (0,1]");
}

int GridSpec::dealias_cutoff() const {
  const int c = static_cast<int>(std::floor(dealias_fraction * nx / 2.0 + 1e-12));
  return std::min(c, nx / 2 - 1);
}

Field::Field(const GridSpec& grid, Boundary bc)
    : grid_(grid), bc_(bc), coeffs_(static_cast<std::size_t>(grid.ny) * grid.n_modes(), cplx{0.0, 0.0}) {}

bool Field::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const cplx& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

double Field::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Field& Field::operator+=(const Field& o) {
  check_same_grid(*this, o);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  check_same_grid(*this, o);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

PhysicalField make_physical(const GridSpec& grid) {
  return PhysicalField{grid, std::vector<double>(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0)};
}

Field forward(const PhysicalField& f, Boundary bc) {
  const auto& g = f.grid;
  if (f.values.size() != static_cast<std::size_t>(g.nx) * g.ny)
    throw std::invalid_argument("physical field size does not match grid");
  Field out(g, bc);
  const auto& plans = plans_for(g.nx);
  const double inv_n = 1.0 / g.nx;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g.ny; ++i) {
    auto row = out.row(i);
    plans.r2c(f.values.data() + static_cast<std::size_t>(i) * g.nx, row.data());
    for (auto& c : row) c *= inv_n;
  }
  return out;
}

PhysicalField inverse(const Field& f) {
  const auto& g = f.grid();
  PhysicalField out = make_physical(g);
  const auto& plans = plans_for(g.nx);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g.ny; ++i) plans.c2r(f.row(i).data(), out.values.data() + static_cast<std::size_t>(i) * g.nx);
  return out;
}

std::vector<cplx> forward_row(const GridSpec& grid, std::span<const double> samples) {
  if (samples.size() != static_cast<std::size_t>(grid.nx)) throw std::invalid_argument("row size does not match grid.nx");
  std::vector<cplx> out(grid.n_modes());
  plans_for(grid.nx).r2c(samples.data(), out.data());
  for (auto& c : out) c /= grid.nx;
  return out;
}

std::vector<double> inverse_row(const GridSpec& grid, std::span<const cplx> modes) {
  if (modes.size() != static_cast<std::size_t>(grid.n_modes()))
    throw std::invalid_argument("mode count does not match grid");
  std::vector<double> out(grid.nx);
  plans_for(grid.nx).c2r(modes.data(), out.data());
  return out;
}

void dealias_row(const GridSpec& grid, std::span<cplx> modes) {
  const int cut = grid.dealias_cutoff();
  for (int j = cut + 1; j < static_cast<int>(modes.size()); ++j) modes[j] = 0.0;
}

void dealias(Field& f) {
  for (int i = 0; i < f.ny(); ++i) dealias_row(f.grid(), f.row(i));
}

Field ddx(const Field& f) {
  Field out(f.grid(), f.boundary());
  const auto& g = f.grid();
  for (int i = 0; i < g.ny; ++i)
    for (int j = 0; j < g.n_modes(); ++j) {
      // the Nyquist mode has no consistent real derivative
      const double k = (2 * j == g.nx) ? 0.0 : g.xi(j);
      out(i, j) = cplx{0.0, k} * f(i, j);
    }
  return out;
}

Field ddy(const Field& f) {
  const auto& g = f.grid();
  const int n = g.ny;
  const int m = g.n_modes();
  const double h = g.dy();
  Field out(g, f.boundary());
  for (int j = 0; j < m; ++j) {
    if (f.boundary() == Boundary::neumann)
      out(0, j) = 0.0;
    else
      out(0, j) = (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) / (2.0 * h);
    for (int i = 1; i < n - 1; ++i) out(i, j) = (f(i + 1, j) - f(i - 1, j)) / (2.0 * h);
    out(n - 1, j) = (3.0 * f(n - 1, j) - 4.0 * f(n - 2, j) + f(n - 3, j)) / (2.0 * h);
  }
  return out;
}

Field d2dy(const Field& f) {
  const auto& g = f.grid();
  const int n = g.ny;
  const int m = g.n_modes();
  const double h2 = g.dy() * g.dy();
  Field out(g, f.boundary());
  for (int j = 0; j < m; ++j) {
    // ghost node f_{-1}: odd reflection for Dirichlet, even for Neumann
    const cplx ghost = f.boundary() == Boundary::neumann ? f(1, j) : 2.0 * f(0, j) - f(1, j);
    out(0, j) = (f(1, j) - 2.0 * f(0, j) + ghost) / h2;
    for (int i = 1; i < n - 1; ++i) out(i, j) = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / h2;
    out(n - 1, j) = (2.0 * f(n - 1, j) - 5.0 * f(n - 2, j) + 4.0 * f(n - 3, j) - f(n - 4, j)) / h2;
  }
  return out;
}

Field integrate_y_tail(const Field& f) {
  const auto& g = f.grid();
  const int n = g.ny;
  const double half = 0.5 * g.dy();
  Field out(g, f.boundary());
  for (int j = 0; j < g.n_modes(); ++j) {
    out(n - 1, j) = 0.0;
    for (int i = n - 2; i >= 0; --i) out(i, j) = out(i + 1, j) + half * (f(i, j) + f(i + 1, j));
  }
  return out;
}

Field integrate_y_from0(const Field& f) {
  const auto& g = f.grid();
  const double half = 0.5 * g.dy();
  Field out(g, f.boundary());
  for (int j = 0; j < g.n_modes(); ++j) {
    out(0, j) = 0.0;
    for (int i = 1; i < g.ny; ++i) out(i, j) = out(i - 1, j) + half * (f(i - 1, j) + f(i, j));
  }
  return out;
}

std::vector<cplx> integrate_y_total(const Field& f) {
  const auto& g = f.grid();
  const double h = g.dy();
  std::vector<cplx> out(g.n_modes());
  for (int j = 0; j < g.n_modes(); ++j) {
    cplx s = 0.5 * (f(0, j) + f(g.ny - 1, j));
    for (int i = 1; i < g.ny - 1; ++i) s += f(i, j);
    out[j] = s * h;
  }
  return out;
}

Field multiply_y(const Field& f, std::span<const double> profile) {
  if (profile.size() != static_cast<std::size_t>(f.ny())) throw std::invalid_argument("profile size does not match ny");
  Field out = f;
  for (int i = 0; i < f.ny(); ++i)
    for (auto& c : out.row(i)) c *= profile[i];
  return out;
}

double psi(double t, double y) { return y * y / (8.0 * (1.0 + t)); }

namespace {

// |c| e^{w}, computed without forming e^{w} when that would overflow.
inline double weighted_abs(double mag, double w) {
  if (mag == 0.0) return 0.0;
  if (w < 600.0) return mag * std::exp(w);
  return std::exp(w + std::log(mag));
}

}  // namespace

std::vector<double> weighted_mode_energy(const Field& f, double a, double t) {
  const auto& g = f.grid();
  const int n = g.ny;
  std::vector<double> energy(g.n_modes(), 0.0);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = a * psi(t, g.y(i));
  for (int j = 0; j < g.n_modes(); ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = weighted_abs(std::abs(f(i, j)), w[i]);
      const double sq = v * v;
      if (!std::isfinite(sq))
        throw TailViolation("Psi-weighted field not representable at y=" + std::to_string(g.y(i)));
      s += (i == 0 || i == n - 1) ? 0.5 * sq : sq;
    }
    energy[j] = s * g.dy();
  }
  return energy;
}

Field apply_weight(const Field& f, double a, double t) {
  const auto& g = f.grid();
  Field out(g, f.boundary());
  for (int i = 0; i < g.ny; ++i) {
    const double w = a * psi(t, g.y(i));
    for (int j = 0; j < g.n_modes(); ++j) {
      const cplx c = f(i, j);
      if (c == cplx{0.0, 0.0}) continue;
      const cplx v = w < 600.0 ? c * std::exp(w) : std::polar(weighted_abs(std::abs(c), w), std::arg(c));
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw TailViolation("Psi-weighted field not representable at y=" + std::to_string(g.y(i)));
      out(i, j) = v;
    }
  }
  return out;
}

double inner_l2(const Field& f, const Field& h) {
  check_same_grid(f, h);
  const auto& g = f.grid();
  double s = 0.0;
  for (int i = 0; i < g.ny; ++i) {
    double row = 0.0;
    for (int j = 0; j < g.n_modes(); ++j) row += mode_multiplicity(g, j) * std::real(f(i, j) * std::conj(h(i, j)));
    s += (i == 0 || i == g.ny - 1) ? 0.5 * row : row;
  }
  return g.lx * g.dy() * s;
}

double weighted_l2(const Field& f, double a, double t) {
  const auto& g = f.grid();
  const auto e = weighted_mode_energy(f, a, t);
  double s = 0.0;
  for (int j = 0; j < g.n_modes(); ++j) s += mode_multiplicity(g, j) * e[j];
  return std::sqrt(g.lx * s);
}

double tail_ratio(const Field& f, double a, double t) {
  const auto& g = f.grid();
  double global = 0.0;
  double tail = 0.0;
  const double cut = 0.8 * g.ymax;
  for (int i = 0; i < g.ny; ++i) {
    double r2 = 0.0;
    for (int j = 0; j < g.n_modes(); ++j) r2 += mode_multiplicity(g, j) * std::norm(f(i, j));
    const double v = weighted_abs(std::sqrt(r2), a * psi(t, g.y(i)));
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    global = std::max(global, v);
    if (g.y(i) > cut) tail = std::max(tail, v);
  }
  return global > 0.0 ? tail / global : 0.0;
}

}  // namespace mhdbl
