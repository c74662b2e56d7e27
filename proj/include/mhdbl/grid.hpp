#pragma once

// Discretization of the half plane R_x x R+_y: periodic in x (length lx),
// uniform nodes on [0, ymax] in y. A Field stores the x-Fourier coefficients
// of a real function for the non-negative frequencies j = 0..nx/2 on every
// y node; negative frequencies are implied by Hermitian symmetry.

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace mhdbl {

using cplx = std::complex<double>;

struct GridSpec {
  double lx = 2.0 * std::numbers::pi;
  int nx = 64;
  double ymax = 12.0;
  int ny = 256;
  double dealias_fraction = 2.0 / 3.0;

  // Throws ConfigError when an invariant is violated.
  void validate() const;

  int n_modes() const { return nx / 2 + 1; }
  double dy() const { return ymax / (ny - 1); }
  double dx() const { return lx / nx; }
  double y(int i) const { return i * dy(); }
  double x(int n) const { return n * dx(); }
  // |xi_j| for j >= 0.
  double xi(int j) const { return 2.0 * std::numbers::pi * j / lx; }
  // Largest retained mode index under the dealiasing rule.
  int dealias_cutoff() const;

  bool operator==(const GridSpec&) const = default;
};

// Boundary tag: u-type fields vanish at y=0, b-type fields have zero normal
// derivative at y=0. Both are set to zero at ymax.
enum class Boundary { dirichlet, neumann };

class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid, Boundary bc = Boundary::dirichlet);

  const GridSpec& grid() const { return grid_; }
  Boundary boundary() const { return bc_; }
  void set_boundary(Boundary bc) { bc_ = bc; }

  int ny() const { return grid_.ny; }
  int nm() const { return grid_.n_modes(); }

  cplx& operator()(int i, int j) { return coeffs_[static_cast<std::size_t>(i) * nm() + j]; }
  cplx operator()(int i, int j) const { return coeffs_[static_cast<std::size_t>(i) * nm() + j]; }

  std::span<cplx> row(int i) { return {coeffs_.data() + static_cast<std::size_t>(i) * nm(), static_cast<std::size_t>(nm())}; }
  std::span<const cplx> row(int i) const {
    return {coeffs_.data() + static_cast<std::size_t>(i) * nm(), static_cast<std::size_t>(nm())};
  }

  std::vector<cplx>& coeffs() { return coeffs_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  bool all_finite() const;
  double max_abs() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);

 private:
  GridSpec grid_;
  Boundary bc_ = Boundary::dirichlet;
  std::vector<cplx> coeffs_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

// Real samples on the nx-by-ny node lattice, y-major: values[i*nx + n] = f(x_n, y_i).
struct PhysicalField {
  GridSpec grid;
  std::vector<double> values;

  double& operator()(int i, int n) { return values[static_cast<std::size_t>(i) * grid.nx + n]; }
  double operator()(int i, int n) const { return values[static_cast<std::size_t>(i) * grid.nx + n]; }
};

PhysicalField make_physical(const GridSpec& grid);

// --- transforms -----------------------------------------------------------

// Normalisation: f(x) = sum_j c_j e^{i xi_j x}, so a constant 1 has c_0 = 1
// and cos(xi_1 x) has c_{+-1} = 1/2.
Field forward(const PhysicalField& f, Boundary bc = Boundary::dirichlet);
PhysicalField inverse(const Field& f);

// 1-D versions for x-profiles (far-field traces).
std::vector<cplx> forward_row(const GridSpec& grid, std::span<const double> samples);
std::vector<double> inverse_row(const GridSpec& grid, std::span<const cplx> modes);

// Zero all modes above the dealiasing cutoff (and the Nyquist mode).
void dealias(Field& f);
void dealias_row(const GridSpec& grid, std::span<cplx> modes);

// --- derivatives and y-integrals -----------------------------------------

Field ddx(const Field& f);
// First derivative in y: centred in the interior, one-sided second order at
// the ends (zero at y=0 for Neumann fields).
Field ddy(const Field& f);
// Second derivative in y with ghost closure from the boundary tag.
Field d2dy(const Field& f);
// int_y^{ymax} f dy' (cumulative trapezoid from the top).
Field integrate_y_tail(const Field& f);
// int_0^y f dy' (cumulative trapezoid from the bottom).
Field integrate_y_from0(const Field& f);
// Per-mode int_0^{ymax} f dy (trapezoid), size nm.
std::vector<cplx> integrate_y_total(const Field& f);

// Pointwise multiplication by a y-profile (size ny).
Field multiply_y(const Field& f, std::span<const double> profile);

// --- weighted quadrature --------------------------------------------------

// Psi(t,y) = y^2 / (8 <t>), <t> = 1 + t.
double psi(double t, double y);

// I_j = int_0^{ymax} e^{2 a Psi(t,y)} |c_j(y)|^2 dy for every mode j
// (trapezoid, ascending y). Weighted magnitudes are formed in log space so the
// weight itself may exceed the double range wherever the field is small
// enough; a non-representable product raises TailViolation.
std::vector<double> weighted_mode_energy(const Field& f, double a, double t);

// || e^{a Psi(t,.)} f ||_{L^2(R^2_+)} with the exact Parseval sum in x.
double weighted_l2(const Field& f, double a, double t);

// e^{a Psi(t,y)} f pointwise; throws TailViolation if not representable.
Field apply_weight(const Field& f, double a, double t);

// Real L2(R^2_+) inner product (f | g) with exact Parseval sum in x, trapezoid in y.
double inner_l2(const Field& f, const Field& g);

// max_{y > 0.8 ymax} |e^{a Psi} f|_{row} / max_y |e^{a Psi} f|_{row}; 0 for a zero field.
double tail_ratio(const Field& f, double a, double t);

// Parseval multiplicity of mode j in the half spectrum (1 for j=0 and the
// Nyquist mode, else 2).
inline double mode_multiplicity(const GridSpec& grid, int j) { return (j == 0 || 2 * j == grid.nx) ? 1.0 : 2.0; }

}  // namespace mhdbl
