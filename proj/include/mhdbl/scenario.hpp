#pragma once

// Physical setup: parameters, the cutoff chi(y), far fields (U,B), source
// terms and compatible initial data.

#include <optional>
#include <string>
#include <vector>

#include "mhdbl/grid.hpp"
#include "mhdbl/lp.hpp"

namespace mhdbl {

struct Params {
  double kappa = 1.0;
  double epsilon = 1e-3;
  double delta = 1.0;
  double lambda = 10.0;
  // Diffusivities of the u and b equations. nu_b <= 0 means kappa.
  double nu_u = 1.0;
  double nu_b = 0.0;

  double bbar() const { return kappa == 1.0 ? 1.0 : 0.0; }
  double diff_u() const { return nu_u; }
  double diff_b() const { return nu_b > 0.0 ? nu_b : kappa; }
  void validate() const;
};

// l_kappa = kappa(2-kappa)/4 on (0,2), ell_kappa = (2kappa-1)/(4kappa^2) on (1/2,inf).
struct DerivedExponents {
  std::optional<double> l_kappa;
  std::optional<double> ell_kappa;
};
DerivedExponents derived_exponents(const Params& p);

// chi(y) = int_0^y rho, rho = T(y-1) + c bump(y): zero below 1, y above 2.
class Cutoff {
 public:
  // Throws ConfigError when [1,2] holds fewer than 16 grid nodes.
  static Cutoff build(const GridSpec& grid);

  double chi(double y) const;
  double d1(double y) const;
  double d2(double y) const;
  double d3(double y) const;
  double bump_coefficient() const { return c_; }

  // Node samples, size ny.
  const std::vector<double>& chi_nodes() const { return chi_; }
  const std::vector<double>& d1_nodes() const { return d1_; }
  const std::vector<double>& d2_nodes() const { return d2_; }
  const std::vector<double>& d3_nodes() const { return d3_; }

 private:
  double c_ = 0.0;
  std::vector<double> chi_, d1_, d2_, d3_;
};

// Tangential far field. The shipped families are separable:
//   U(t,x) = amplitude <t>^{-alpha} g(x), B = 0,
// or identically zero.
class FarField {
 public:
  static FarField trivial(const GridSpec& grid);
  // g given by its half spectrum (zero mean). Requires bbar = 0.
  static FarField decaying(const GridSpec& grid, const Params& p, double amplitude, double alpha,
                           std::vector<cplx> g_modes);
  // g-hat(xi) = e^{-xi^2} on the nonzero retained modes.
  static std::vector<cplx> default_profile(const GridSpec& grid);

  bool is_trivial() const { return amplitude_ == 0.0; }
  const GridSpec& grid() const { return grid_; }
  double amplitude() const { return amplitude_; }
  double alpha() const { return alpha_; }
  const std::vector<cplx>& profile() const { return g_; }

  // Half spectra at time t.
  std::vector<cplx> U(double t) const;
  std::vector<cplx> B(double t) const;
  std::vector<cplx> dtU(double t) const;
  std::vector<cplx> dtB(double t) const;

  // || dt B1 + U1 dx B1 - B1 dx U1 ||_{B^{1/2}_h}, B1 = B + bbar.
  double bernoulli_residual(const DyadicPartition& p, double t, double bbar) const;

 private:
  GridSpec grid_;
  double amplitude_ = 0.0;
  double alpha_ = 0.0;
  std::vector<cplx> g_;
};

struct AssumptionReport {
  double linf_b32 = 0.0;   // || <t>^{9/4} e^{delta|D|}(U,B) ||_{L~inf(B^{3/2}_h)}
  double l2_b12 = 0.0;     // || <t>^{7/4} e^{delta|D|}(dtU,dtB,U,B) ||_{L~2(B^{1/2}_h)}
  double l1_b12 = 0.0;     // int <t>^{5/4} || e^{delta|D|}(U,B) ||_{B^{1/2}_h} dt
  bool decay_ok = false;   // first two summed <= epsilon
  bool integral_ok = false;
  bool pass() const { return decay_ok && integral_ok; }
};

// Quadrature on [0,horizon] plus the exact power-law tail beyond it.
AssumptionReport assumption_check(const FarField& ff, const DyadicPartition& p, double delta, double epsilon,
                                  double horizon);

// Amplitude that puts the decaying family with profile g at `fraction` of the
// epsilon budget.
double budget_amplitude(const DyadicPartition& p, const std::vector<cplx>& g, double alpha, double delta,
                        double epsilon, double fraction = 0.5);

struct SourceTerms {
  Field m_u, m_b, M_u, M_b;
};
// cutoff may be null only for the trivial far field.
SourceTerms source_terms(const FarField& ff, const Cutoff* cutoff, const Params& p, double t);

struct CompatibilityReport {
  double u0_wall = 0.0;         // max |u0(x,0)|
  double dyb0_wall = 0.0;       // max |dy b0(x,0)| (closed form)
  double int_u0 = 0.0;          // max_x |int_0^inf u0 dy| (adaptive quadrature)
  double int_b0 = 0.0;
  double int_u0_grid = 0.0;     // same with the grid trapezoid, informational
  double int_b0_grid = 0.0;
  double smallness = 0.0;       // || e^{a Psi(0)} e^{delta|D|}(G0,H0) ||_{B^{1/2,0}}
  double smallness_bound = 0.0; // sqrt(epsilon)
  double x_mean = 0.0;          // max |mean_x u0|, |mean_x b0|
  bool pass = false;
};

struct InitialData {
  Field u0, b0;
  CompatibilityReport report;
};

// u0 = eps a(x)(y - y^3/2)e^{-y^2/2}, b0 = eps a(x)(1 - y^2)e^{-y^2/2}; a given by
// its half spectrum (zero mean). weight_a is the y-weight multiple used by the
// smallness check. Throws ConfigError when a condition fails.
InitialData initial_data_standard(const GridSpec& grid, const Params& p, const std::vector<cplx>& a_modes,
                                  double weight_a);

}  // namespace mhdbl
