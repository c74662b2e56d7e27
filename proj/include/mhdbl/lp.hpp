#pragma once

// Littlewood-Paley analysis in the tangential variable x.

#include <span>
#include <vector>

#include "mhdbl/grid.hpp"

namespace mhdbl {

// Smooth profile pieces. chi is 1 on [0,3/4], 0 on [4/3,inf) and C^infinity;
// phi(tau) = chi(tau/2) - chi(tau) is supported in [3/4, 8/3].
double lp_chi(double tau);
double lp_phi(double tau);

class DyadicPartition {
 public:
  static DyadicPartition build(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  // Shells with nonempty support on the grid frequencies.
  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }
  int n_shells() const { return k_max_ - k_min_ + 1; }

  // phi(2^{-k} |xi_j|); zero for k outside [k_min, k_max] and for j = 0.
  double phi(int k, int j) const;
  // chi(2^{-k} |xi_j|).
  double chi(int k, int j) const;
  std::span<const double> phi_row(int k) const;

 private:
  GridSpec grid_;
  int k_min_ = 0;
  int k_max_ = -1;
  std::vector<double> table_;  // n_shells x n_modes
};

// Norm decorations shared by the Besov-type norms: the y-weight e^{a Psi(t,y)}
// and the Gevrey multiplier e^{radius |xi|}.
struct Weighting {
  double a = 0.0;
  double t = 0.0;
  double radius = 0.0;
};

Field lp_project(const DyadicPartition& p, const Field& f, int k);
Field lowpass(const DyadicPartition& p, const Field& f, int k);

// Per-shell || e^{a Psi} Delta_k f_Phi ||_{L^2_+}, indexed k - k_min. Several
// fields are combined as a vector (square root of the summed squares).
std::vector<double> shell_norms(const DyadicPartition& p, std::span<const Field* const> fields, const Weighting& w);
std::vector<double> shell_norms(const DyadicPartition& p, const Field& f, const Weighting& w = {});

// sum_k 2^{ks} || e^{a Psi} Delta_k f_Phi ||_{L^2_+}. The x-mean (xi = 0) is
// not part of any shell.
double besov_norm(const DyadicPartition& p, const Field& f, double s, const Weighting& w = {});
double besov_norm(const DyadicPartition& p, const Field& f, const Field& g, double s, const Weighting& w = {});
double besov_norm(const DyadicPartition& p, std::span<const Field* const> fields, double s, const Weighting& w);

// B^s_{2,1}(R) norm of an x-profile given by its half spectrum, with optional
// Gevrey radius.
double besov_h_norm(const DyadicPartition& p, std::span<const cplx> modes, double s, double radius = 0.0);

// Multiplication of every mode by e^{r |xi_j|}. Throws std::overflow_error if
// r |xi_max| is not representable and std::invalid_argument for r < 0.
Field gevrey_multiplier(const Field& f, double r);

// Product formed in physical space, truncated to the retained modes.
Field dealiased_product(const Field& f, const Field& g);

// Bony decomposition fg = T_f g + T_g f + R(f,g). The x-mean acts as the
// lowest block: it enters S_{k-1} in both paraproducts and R carries the
// mean-mean product.
struct Paraproduct {
  Field t_fg;
  Field t_gf;
  Field remainder;
};
Paraproduct paraproduct(const DyadicPartition& p, const Field& f, const Field& g);

// Time-integrated per-shell accumulator for (time-weighted) Chemin-Lerner norms:
//   sum_k 2^{ks} ( int w(t) ||Delta_k a(t)||^p dt )^{1/p},
// p = infinity keeping a running max of w(t) ||Delta_k a(t)||.
class CLAccumulator {
 public:
  static constexpr double infinity_p = 0.0;

  CLAccumulator() = default;
  CLAccumulator(int k_min, int n_shells, double s, double p);

  // Left-endpoint update with the shell norms at the start of the step.
  void add(std::span<const double> shell_norms, double dt, double weight = 1.0);
  double norm() const;

  double s() const { return s_; }
  double p() const { return p_; }
  int k_min() const { return k_min_; }
  const std::vector<double>& sums() const { return sums_; }
  std::vector<double>& sums() { return sums_; }

 private:
  int k_min_ = 0;
  double s_ = 0.5;
  double p_ = 2.0;
  std::vector<double> sums_;
};

}  // namespace mhdbl
