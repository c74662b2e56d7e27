#pragma once

// Stand-alone numerical checks: weighted Poincare inequalities, the two sup
// constants, (u,b) versus (G,H) ratios, the Gevrey convexity inequality, the
// tangential product law, decay-exponent fits and the analytic-band report.

#include <array>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mhdbl/lp.hpp"
#include "mhdbl/run.hpp"
#include "mhdbl/solver.hpp"

namespace mhdbl {

// ---------------------------------------------------------------- Poincare

// A y-profile on [0, extent] given by closed forms for f and f'.
struct YProfile {
  std::function<double(double)> f;
  std::function<double(double)> df;
  double extent = 20.0;
};

// sum_m c_m exp(-(y - mu_m)^2 / (2 s_m^2))
struct GaussianMixture {
  std::vector<double> c, mu, s;
  YProfile profile() const;
};

// With W = e^{Psi_kappa}, Psi_kappa = y^2 / (8 kappa <t>):
//   lhs  = ||W dy f||^2
//   rhs1 = ||W f||^2 / (2 kappa <t>)
//   rhs2 = ||W f||^2 / (4 kappa <t>) + ||W y f||^2 / (16 kappa^2 <t>^2)
struct PoincareResult {
  double lhs = 0.0, rhs1 = 0.0, rhs2 = 0.0;
  double slack1 = 0.0, slack2 = 0.0;  // (lhs - rhs) / lhs, 0 for f = 0
  bool pass1 = false, pass2 = false;
  bool pass() const { return pass1 && pass2; }
};

inline constexpr double kPoincareTol = 1e-10;

// nodes = 0: adaptive Gauss-Kronrod; nodes > 0: trapezoid on that many
// uniform nodes. Throws TailViolation when the weighted profile is not
// negligible at the extent.
PoincareResult poincare_check(const YProfile& f, double t, double kappa, int nodes = 0);

struct PoincareCase {
  int mixture = 0;
  double t = 0.0, kappa = 1.0;
  PoincareResult result;
};
struct PoincareSuite {
  std::vector<PoincareCase> cases;
  double min_slack = 0.0;
  int failures = 0;
};
// n_mixtures random mixtures x t in {0,1,10} x kappa in {0.8,1,1.5}. Widths are
// drawn so the weighted profiles stay integrable for every (t,kappa).
PoincareSuite poincare_suite(std::uint64_t seed, int n_mixtures = 50);

// ------------------------------------------------------------ sup constants

struct SupConstants {
  double sup1 = 0.0, argmax1 = 0.0;  // sup_y e^{-y^2} int_0^y e^{z^2} dz
  double sup2 = 0.0, argmax2 = 0.0;  // sup_y e^{y^2} int_y^inf e^{-z^2} dz
  bool sup2_monotone = false;        // nonincreasing on the scan
};
double dawson_integral(double y);      // e^{-y^2} int_0^y e^{z^2} dz
double scaled_erfc_integral(double y);  // e^{y^2} int_y^inf e^{-z^2} dz
SupConstants sup_constants();

// ---------------------------------------------------- (u,b) versus (G,H)

// Six ratios per shell k, lhs weighted by e^{gamma a Psi}, rhs by e^{a Psi}:
//   0: ||phi|| / (<t>^{1/2} ||G||)   1: ||u|| / ||G||   2: ||dy u|| / ||dy G||
//   3: ||psi|| / (<t>^{1/2} ||H||)   4: ||b|| / ||H||   5: ||dy b|| / ||dy H||
// Shells whose denominator is below 1e-14 of the largest shell of that pair
// are skipped (no content to compare).
struct GhRatios {
  std::vector<std::array<double, 6>> shells;
  std::array<double, 6> max{};
  bool vacuous = true;  // no shell carried content
  bool finite = true;
};
GhRatios gh_equivalence_check(const Model& m, const Field& u, const Field& b, double t, double gamma,
                              double radius = 0.0);

// ------------------------------------------------------- Gevrey convexity

// Full x-spectrum c_j, j = -n..n, of a real 1-D profile on a period lx.
struct Spectrum1D {
  double lx = 2.0 * std::numbers::pi;
  std::vector<cplx> c;  // index j + n
  int n() const { return static_cast<int>(c.size() / 2); }
  static Spectrum1D from_half(double lx, std::span<const cplx> half);
};
Spectrum1D convolve(const Spectrum1D& f, const Spectrum1D& g);

// Per shell, ||phi_k e^{r|xi|} (|f^| * |g^|)|| <= ||phi_k (e^{r|xi|}|f^|) * (e^{r|xi|}|g^|)||,
// by direct convolution. max_violation is the largest (lhs - rhs) / rhs.
struct ConvexityResult {
  int shells = 0;
  double max_violation = 0.0;
  bool pass = false;
};
ConvexityResult multiplier_convexity_check(const Spectrum1D& f, const Spectrum1D& g, double r);

// Random band-limited pair: modes 1..band with amplitude (1+j)^{-2}. The
// draws for mode j do not depend on band, so raising band refines the pair.
std::pair<Spectrum1D, Spectrum1D> random_pair(std::uint64_t seed, int band, double lx = 2.0 * std::numbers::pi);

// --------------------------------------------------------- product law

// sum_k 2^{ks} ||Delta_k f||_{L^2}, shells over the full spectrum.
double besov_1d(const Spectrum1D& f, double s);
// ||fg||_{B^{1/2}} / (||f||_{B^{1/2}} ||g||_{B^{1/2}}); 0 when f or g is zero.
double product_law_ratio(const Spectrum1D& f, const Spectrum1D& g);

// --------------------------------------------------------- decay fits

// Column of norms.csv by name; throws ConfigError for an unknown name.
double sample_column(const SampleRow& r, std::string_view name);
inline const char* kNormColumns[] = {"t", "theta", "radius", "norm_ub", "norm_gh", "norm_dy_gh", "norm_phipsi",
                                     "cl_dyub_sq"};

struct DecayFit {
  double exponent = 0.0;
  double std_error = 0.0;
  int samples = 0;
};
// OLS slope of log(value) against log<t> over samples with t in [t1, t2].
// Throws ConfigError for fewer than 20 samples or a value <= 1e-300.
DecayFit fit_decay(std::span<const double> t, std::span<const double> value, double t1, double t2);
DecayFit fit_decay(const NormSeries& s, std::string_view column, double t1, double t2);

// ------------------------------------------------------- analytic band

struct ThetaReport {
  double theta_final = 0.0;
  double theta_half = 0.0;
  double tail_fraction = 0.0;     // (theta(T) - theta(T/2)) / theta(T)
  double gh_integral = 0.0;       // int_0^T <tau>^{1/4} ||e^{a Psi} dy(G,H)_Phi||
  double gh_tail_fraction = 0.0;  // share of that integral accumulated after T/2
  double band_bound = 0.0;        // delta / (2 lambda)
  bool band_ok = false;
};
ThetaReport theta_report(const NormSeries& s, const Params& p);

}  // namespace mhdbl
