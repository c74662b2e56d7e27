#pragma once

// Time integration of the transformed boundary-layer system for (u,b), with
// recovered (v,h), primitives (phi,psi), the damped pair (G,H) and the
// analytic-band ODE for theta.

#include <limits>
#include <optional>
#include <vector>

#include "mhdbl/grid.hpp"
#include "mhdbl/lp.hpp"
#include "mhdbl/scenario.hpp"

namespace mhdbl {

// Everything that stays fixed during a run.
struct Model {
  GridSpec grid;
  Params params;
  FarField farfield;
  std::optional<Cutoff> cutoff;  // absent for the trivial far field
  DyadicPartition partition;
  double weight_a = 1.0;  // y-weight e^{a Psi} of the diagnostics (1 or 1/kappa)

  // Builds the partition, and the cutoff when the far field is nontrivial.
  static Model make(const GridSpec& grid, const Params& params, FarField farfield, double weight_a);
  const Cutoff* cutoff_ptr() const { return cutoff ? &*cutoff : nullptr; }
};

struct State {
  double t = 0.0;
  double theta = 0.0;
  double dt_prev = 0.0;
  long step = 0;
  Field u, b;
  // explicit tendencies of the previous step (multistep history)
  bool has_history = false;
  Field nu_prev, nb_prev;
};

State make_state(const Model& m, Field u0, Field b0);
double radius(const Model& m, const State& s);

struct FieldPair {
  Field first, second;
};

// (v,h) = -dx int_0^y (u,b). A finite flux_tol turns a column flux
// max_x |int_0^ymax u| above it into IntegrityError.
FieldPair recover_vh(const Field& u, const Field& b, double flux_tol = std::numeric_limits<double>::infinity());
// (phi,psi) = -int_y^ymax (u,b).
FieldPair reconstruct_phipsi(const Field& u, const Field& b);
// G = u + y phi / (2<t>), H = b + y psi / (2 kappa <t>).
FieldPair compute_gh(const Field& u, const Field& b, const Field& phi, const Field& psi, double t, double kappa);
// max over x of |int_0^ymax u dy|.
double column_flux(const Field& u);

// All terms of both equations except the diffusion.
FieldPair rhs_explicit(const Model& m, const Field& u, const Field& b, double t);

struct StepInfo {
  double dt = 0.0;
  double theta_dot = 0.0;
  double gh_term = 0.0;  // <t>^{1/4} || e^{a Psi} dy(G,H)_Phi ||_{B^{1/2,0}}
  double ff_term = 0.0;  // eps^{-1/2} <t>^{5/4} || (U,B)_Phi ||_{B^{1/2}_h}
};

// Crank-Nicolson diffusion with Adams-Bashforth 2 for the explicit part
// (Crank-Nicolson/Heun on the first step), then explicit Euler for theta with
// the end-of-step fields and the radius of the start of the step. Throws
// RadiusExhausted when the radius reaches zero and Divergence on non-finite
// values.
StepInfo step_imex(const Model& m, State& s, double dt);

// dt = min(dt_max, cfl dx / (max|u| + max|U|)).
double choose_dt(const Model& m, const State& s, double dt_max, double cfl);

struct ThetaRate {
  double gh_term = 0.0;
  double ff_term = 0.0;
  double total() const { return gh_term + ff_term; }
};
ThetaRate theta_rhs(const Model& m, const Field& u, const Field& b, double t, double radius);

// Resample onto a grid for the variables (t, x, y / sqrt(kappa)): f'(y') = f(sqrt(kappa) y').
// Cubic Lagrange interpolation; values beyond the source domain are zero.
Field kappa_rescale_map(const Field& f, double kappa, const GridSpec& target);
// Default target: same ny, ymax / sqrt(kappa), so nodes coincide.
GridSpec kappa_rescaled_grid(const GridSpec& g, double kappa);

// Residuals of the (phi,psi) system between two consecutive states (forward
// time difference, spatial terms at the later state), in B^{1/2,0}.
struct Eqs2Residual {
  double phi = 0.0;
  double psi = 0.0;
};
Eqs2Residual eqs2_residual(const Model& m, const State& before, const State& after);

// Discrete weighted heat-energy inequality
//   (dt f - beta dyy f | e^{2 alpha Psi} f) >= 1/2 d/dt ||e^{alpha Psi} f||^2
//                                             + (beta - beta^2 alpha / 2) ||e^{alpha Psi} dy f||^2
// between two states, time-centred. Returns (lhs - rhs) / scale with
// scale = ||e^{alpha Psi} dy f||^2 + ||e^{alpha Psi} f||^2 / <t>; 0 for a zero field.
double heat_energy_slack(const Field& f0, const Field& f1, double t0, double t1, double alpha, double beta);

}  // namespace mhdbl
