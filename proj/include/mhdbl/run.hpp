#pragma once

// Run loop: stepping between sample times, the norm series, time-integrated
// accumulators and per-step audits.

#include <limits>
#include <vector>

#include "mhdbl/lp.hpp"
#include "mhdbl/solver.hpp"

namespace mhdbl {

struct RunOptions {
  double t_final = 100.0;
  double dt_max = 1e-2;
  double cfl = 0.4;
  double sample_interval = 0.5;
  double tail_guard = 1e-8;
  int audit_every = 10;  // 0 disables the heat-energy audit
};

// One row of norms.csv plus bookkeeping that is not written there.
struct SampleRow {
  double t = 0.0;
  double theta = 0.0;
  double radius = 0.0;
  double norm_ub = 0.0;      // || e^{a Psi} (u,b)_Phi ||_{B^{1/2,0}}
  double norm_gh = 0.0;      // || e^{a Psi} (G,H)_Phi ||_{B^{1/2,0}}
  double norm_dy_gh = 0.0;   // || e^{a Psi} dy(G,H)_Phi ||_{B^{1/2,0}}
  double norm_phipsi = 0.0;  // || e^{a Psi} (phi,psi)_Phi ||_{B^{1/2,0}}
  double cl_dyub_sq = 0.0;   // || e^{a Psi} dy(u,b)_Phi ||_{L~2_t(B^{1/2,0})}
  double gh_integral = 0.0;  // int_0^t <tau>^{1/4} || e^{a Psi} dy(G,H)_Phi ||_{B^{1/2,0}}
  double flux = 0.0;         // max_x |int u dy|
};

using NormSeries = std::vector<SampleRow>;

struct Diagnostics {
  NormSeries series;
  CLAccumulator cl_dyub;
  double gh_integral = 0.0;
  // heat-energy audit: smallest relative slack and smallest margin over the
  // allowance 10 dt + 10 dy^2
  double audit_min_slack = std::numeric_limits<double>::infinity();
  double audit_min_margin = std::numeric_limits<double>::infinity();
  long audit_count = 0;
};

class Runner {
 public:
  Runner(const Model& model, RunOptions opts);

  // Fresh start: records the t = 0 sample.
  void start(State s);
  // Continue from a saved state and its diagnostics.
  void resume(State s, Diagnostics d);

  // Advance to t_end (a multiple of the sample interval or t_final).
  void run_until(double t_end);
  void run() { run_until(opts_.t_final); }

  const State& state() const { return state_; }
  const Diagnostics& diagnostics() const { return diag_; }
  const Model& model() const { return model_; }
  const RunOptions& options() const { return opts_; }

  SampleRow sample_now() const;

 private:
  void audit(const State& before);
  void check_tail() const;

  const Model& model_;
  RunOptions opts_;
  State state_;
  Diagnostics diag_;
};

// Sample-time norms of a state (no accumulated columns).
SampleRow state_norms(const Model& m, const State& s);

}  // namespace mhdbl
