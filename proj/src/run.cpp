#include "mhdbl/run.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mhdbl/errors.hpp"

namespace mhdbl {

namespace {

std::vector<double> dy_ub_shells(const Model& m, const State& s) {
  const Field du = ddy(s.u);
  const Field db = ddy(s.b);
  const Field* fs[] = {&du, &db};
  return shell_norms(m.partition, fs, {m.weight_a, s.t, std::max(radius(m, s), 0.0)});
}

}  // namespace

SampleRow state_norms(const Model& m, const State& s) {
  SampleRow r;
  r.t = s.t;
  r.theta = s.theta;
  r.radius = radius(m, s);
  const Weighting w{m.weight_a, s.t, std::max(r.radius, 0.0)};
  const auto pp = reconstruct_phipsi(s.u, s.b);
  const auto gh = compute_gh(s.u, s.b, pp.first, pp.second, s.t, m.params.kappa);
  r.norm_ub = besov_norm(m.partition, s.u, s.b, 0.5, w);
  r.norm_gh = besov_norm(m.partition, gh.first, gh.second, 0.5, w);
  r.norm_dy_gh = besov_norm(m.partition, ddy(gh.first), ddy(gh.second), 0.5, w);
  r.norm_phipsi = besov_norm(m.partition, pp.first, pp.second, 0.5, w);
  r.flux = column_flux(s.u);
  return r;
}

Runner::Runner(const Model& model, RunOptions opts) : model_(model), opts_(opts) {
  if (!(opts_.sample_interval > 0.0)) throw ConfigError("time.sample_interval must be positive");
  if (!(opts_.dt_max > 0.0)) throw ConfigError("time.dt_max must be positive");
  if (opts_.sample_interval < opts_.dt_max * (1.0 - 1e-12))
    throw ConfigError("time.sample_interval must be at least time.dt_max");
  if (!(opts_.t_final > 0.0)) throw ConfigError("time.t_final must be positive");
  if (!(opts_.cfl > 0.0)) throw ConfigError("time.cfl must be positive");
}

SampleRow Runner::sample_now() const {
  SampleRow r = state_norms(model_, state_);
  r.cl_dyub_sq = diag_.cl_dyub.norm();
  r.gh_integral = diag_.gh_integral;
  return r;
}

void Runner::check_tail() const {
  const double tu = tail_ratio(state_.u, model_.weight_a, state_.t);
  const double tb = tail_ratio(state_.b, model_.weight_a, state_.t);
  if (tu > opts_.tail_guard || tb > opts_.tail_guard) {
    std::ostringstream os;
    os << "weighted tail ratio " << std::max(tu, tb) << " above " << opts_.tail_guard << " at t=" << state_.t
       << " (raise grid.ymax)";
    throw TailViolation(os.str());
  }
}

void Runner::start(State s) {
  state_ = std::move(s);
  diag_ = Diagnostics{};
  diag_.cl_dyub = CLAccumulator(model_.partition.k_min(), model_.partition.n_shells(), 0.5, 2.0);
  check_tail();
  diag_.series.push_back(sample_now());
}

void Runner::resume(State s, Diagnostics d) {
  state_ = std::move(s);
  diag_ = std::move(d);
}

void Runner::audit(const State& before) {
  const auto& p = model_.params;
  const double k = p.kappa;
  const double dt = state_.t - before.t;
  const double dy = model_.grid.dy();
  const double allowance = 10.0 * dt + 10.0 * dy * dy;
  const double pairs[4][2] = {{1.0, 1.0}, {1.0, k}, {1.0 / k, 1.0}, {1.0 / k, k}};
  for (const auto& ab : pairs)
    for (int f = 0; f < 2; ++f) {
      const double s = f == 0 ? heat_energy_slack(before.u, state_.u, before.t, state_.t, ab[0], ab[1])
                              : heat_energy_slack(before.b, state_.b, before.t, state_.t, ab[0], ab[1]);
      diag_.audit_min_slack = std::min(diag_.audit_min_slack, s);
      diag_.audit_min_margin = std::min(diag_.audit_min_margin, s + allowance);
    }
  ++diag_.audit_count;
}

void Runner::run_until(double t_end) {
  const double iv = opts_.sample_interval;
  t_end = std::min(t_end, opts_.t_final);
  while (state_.t < t_end - 1e-9 * iv) {
    // next sample boundary
    const long k = static_cast<long>(std::floor(state_.t / iv + 1e-9)) + 1;
    const double next = std::min(k * iv, t_end);
    while (state_.t < next - 1e-9 * iv) {
      const double dt_cfl = choose_dt(model_, state_, opts_.dt_max, opts_.cfl);
      const double span = next - state_.t;
      const long n = std::max(1L, static_cast<long>(std::ceil(span / dt_cfl - 1e-9)));
      const double dt = span / n;

      diag_.cl_dyub.add(dy_ub_shells(model_, state_), dt);
      const bool do_audit = opts_.audit_every > 0 && state_.step % opts_.audit_every == 0;
      State before;
      if (do_audit) {
        before.t = state_.t;
        before.u = state_.u;
        before.b = state_.b;
      }
      const StepInfo info = step_imex(model_, state_, dt);
      diag_.gh_integral += dt * info.gh_term;
      if (do_audit) audit(before);
    }
    state_.t = next;  // remove rounding drift at sample times
    check_tail();
    diag_.series.push_back(sample_now());
  }
}

}  // namespace mhdbl
