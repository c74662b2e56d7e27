#pragma once

// Run configuration: flat `key = value` text with dotted keys, `#` comments.
//
//   params.kappa params.epsilon params.delta params.lambda params.nu_u params.nu_b
//   grid.lx grid.nx grid.ymax (number or auto: 18 sqrt(max(1,kappa)(1+t_final))) grid.ny grid.dealias
//   scenario.id (zero | standard | decaying) scenario.alpha
//   scenario.amplitude (number or auto)
//   weight.a (number or auto)
//   time.t_final time.dt_max time.cfl time.sample_interval time.tail_guard
//   time.audit_every
//   fit.t1 fit.t2 (number or auto)
//   output.dir output.checkpoint_every (0 = final checkpoint only)
//   seed

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mhdbl/run.hpp"
#include "mhdbl/scenario.hpp"

namespace mhdbl {

enum class ScenarioId { zero, standard, decaying };
std::string_view to_string(ScenarioId id);

struct RunConfig {
  Params params;
  GridSpec grid{.nx = 64, .ny = 768};
  bool ymax_auto = true;
  ScenarioId scenario = ScenarioId::standard;
  double ff_alpha = 2.5;
  std::optional<double> ff_amplitude;  // empty: half the epsilon budget
  std::optional<double> weight_a;      // empty: 1 for kappa <= 1, else 1/kappa
  RunOptions run;
  std::optional<double> fit_t1, fit_t2;  // empty: [t_final/10, t_final]
  std::string out_dir = "out";
  double checkpoint_every = 0.0;
  std::uint64_t seed = 1;

  // Resolved values (valid after resolve()).
  double weight() const;
  double fit_begin() const { return fit_t1.value_or(run.t_final / 10.0); }
  double fit_end() const { return fit_t2.value_or(run.t_final); }

  // Fills auto values and checks cross-key invariants. Throws ConfigError.
  void resolve();
};

// Sets one key. Throws ConfigError naming the key when it is unknown or the
// value does not parse.
void apply_setting(RunConfig& c, std::string_view key, std::string_view value);

// Parses a config text on top of the defaults (not resolved).
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Canonical text form (every key, resolved values).
std::string to_text(const RunConfig& c);

}  // namespace mhdbl
