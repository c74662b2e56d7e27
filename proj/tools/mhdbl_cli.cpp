// mhdbl: simulate | verify | fit | resume
//
// Exit codes: 0 ok, 1 a verify check failed, 2 bad config/input,
// 3 analytic radius exhausted (partial output written), 4 divergence,
// 5 tail or integrity violation.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "mhdbl/checkpoint.hpp"
#include "mhdbl/errors.hpp"
#include "mhdbl/report.hpp"

namespace fs = std::filesystem;
using namespace mhdbl;

namespace {

void apply_overrides(RunConfig& c, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: " + kv);
    apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
}

void write_json(const fs::path& p, const nlohmann::json& j) {
  std::ofstream os(p);
  if (!os) throw FormatError("cannot write " + p.string());
  os << j.dump(2) << '\n';
}

struct Outputs {
  fs::path dir;
  fs::path norms() const { return dir / "norms.csv"; }
  fs::path summary() const { return dir / "summary.json"; }
  fs::path checkpoint() const { return dir / "checkpoint.bin"; }
};

// Runs to t_final with periodic checkpoints; always writes norms and summary.
int drive(Runner& r, const RunConfig& c, const Setup& s, const Outputs& out) {
  fs::create_directories(out.dir);
  std::string status = "completed";
  int code = 0;
  try {
    const double every = c.checkpoint_every;
    while (r.state().t < c.run.t_final - 1e-9 * c.run.sample_interval) {
      const double next = every > 0.0 ? std::min(c.run.t_final, (std::floor(r.state().t / every + 1e-9) + 1) * every)
                                      : c.run.t_final;
      r.run_until(next);
      if (every > 0.0) write_checkpoint(out.checkpoint().string(), r);
    }
    write_checkpoint(out.checkpoint().string(), r);
  } catch (const RadiusExhausted& e) {
    std::cerr << "radius exhausted: " << e.what() << '\n';
    status = "radius_exhausted";
    code = 3;
  } catch (const Divergence& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    status = "divergence";
    code = 4;
  } catch (const TailViolation& e) {
    std::cerr << "tail violation: " << e.what() << '\n';
    status = "tail_violation";
    code = 5;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity: " << e.what() << '\n';
    status = "integrity_error";
    code = 5;
  }
  write_norms_csv(out.norms().string(), r.diagnostics().series);
  write_json(out.summary(), summary_json(c, s, r.diagnostics(), status));
  std::cout << "t=" << r.state().t << " theta=" << r.state().theta << " status=" << status << '\n'
            << "wrote " << out.norms().string() << ", " << out.summary().string() << '\n';
  return code;
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& sets) {
  RunConfig c = load_config(config_path);
  apply_overrides(c, sets);
  c.resolve();
  Setup s = make_setup(c);
  Runner r(s.model, c.run);
  r.start(s.state);
  return drive(r, c, s, {c.out_dir});
}

int cmd_resume(const std::string& ckpt, const std::vector<std::string>& sets) {
  Checkpoint k = read_checkpoint(ckpt);
  RunConfig c;
  c.params = k.params;
  c.grid = k.grid;
  c.ymax_auto = false;
  c.weight_a = k.weight_a;
  c.run = k.run;
  c.scenario = k.ff_amplitude != 0.0 ? ScenarioId::decaying : ScenarioId::standard;
  c.ff_amplitude = k.ff_amplitude;
  c.ff_alpha = k.ff_alpha;
  c.out_dir = fs::path(ckpt).parent_path().string();
  if (c.out_dir.empty()) c.out_dir = ".";
  for (const auto& kv : sets) {
    const auto key = kv.substr(0, kv.find('='));
    if (key != "time.t_final" && key != "output.dir" && key != "output.checkpoint_every" && key != "fit.t1" &&
        key != "fit.t2")
      throw ConfigError("cannot override " + key + " on resume");
  }
  apply_overrides(c, sets);
  if (!(c.run.t_final >= k.state.t)) throw ConfigError("time.t_final lies before the checkpoint time");
  Setup s{model_from_checkpoint(k), k.state, std::nullopt, std::nullopt};
  Runner r(s.model, c.run);
  r.resume(s.state, k.diag);
  return drive(r, c, s, {c.out_dir});
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out) {
  const auto j = verify_suite(suite, seed);
  if (out.empty())
    std::cout << j.dump(2) << '\n';
  else
    write_json(out, j);
  for (const auto& c : j["checks"])
    std::cerr << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << '\n';
  return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_fit(const std::string& csv, const std::string& column, std::optional<double> t1, std::optional<double> t2) {
  const CsvTable t = read_csv(csv);
  const auto time = t.column("t");
  const auto v = t.column(column);
  if (time.empty()) throw FormatError("no rows in " + csv);
  const double T = time.back();
  const auto f = fit_decay(time, v, t1.value_or(T / 10.0), t2.value_or(T));
  std::printf("column=%s exponent=%.10g stderr=%.3g samples=%d\n", column.c_str(), f.exponent, f.std_error, f.samples);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-layer MHD simulation and verification"};
  app.require_subcommand(1);

  std::string config, ckpt, suite, csv, column, out;
  std::vector<std::string> sets;
  std::uint64_t seed = 1;
  std::optional<double> t1, t2;

  auto* sim = app.add_subcommand("simulate", "run a configuration");
  sim->add_option("config", config, "config file")->required();
  sim->add_option("--set", sets, "key=value override (repeatable)");

  auto* res = app.add_subcommand("resume", "continue from a checkpoint");
  res->add_option("checkpoint", ckpt, "checkpoint file")->required();
  res->add_option("--set", sets, "override: time.t_final, output.dir, output.checkpoint_every, fit.t1, fit.t2");

  auto* ver = app.add_subcommand("verify", "run a verifier suite");
  ver->add_option("suite", suite, "poincare | sup-constants | convexity | product-law | gh-equivalence | all")
      ->required();
  ver->add_option("--seed", seed, "seed for randomized cases");
  ver->add_option("--out", out, "write the JSON report here instead of stdout");

  auto* fit = app.add_subcommand("fit", "fit a decay exponent to a norms.csv column");
  fit->add_option("csv", csv, "norms.csv")->required();
  fit->add_option("column", column, "column name")->required();
  fit->add_option("--t1", t1, "window start (default t_last/10)");
  fit->add_option("--t2", t2, "window end (default t_last)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(config, sets);
    if (*res) return cmd_resume(ckpt, sets);
    if (*ver) return cmd_verify(suite, seed, out);
    if (*fit) return cmd_fit(csv, column, t1, t2);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const RadiusExhausted& e) {
    std::cerr << "radius exhausted: " << e.what() << '\n';
    return 3;
  } catch (const Divergence& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return 4;
  } catch (const TailViolation& e) {
    std::cerr << "tail violation: " << e.what() << '\n';
    return 5;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
