#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "doctest.h"
#include "mhdbl/checkpoint.hpp"
#include "mhdbl/config.hpp"
#include "mhdbl/errors.hpp"
#include "mhdbl/report.hpp"

namespace fs = std::filesystem;
using namespace mhdbl;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "mhdbl_test_io";
  fs::create_directories(d);
  return d / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

RunConfig small_config() {
  RunConfig c = parse_config(
      "grid.nx = 16\n"
      "grid.ny = 192\n"
      "grid.ymax = 30\n"
      "time.t_final = 2\n"
      "time.sample_interval = 0.25\n");
  c.resolve();
  return c;
}

bool same_fields(const State& a, const State& b) {
  return a.t == b.t && a.theta == b.theta && a.step == b.step && a.u.coeffs() == b.u.coeffs() &&
         a.b.coeffs() == b.b.coeffs() && a.has_history == b.has_history && a.nu_prev.coeffs() == b.nu_prev.coeffs() &&
         a.nb_prev.coeffs() == b.nb_prev.coeffs();
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "# comment line\n"
      "params.kappa = 1.5   # trailing comment\n"
      "\n"
      "grid.nx=32\n"
      "scenario.id = decaying\n"
      "scenario.amplitude = auto\n"
      "time.t_final = 10\n");
  CHECK(c.params.kappa == 1.5);
  CHECK(c.grid.nx == 32);
  CHECK(c.scenario == ScenarioId::decaying);
  CHECK(!c.ff_amplitude);
  CHECK(c.run.t_final == 10.0);

  RunConfig r = c;
  r.resolve();
  CHECK(r.weight() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.grid.ymax == doctest::Approx(18.0 * std::sqrt(1.5 * 11.0)));
  CHECK(r.fit_begin() == 1.0);
  CHECK(r.fit_end() == 10.0);

  RunConfig k1 = parse_config("params.kappa = 1\n");
  k1.resolve();
  CHECK(k1.weight() == 1.0);

  try {
    parse_config("params.kapa = 1\n");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("params.kapa") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("grid.nx = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("grid.nx\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("scenario.id = other\n"), ConfigError);

  RunConfig bad = parse_config("params.kappa = 1\nscenario.id = decaying\n");
  CHECK_THROWS_AS(bad.resolve(), ConfigError);
  RunConfig coarse = parse_config("time.dt_max = 0.1\ntime.sample_interval = 0.05\n");
  CHECK_THROWS_AS(coarse.resolve(), ConfigError);
}

TEST_CASE("config text round trip") {
  RunConfig c = parse_config("params.kappa = 0.7\ngrid.nx = 128\nweight.a = 0.9\nfit.t1 = 3\nseed = 77\n");
  c.resolve();
  const std::string text = to_text(c);
  RunConfig d = parse_config(text);
  d.resolve();
  CHECK(to_text(d) == text);
  CHECK(d.params.kappa == 0.7);
  CHECK(d.weight() == 0.9);
  CHECK(d.seed == 77);
}

TEST_CASE("norms.csv round trip is bit-exact") {
  NormSeries s;
  for (int k = 0; k < 7; ++k) {
    SampleRow r;
    r.t = 0.1 * k;
    r.theta = std::exp(-k) / 3.0;
    r.radius = 1.0 - r.theta;
    r.norm_ub = std::sqrt(2.0) * 1e-300 * k;
    r.norm_gh = std::nextafter(1.0, 2.0) * k;
    r.norm_dy_gh = 1.0 / 7.0;
    r.norm_phipsi = 1e17 + k;
    r.cl_dyub_sq = std::numbers::pi * k;
    s.push_back(r);
  }
  const auto p = scratch("norms.csv");
  write_norms_csv(p.string(), s);
  const CsvTable t = read_csv(p.string());
  REQUIRE(t.rows.size() == s.size());
  CHECK(t.columns.front() == "t");
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(t.rows[k][0] == s[k].t);
    CHECK(t.column("theta")[k] == s[k].theta);
    CHECK(t.column("norm_ub")[k] == s[k].norm_ub);
    CHECK(t.column("norm_gh")[k] == s[k].norm_gh);
    CHECK(t.column("norm_dy_gh")[k] == s[k].norm_dy_gh);
    CHECK(t.column("norm_phipsi")[k] == s[k].norm_phipsi);
    CHECK(t.column("cl_dyub_sq")[k] == s[k].cl_dyub_sq);
  }
  CHECK_THROWS_AS(t.column("nope"), ConfigError);

  const auto ragged = scratch("ragged.csv");
  std::ofstream(ragged) << "t,theta\n0,1\n2\n";
  CHECK_THROWS_AS(read_csv(ragged.string()), FormatError);
  CHECK_THROWS_AS(read_csv(scratch("missing.csv").string()), FormatError);
}

TEST_CASE("checkpoint round trip and continuation") {
  const RunConfig c = small_config();
  Setup s = make_setup(c);
  Runner r(s.model, c.run);
  r.start(s.state);
  r.run_until(1.0);
  const auto p = scratch("ck.bin");
  write_checkpoint(p.string(), r);

  const Checkpoint k = read_checkpoint(p.string());
  CHECK(same_fields(k.state, r.state()));
  CHECK(k.params.kappa == c.params.kappa);
  CHECK(k.grid.ny == c.grid.ny);
  CHECK(k.grid.ymax == c.grid.ymax);
  CHECK(k.weight_a == c.weight());
  CHECK(k.run.t_final == c.run.t_final);
  CHECK(k.run.audit_every == c.run.audit_every);
  REQUIRE(k.diag.series.size() == r.diagnostics().series.size());
  CHECK(k.diag.series.back().norm_gh == r.diagnostics().series.back().norm_gh);
  CHECK(k.diag.gh_integral == r.diagnostics().gh_integral);

  // rewriting the reloaded state reproduces the bytes
  const Model m = model_from_checkpoint(k);
  const auto p2 = scratch("ck2.bin");
  write_checkpoint(p2.string(), m, k.run, k.state, k.diag);
  CHECK(slurp(p) == slurp(p2));

  // one more step from the reloaded state matches the live run
  State a = r.state(), b = k.state;
  step_imex(s.model, a, 1e-2);
  step_imex(m, b, 1e-2);
  CHECK(same_fields(a, b));
}

TEST_CASE("split run equals the uninterrupted run") {
  const RunConfig c = small_config();
  Setup s = make_setup(c);
  Runner full(s.model, c.run);
  full.start(s.state);
  full.run();

  Runner first(s.model, c.run);
  first.start(s.state);
  first.run_until(1.0);
  const auto p = scratch("split.bin");
  write_checkpoint(p.string(), first);
  const Checkpoint k = read_checkpoint(p.string());
  const Model m = model_from_checkpoint(k);
  Runner second(m, k.run);
  second.resume(k.state, k.diag);
  second.run();

  CHECK(same_fields(full.state(), second.state()));
  const auto a = scratch("full.csv"), b = scratch("split.csv");
  write_norms_csv(a.string(), full.diagnostics().series);
  write_norms_csv(b.string(), second.diagnostics().series);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("checkpoint corruption is rejected") {
  const RunConfig c = small_config();
  Setup s = make_setup(c);
  Runner r(s.model, c.run);
  r.start(s.state);
  const auto p = scratch("good.bin");
  write_checkpoint(p.string(), r);
  const std::string bytes = slurp(p);

  const auto trunc = scratch("trunc.bin");
  std::ofstream(trunc, std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  CHECK_THROWS_AS(read_checkpoint(trunc.string()), FormatError);

  std::string v = bytes;
  v[8] = static_cast<char>(kCheckpointVersion + 1);
  const auto ver = scratch("version.bin");
  std::ofstream(ver, std::ios::binary) << v;
  CHECK_THROWS_AS(read_checkpoint(ver.string()), FormatError);

  std::string mg = bytes;
  mg[0] = 'X';
  const auto magic = scratch("magic.bin");
  std::ofstream(magic, std::ios::binary) << mg;
  CHECK_THROWS_AS(read_checkpoint(magic.string()), FormatError);
  CHECK_THROWS_AS(read_checkpoint(scratch("absent.bin").string()), FormatError);
}
