#include "mhdbl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mhdbl/errors.hpp"

namespace mhdbl {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(x)) bad_value(key, v);
  return x;
}

template <class I>
I to_int(std::string_view key, std::string_view v) {
  I x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v);
  return x;
}

std::optional<double> to_auto(std::string_view key, std::string_view v) {
  if (v == "auto") return std::nullopt;
  return to_double(key, v);
}

std::string fmt(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

std::string_view to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::zero: return "zero";
    case ScenarioId::standard: return "standard";
    case ScenarioId::decaying: return "decaying";
  }
  return "?";
}

double RunConfig::weight() const {
  if (weight_a) return *weight_a;
  return params.kappa <= 1.0 ? 1.0 : 1.0 / params.kappa;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view v) {
  v = trim(v);
  if (key == "params.kappa") c.params.kappa = to_double(key, v);
  else if (key == "params.epsilon") c.params.epsilon = to_double(key, v);
  else if (key == "params.delta") c.params.delta = to_double(key, v);
  else if (key == "params.lambda") c.params.lambda = to_double(key, v);
  else if (key == "params.nu_u") c.params.nu_u = to_double(key, v);
  else if (key == "params.nu_b") c.params.nu_b = to_double(key, v);
  else if (key == "grid.lx") c.grid.lx = to_double(key, v);
  else if (key == "grid.nx") c.grid.nx = to_int<int>(key, v);
  else if (key == "grid.ny") c.grid.ny = to_int<int>(key, v);
  else if (key == "grid.dealias") c.grid.dealias_fraction = to_double(key, v);
  else if (key == "grid.ymax") {
    const auto y = to_auto(key, v);
    c.ymax_auto = !y;
    if (y) c.grid.ymax = *y;
  } else if (key == "scenario.id") {
    if (v == "zero") c.scenario = ScenarioId::zero;
    else if (v == "standard") c.scenario = ScenarioId::standard;
    else if (v == "decaying") c.scenario = ScenarioId::decaying;
    else bad_value(key, v);
  } else if (key == "scenario.alpha") c.ff_alpha = to_double(key, v);
  else if (key == "scenario.amplitude") c.ff_amplitude = to_auto(key, v);
  else if (key == "weight.a") c.weight_a = to_auto(key, v);
  else if (key == "time.t_final") c.run.t_final = to_double(key, v);
  else if (key == "time.dt_max") c.run.dt_max = to_double(key, v);
  else if (key == "time.cfl") c.run.cfl = to_double(key, v);
  else if (key == "time.sample_interval") c.run.sample_interval = to_double(key, v);
  else if (key == "time.tail_guard") c.run.tail_guard = to_double(key, v);
  else if (key == "time.audit_every") c.run.audit_every = to_int<int>(key, v);
  else if (key == "fit.t1") c.fit_t1 = to_auto(key, v);
  else if (key == "fit.t2") c.fit_t2 = to_auto(key, v);
  else if (key == "output.dir") {
    if (v.empty()) bad_value(key, v);
    c.out_dir = std::string(v);
  } else if (key == "output.checkpoint_every") c.checkpoint_every = to_double(key, v);
  else if (key == "seed") c.seed = to_int<std::uint64_t>(key, v);
  else throw ConfigError("unknown config key: " + std::string(key));
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value, got '" + std::string(line) + "'");
    apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void RunConfig::resolve() {
  params.validate();
  if (ymax_auto) grid.ymax = 18.0 * std::sqrt(std::max(1.0, params.kappa) * (1.0 + run.t_final));
  grid.validate();
  if (!(run.t_final > 0.0)) throw ConfigError("time.t_final must be positive");
  if (!(run.dt_max > 0.0)) throw ConfigError("time.dt_max must be positive");
  if (!(run.cfl > 0.0)) throw ConfigError("time.cfl must be positive");
  if (!(run.sample_interval >= run.dt_max)) throw ConfigError("time.sample_interval must be at least time.dt_max");
  if (!(run.tail_guard > 0.0)) throw ConfigError("time.tail_guard must be positive");
  if (run.audit_every < 0) throw ConfigError("time.audit_every must be non-negative");
  if (!(weight() > 0.0)) throw ConfigError("weight.a must be positive");
  if (scenario == ScenarioId::decaying && params.kappa == 1.0)
    throw ConfigError("scenario.id = decaying needs params.kappa != 1 (kappa = 1 supports only U = B = 0)");
  if (scenario == ScenarioId::decaying && ff_amplitude && *ff_amplitude < 0.0)
    throw ConfigError("scenario.amplitude must be non-negative");
  if (!(fit_begin() < fit_end())) throw ConfigError("fit.t1 must be below fit.t2");
  if (checkpoint_every < 0.0) throw ConfigError("output.checkpoint_every must be non-negative");
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  auto kv = [&os](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("auto"); };
  kv("params.kappa", fmt(c.params.kappa));
  kv("params.epsilon", fmt(c.params.epsilon));
  kv("params.delta", fmt(c.params.delta));
  kv("params.lambda", fmt(c.params.lambda));
  kv("params.nu_u", fmt(c.params.nu_u));
  kv("params.nu_b", fmt(c.params.nu_b));
  kv("grid.lx", fmt(c.grid.lx));
  kv("grid.nx", std::to_string(c.grid.nx));
  kv("grid.ymax", fmt(c.grid.ymax));
  kv("grid.ny", std::to_string(c.grid.ny));
  kv("grid.dealias", fmt(c.grid.dealias_fraction));
  kv("scenario.id", std::string(to_string(c.scenario)));
  kv("scenario.alpha", fmt(c.ff_alpha));
  kv("scenario.amplitude", opt(c.ff_amplitude));
  kv("weight.a", fmt(c.weight()));
  kv("time.t_final", fmt(c.run.t_final));
  kv("time.dt_max", fmt(c.run.dt_max));
  kv("time.cfl", fmt(c.run.cfl));
  kv("time.sample_interval", fmt(c.run.sample_interval));
  kv("time.tail_guard", fmt(c.run.tail_guard));
  kv("time.audit_every", std::to_string(c.run.audit_every));
  kv("fit.t1", fmt(c.fit_begin()));
  kv("fit.t2", fmt(c.fit_end()));
  kv("output.dir", c.out_dir);
  kv("output.checkpoint_every", fmt(c.checkpoint_every));
  kv("seed", std::to_string(c.seed));
  return os.str();
}

}  // namespace mhdbl
