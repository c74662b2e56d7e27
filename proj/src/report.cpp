#include "mhdbl/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mhdbl/errors.hpp"

namespace mhdbl {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json check(const std::string& name, json inputs, json values, bool pass) {
  return {{"name", name}, {"inputs", std::move(inputs)}, {"values", std::move(values)}, {"pass", pass}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json poincare_checks(std::uint64_t seed) {
  json out = json::array();
  const YProfile g{[](double y) { return std::exp(-y * y / 4.0); },
                   [](double y) { return -0.5 * y * std::exp(-y * y / 4.0); }, 20.0};
  const double ref = 0.5 * std::sqrt(std::numbers::pi);
  const auto c = poincare_check(g, 0.0, 1.0, 401);
  const auto f = poincare_check(g, 0.0, 1.0, 801);
  const bool sharp = std::abs(f.lhs - ref) < 1e-6 && std::abs(f.rhs1 - ref) < 1e-6;
  out.push_back(check("poincare_gaussian_equality", {{"profile", "exp(-y^2/4)"}, {"t", 0}, {"kappa", 1}},
                      {{"lhs_401", c.lhs}, {"lhs_801", f.lhs}, {"rhs1_801", f.rhs1}, {"rhs2_801", f.rhs2},
                       {"reference", ref}},
                      sharp && f.pass()));

  const auto t0 = std::chrono::steady_clock::now();
  const auto s = poincare_suite(seed);
  const double secs = seconds_since(t0);
  out.push_back(check("poincare_random_suite",
                      {{"seed", seed}, {"mixtures", 50}, {"t", {0, 1, 10}}, {"kappa", {0.8, 1, 1.5}}},
                      {{"cases", s.cases.size()}, {"failures", s.failures}, {"min_relative_slack", s.min_slack},
                       {"seconds", secs}},
                      s.failures == 0 && s.min_slack >= -kPoincareTol));
  return out;
}

json sup_checks() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = sup_constants();
  const double secs = seconds_since(t0);
  json out = json::array();
  out.push_back(check("sup_dawson", json::object(),
                      {{"sup", c.sup1}, {"argmax", c.argmax1}, {"reference", 0.541044}, {"seconds", secs}},
                      std::abs(c.sup1 - 0.541044) < 1e-5));
  out.push_back(check("sup_scaled_erfc", json::object(),
                      {{"sup", c.sup2}, {"argmax", c.argmax2}, {"monotone", c.sup2_monotone}, {"reference", 0.886227}},
                      std::abs(c.sup2 - 0.886227) < 1e-6 && c.sup2_monotone));
  return out;
}

json convexity_checks(std::uint64_t seed) {
  json out = json::array();
  int fails = 0, cases = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto [f, g] = random_pair(seed * 1000003ull + i, 16);
    for (double r : {0.05, 0.2}) {
      const auto c = multiplier_convexity_check(f, g, r);
      ++cases;
      worst = std::max(worst, c.max_violation);
      if (!c.pass) ++fails;
    }
  }
  const auto [f, g] = random_pair(seed, 16);
  const auto e = multiplier_convexity_check(f, g, 0.0);
  out.push_back(check("convexity_r0_equality", {{"seed", seed}}, {{"max_violation", num(e.max_violation)}},
                      std::abs(e.max_violation) < 1e-12));
  out.push_back(check("convexity_random_pairs", {{"seed", seed}, {"pairs", 200}, {"r", {0.05, 0.2}}},
                      {{"cases", cases}, {"failures", fails}, {"max_violation", num(worst)}}, fails == 0));
  return out;
}

json product_law_checks(std::uint64_t seed) {
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto [a, b] = random_pair(seed * 7919ull + i, 21);
    const auto [c, d] = random_pair(seed * 7919ull + i, 42);
    m1 = std::max(m1, product_law_ratio(a, b));
    m2 = std::max(m2, product_law_ratio(c, d));
  }
  std::vector<cplx> h(4, cplx{});
  h[3] = 1.0;
  const auto single = Spectrum1D::from_half(2.0 * std::numbers::pi, h);
  const double rs = product_law_ratio(single, single);
  json out = json::array();
  out.push_back(check("product_law_single_mode", {{"mode", 3}}, {{"ratio", num(rs)}}, std::isfinite(rs)));
  out.push_back(check("product_law_refinement", {{"seed", seed}, {"pairs", 100}, {"nx", {64, 128}}},
                      {{"max_ratio_nx64", num(m1)}, {"max_ratio_nx128", num(m2)}},
                      std::isfinite(m1) && std::isfinite(m2) && std::abs(m2 / m1 - 1.0) < 0.2));
  return out;
}

json gh_checks() {
  json out = json::array();
  Params p;
  auto build = [&](int ny) {
    GridSpec g{.nx = 32, .ymax = 18.0 * std::sqrt(2.0), .ny = ny};
    Model m = Model::make(g, p, FarField::trivial(g), 1.0);
    auto id = initial_data_standard(g, p, FarField::default_profile(g), 1.0);
    State s = make_state(m, id.u0, id.b0);
    return std::pair{std::move(m), std::move(s)};
  };

  auto [m, s] = build(384);
  const auto r0 = gh_equivalence_check(m, s.u, s.b, 0.0, 0.5);
  json r0v = json::array();
  for (double v : r0.max) r0v.push_back(num(v));
  out.push_back(check("gh_ratios_t0", {{"kappa", 1}, {"gamma", 0.5}, {"ny", 384}},
                      {{"max_ratios", r0v}, {"u_vs_G", num(r0.max[1])}, {"b_vs_H", num(r0.max[4])}},
                      r0.finite && r0.max[1] <= 3.0 && r0.max[4] <= 3.0));

  json sweep = json::array();
  bool monotone = true;
  std::array<double, 6> prev{};
  for (double g : {0.25, 0.5, 0.75}) {
    const auto r = gh_equivalence_check(m, s.u, s.b, 0.0, g);
    json row = json::array();
    for (int q = 0; q < 6; ++q) {
      row.push_back(num(r.max[q]));
      if (r.max[q] < prev[q] * (1.0 - 1e-12)) monotone = false;
    }
    prev = r.max;
    sweep.push_back({{"gamma", g}, {"max_ratios", row}});
  }
  out.push_back(check("gh_gamma_sweep", {{"gamma", {0.25, 0.5, 0.75}}}, {{"rows", sweep}}, monotone));

  // trajectory up to t = 1 on two grids
  auto trajectory_max = [](Model& mm, State ss) {
    std::array<double, 6> mx{};
    bool finite = true;
    for (int k = 0; k <= 4; ++k) {
      if (k > 0)
        for (int i = 0; i < 25; ++i) step_imex(mm, ss, 1e-2);
      const auto r = gh_equivalence_check(mm, ss.u, ss.b, ss.t, 0.5, std::max(radius(mm, ss), 0.0));
      finite = finite && r.finite;
      for (int q = 0; q < 6; ++q) mx[q] = std::max(mx[q], r.max[q]);
    }
    return std::pair{mx, finite};
  };
  auto [m2, s2] = build(768);
  const auto [a, fa] = trajectory_max(m, s);
  const auto [b, fb] = trajectory_max(m2, s2);
  bool stable = fa && fb;
  json va = json::array(), vb = json::array();
  for (int q = 0; q < 6; ++q) {
    va.push_back(num(a[q]));
    vb.push_back(num(b[q]));
    if (a[q] > 0.0 && b[q] > 1.2 * a[q]) stable = false;
  }
  out.push_back(check("gh_trajectory_refinement", {{"t", {0, 0.25, 0.5, 0.75, 1}}, {"ny", {384, 768}}, {"gamma", 0.5}},
                      {{"max_ratios_ny384", va}, {"max_ratios_ny768", vb}}, stable));
  return out;
}

}  // namespace

Setup make_setup(const RunConfig& c) {
  const GridSpec& g = c.grid;
  const auto profile = FarField::default_profile(g);
  FarField ff = FarField::trivial(g);
  std::optional<AssumptionReport> assumption;
  if (c.scenario == ScenarioId::decaying) {
    const auto part = DyadicPartition::build(g);
    const double amp =
        c.ff_amplitude.value_or(budget_amplitude(part, profile, c.ff_alpha, c.params.delta, c.params.epsilon));
    ff = FarField::decaying(g, c.params, amp, c.ff_alpha, profile);
    assumption = assumption_check(ff, part, c.params.delta, c.params.epsilon, c.run.t_final);
  }
  Model m = Model::make(g, c.params, std::move(ff), c.weight());
  Setup s{std::move(m), {}, std::nullopt, assumption};
  if (c.scenario == ScenarioId::zero) {
    s.state = make_state(s.model, Field(g, Boundary::dirichlet), Field(g, Boundary::neumann));
  } else {
    auto id = initial_data_standard(g, c.params, profile, c.weight());
    s.compat = id.report;
    s.state = make_state(s.model, std::move(id.u0), std::move(id.b0));
  }
  return s;
}

void write_norms_csv(const std::string& path, const NormSeries& s) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw FormatError("cannot write " + path);
  std::fputs("t,theta,radius,norm_ub,norm_gh,norm_dy_gh,norm_phipsi,cl_dyub_sq\n", f);
  for (const auto& r : s)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.theta, r.radius, r.norm_ub, r.norm_gh,
                 r.norm_dy_gh, r.norm_phipsi, r.cl_dyub_sq);
  if (std::fclose(f) != 0) throw FormatError("write failed: " + path);
}

std::vector<double> CsvTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) {
      std::vector<double> v;
      v.reserve(rows.size());
      for (const auto& r : rows) v.push_back(r[c]);
      return v;
    }
  throw ConfigError("column not found: " + std::string(name));
}

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot read " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty csv: " + path);
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
  }
  int n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError(path + ":" + std::to_string(n) + ": not a number: '" + cell + "'");
      }
    }
    if (row.size() != t.columns.size()) throw FormatError(path + ":" + std::to_string(n) + ": wrong number of fields");
    t.rows.push_back(std::move(row));
  }
  return t;
}

json summary_json(const RunConfig& c, const Setup& s, const Diagnostics& d, const std::string& status) {
  json j;
  j["status"] = status;
  j["config"] = to_text(c);
  j["t_reached"] = d.series.empty() ? 0.0 : d.series.back().t;
  j["samples"] = d.series.size();

  const auto ex = derived_exponents(c.params);
  json theory;
  theory["l_kappa"] = ex.l_kappa ? json(*ex.l_kappa) : json(nullptr);
  theory["ell_kappa"] = ex.ell_kappa ? json(*ex.ell_kappa) : json(nullptr);
  // Psi-weighted branch when kappa <= 1, Psi_kappa-weighted otherwise
  const std::optional<double> rate = c.weight() == 1.0 ? ex.l_kappa : ex.ell_kappa;
  theory["rate_ub"] = rate ? json(-(0.5 + *rate)) : json(nullptr);
  theory["rate_gh"] = rate ? json(-(1.0 + *rate)) : json(nullptr);
  j["theory"] = theory;

  json fits;
  fits["window"] = {c.fit_begin(), c.fit_end()};
  for (const char* col : {"norm_ub", "norm_gh", "norm_dy_gh", "norm_phipsi"}) {
    try {
      const auto f = fit_decay(d.series, col, c.fit_begin(), c.fit_end());
      fits[col] = {{"exponent", f.exponent}, {"stderr", f.std_error}, {"samples", f.samples}};
    } catch (const ConfigError& e) {
      fits[col] = {{"exponent", nullptr}, {"error", e.what()}};
    }
  }
  j["fits"] = fits;

  const auto th = theta_report(d.series, c.params);
  j["theta"] = {{"theta_final", th.theta_final},         {"theta_half", th.theta_half},
                {"tail_fraction", th.tail_fraction},     {"gh_integral", th.gh_integral},
                {"gh_tail_fraction", th.gh_tail_fraction}, {"band_bound", th.band_bound},
                {"band_ok", th.band_ok}};

  j["audit"] = {{"checks", d.audit_count},
                {"min_relative_slack", d.audit_count ? num(d.audit_min_slack) : json(nullptr)},
                {"min_margin", d.audit_count ? num(d.audit_min_margin) : json(nullptr)}};
  j["cl_dyub_sq"] = d.cl_dyub.norm();

  if (s.compat) {
    const auto& r = *s.compat;
    j["compatibility"] = {{"u0_wall", r.u0_wall},       {"dyb0_wall", r.dyb0_wall},   {"int_u0", r.int_u0},
                          {"int_b0", r.int_b0},         {"int_u0_grid", r.int_u0_grid}, {"int_b0_grid", r.int_b0_grid},
                          {"smallness", r.smallness}, {"smallness_bound", r.smallness_bound},
                          {"x_mean", r.x_mean},         {"pass", r.pass}};
  }
  if (s.assumption) {
    const auto& a = *s.assumption;
    j["far_field"] = {{"amplitude", s.model.farfield.amplitude()},
                      {"alpha", s.model.farfield.alpha()},
                      {"linf_b32", a.linf_b32},
                      {"l2_b12", a.l2_b12},
                      {"l1_b12", a.l1_b12},
                      {"decay_ok", a.decay_ok},
                      {"integral_ok", a.integral_ok}};
  }
  double flux = 0.0;
  for (const auto& r : d.series) flux = std::max(flux, r.flux);
  j["max_column_flux"] = flux;
  return j;
}

json verify_suite(std::string_view name, std::uint64_t seed) {
  json checks = json::array();
  auto add = [&checks](json more) {
    for (auto& c : more) checks.push_back(std::move(c));
  };
  const bool all = name == "all";
  bool known = all;
  if (all || name == "poincare") add(poincare_checks(seed)), known = true;
  if (all || name == "sup-constants") add(sup_checks()), known = true;
  if (all || name == "convexity") add(convexity_checks(seed)), known = true;
  if (all || name == "product-law") add(product_law_checks(seed)), known = true;
  if (all || name == "gh-equivalence") add(gh_checks()), known = true;
  if (!known) throw ConfigError("unknown verify suite: " + std::string(name));
  bool pass = true;
  for (const auto& c : checks) pass = pass && c["pass"].get<bool>();
  return {{"suite", name}, {"seed", seed}, {"checks", checks}, {"pass", pass}};
}

}  // namespace mhdbl
