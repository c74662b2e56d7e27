#pragma once

// Orchestration helpers shared by the command-line tool and the bindings:
// model/state construction from a config, norms.csv I/O, summary and verify
// reports as JSON.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mhdbl/config.hpp"
#include "mhdbl/run.hpp"
#include "mhdbl/verifier.hpp"

namespace mhdbl {

struct Setup {
  Model model;
  State state;
  std::optional<CompatibilityReport> compat;
  std::optional<AssumptionReport> assumption;
};
// Expects a resolved config.
Setup make_setup(const RunConfig& c);

// Columns t, theta, radius, norm_ub, norm_gh, norm_dy_gh, norm_phipsi,
// cl_dyub_sq; values printed with %.17g.
void write_norms_csv(const std::string& path, const NormSeries& s);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Throws ConfigError for a missing column.
  std::vector<double> column(std::string_view name) const;
};
// Throws FormatError for unreadable or ragged files.
CsvTable read_csv(const std::string& path);

// status: "completed", "radius_exhausted", ...
nlohmann::json summary_json(const RunConfig& c, const Setup& s, const Diagnostics& d, const std::string& status);

// Suites: poincare, sup-constants, convexity, product-law, gh-equivalence,
// all. Throws ConfigError for an unknown name.
nlohmann::json verify_suite(std::string_view name, std::uint64_t seed);
inline const char* kVerifySuites[] = {"poincare", "sup-constants", "convexity", "product-law", "gh-equivalence"};

}  // namespace mhdbl
