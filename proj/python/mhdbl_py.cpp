// Python extension: configuration, simulation, verifier suites and fits.
// JSON-valued results cross the boundary as strings; the package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mhdbl/config.hpp"
#include "mhdbl/errors.hpp"
#include "mhdbl/report.hpp"

namespace py = pybind11;
using namespace mhdbl;

namespace {

RunConfig configure(const std::string& text, const std::map<std::string, std::string>& overrides) {
  RunConfig c = parse_config(text);
  for (const auto& [k, v] : overrides) apply_setting(c, k, v);
  c.resolve();
  return c;
}

py::dict series_dict(const NormSeries& s) {
  py::dict d;
  for (const char* name : kNormColumns) {
    std::vector<double> col;
    col.reserve(s.size());
    for (const auto& row : s) col.push_back(sample_column(row, name));
    d[name] = col;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_mhdbl, m) {
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  m.def(
      "canonical_config",
      [](const std::string& text, const std::map<std::string, std::string>& overrides) {
        return to_text(configure(text, overrides));
      },
      py::arg("text"), py::arg("overrides") = std::map<std::string, std::string>{});

  m.def(
      "simulate",
      [](const std::string& text, const std::map<std::string, std::string>& overrides) {
        const RunConfig c = configure(text, overrides);
        Setup s = make_setup(c);
        Runner r(s.model, c.run);
        std::string status = "completed";
        {
          py::gil_scoped_release release;
          try {
            r.start(s.state);
            r.run();
          } catch (const RadiusExhausted&) {
            status = "radius_exhausted";
          } catch (const Divergence&) {
            status = "divergence";
          } catch (const TailViolation&) {
            status = "tail_violation";
          } catch (const IntegrityError&) {
            status = "integrity_error";
          }
        }
        return py::make_tuple(series_dict(r.diagnostics().series),
                              summary_json(c, s, r.diagnostics(), status).dump());
      },
      py::arg("text"), py::arg("overrides") = std::map<std::string, std::string>{});

  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t seed) {
        nlohmann::json j;
        {
          py::gil_scoped_release release;
          j = verify_suite(suite, seed);
        }
        return j.dump();
      },
      py::arg("suite"), py::arg("seed") = 1);

  m.def(
      "fit_decay",
      [](const std::vector<double>& t, const std::vector<double>& v, double t1, double t2) {
        const auto f = fit_decay(t, v, t1, t2);
        return py::make_tuple(f.exponent, f.std_error, f.samples);
      },
      py::arg("t"), py::arg("values"), py::arg("t1"), py::arg("t2"));

  m.def("sup_constants", [] {
    const auto c = sup_constants();
    return py::make_tuple(c.sup1, c.sup2);
  });
}
