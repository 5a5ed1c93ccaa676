// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mmcov/cli.hpp"
#include "mmcov/coverage.hpp"

namespace py = pybind11;
using namespace mmcov;

namespace {

// config overrides arrive as a JSON string (the Python side does the dumps)
RunConfig parse_config(const std::string &overrides) {
  if (overrides.empty()) return {};
  return config_from_json(nlohmann::json::parse(overrides));
}

py::dict reach_dict(const ReachabilityStats &r) {
  py::dict d;
  d["points"] = r.points;
  d["direct"] = r.direct;
  d["relay"] = r.relay;
  d["either"] = r.either;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "mmWave relay coverage simulator (C++ core)";

  static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
  static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError &e) {
      domain_error(e.what());
    } catch (const IoError &e) {
      io_error(e.what());
    } catch (const nlohmann::json::exception &e) {
      domain_error(e.what());
    }
  });

  m.def("version", &version_string);

  m.def("ncr_e2e_gain_db", &ncr_e2e_gain_db, py::arg("amp_gain_db"), py::arg("panel_elements"));

  m.def(
      "dynamic_block_probability",
      [](double r, double z_t, double z_r, const std::string &overrides) {
        return dynamic_block_probability(r, z_t, z_r, parse_config(overrides).blockage);
      },
      py::arg("r"), py::arg("z_t"), py::arg("z_r"), py::arg("config") = "");

  m.def(
      "coverage_probability",
      [](const std::vector<double> &snr_db, double th) { return coverage_probability(snr_db, th); },
      py::arg("snr_db"), py::arg("threshold_db"));

  m.def(
      "default_config", [] { return nlohmann::json(RunConfig{}).dump(); },
      "Reference operating point as a JSON string.");

  m.def(
      "validate",
      [](const std::filesystem::path &scenario, const std::string &relay) {
        const RunConfig c;
        const ScenarioMap map = load_scenario(scenario, c.heights);
        std::optional<RelayKind> kind;
        if (!relay.empty()) kind = relay_kind_from_string(relay);
        const SimulationContext ctx = build_context(map, c, kind);
        py::dict d = reach_dict(reachability(ctx));
        d["buildings"] = map.buildings.size();
        d["relay_kind"] = std::string(to_string(ctx.map.relay.kind));
        return d;
      },
      py::arg("scenario"), py::arg("relay") = "");

  m.def(
      "heatmap",
      [](const std::filesystem::path &scenario, const std::string &mode, const std::string &overrides,
         std::optional<std::uint64_t> seed, std::optional<unsigned> threads) {
        RunConfig c = parse_config(overrides);
        c.mode = mode_from_string(mode);
        if (seed) c.seed = *seed;
        if (threads) c.threads = *threads;
        const ScenarioMap map = load_scenario(scenario, c.heights);
        CoverageResult r;
        {
          py::gil_scoped_release release;
          r = heatmap(map, c);
        }
        std::vector<double> x, y, z;
        std::vector<std::string> chosen;
        for (std::size_t i = 0; i < r.size(); ++i) {
          x.push_back(r.positions[i].x);
          y.push_back(r.positions[i].y);
          z.push_back(r.positions[i].z);
          chosen.emplace_back(to_string(r.chosen[i]));
        }
        py::dict pc;
        for (double th : c.thresholds_db) pc[py::float_(th)] = coverage_probability(r.snr_db, th);
        py::dict d;
        d["x"] = x;
        d["y"] = y;
        d["z"] = z;
        d["snr_db"] = r.snr_db;
        d["chosen_link"] = chosen;
        d["coverage_probability"] = pc;
        return d;
      },
      py::arg("scenario"), py::arg("mode") = "direct", py::arg("config") = "", py::arg("seed") = py::none(),
      py::arg("threads") = py::none());

  m.def(
      "sweep",
      [](const std::filesystem::path &scenario, const std::string &param, const std::vector<double> &values,
         const std::vector<double> &thresholds, const std::string &overrides) {
        const RunConfig c = parse_config(overrides);
        const ScenarioMap map = load_scenario(scenario, c.heights);
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = sweep(map, c, sweep_param_from_string(param), values, thresholds);
        }
        py::dict d;
        d["param"] = std::string(to_string(r.param));
        d["values"] = r.values;
        d["thresholds_db"] = r.thresholds_db;
        d["pc_relay_only"] = r.pc_relay_only;
        d["pc_relay_aided"] = r.pc_relay_aided;
        return d;
      },
      py::arg("scenario"), py::arg("param"), py::arg("values"), py::arg("thresholds_db"), py::arg("config") = "");

  m.def(
      "run_cli",
      [](const std::vector<std::string> &args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
