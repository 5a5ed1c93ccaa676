// SPDX-License-Identifier: Apache-2.0
#include "mmcov/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#ifndef MMCOV_VERSION
#define MMCOV_VERSION "0.0.0"
#endif

namespace mmcov {

using nlohmann::json;

std::string version_string() { return MMCOV_VERSION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string heatmap_csv(const CoverageResult &r, const std::vector<double> &thresholds_db) {
  std::ostringstream os;
  os << "x,y,z,snr_db";
  for (double th : thresholds_db) os << ",served_at_" << format_double(th);
  os << ",chosen_link\n";
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Vec3 &p = r.positions[i];
    os << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z) << ','
       << format_double(r.snr_db[i]);
    for (double th : thresholds_db) os << ',' << (r.snr_db[i] > th ? 1 : 0);
    os << ',' << to_string(r.chosen[i]) << '\n';
  }
  return os.str();
}

std::string sweep_csv(const SweepResult &r) {
  std::ostringstream os;
  os << "param_value,gamma_th_db,p_c_relay_only,p_c_relay_aided\n";
  for (std::size_t v = 0; v < r.values.size(); ++v)
    for (std::size_t t = 0; t < r.thresholds_db.size(); ++t)
      os << format_double(r.values[v]) << ',' << format_double(r.thresholds_db[t]) << ','
         << format_double(r.pc_relay_only[v][t]) << ',' << format_double(r.pc_relay_aided[v][t]) << '\n';
  return os.str();
}

json run_metadata(const RunConfig &config) {
  json j;
  j["version"] = version_string();
  j["seed"] = config.seed;
  j["config"] = config;
  return j;
}

namespace {

json thresholds_json(const std::vector<double> &ths) {
  json a = json::array();
  for (double t : ths) a.push_back(std::isfinite(t) ? json(t) : json(format_double(t)));
  return a;
}

void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void ensure_dir(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

RunConfig load_config(const std::string &path, bool reference_defaults) {
  RunConfig c;
  if (reference_defaults || path.empty()) return c;
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error &e) {
    throw IoError("config '" + path + "': parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return config_from_json(j, c);
  } catch (const json::exception &e) {
    throw DomainError("config '" + path + "': " + e.what());
  }
}

struct CommonOptions {
  std::string scenario;
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::vector<double> thresholds;
  unsigned threads = 0;
  bool threads_given = false;
  std::string joint;
  bool reference_defaults = false;
};

RunConfig resolve(const CommonOptions &o, const CLI::App &cmd) {
  RunConfig c = load_config(o.config, o.reference_defaults);
  if (cmd.count("--seed")) c.seed = o.seed;
  if (cmd.count("--gamma-th")) c.thresholds_db = o.thresholds;
  if (cmd.count("--threads")) c.threads = o.threads;
  if (!o.joint.empty()) c.joint = joint_mode_from_string(o.joint);
  validate_config(c);
  return c;
}

void add_common(CLI::App *cmd, CommonOptions &o) {
  cmd->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  cmd->add_option("--out", o.out, "Output directory")->required();
  auto *cfg = cmd->add_option("--config", o.config, "Run configuration JSON (partial overrides)");
  cmd->add_flag("--reference-defaults", o.reference_defaults, "Use the built-in reference parameters only")
      ->excludes(cfg);
  cmd->add_option("--seed", o.seed, "Shadowing seed");
  cmd->add_option("--gamma-th", o.thresholds, "SNR thresholds in dB")->delimiter(',');
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--joint-mode", o.joint, "best-link or combined");
}

int cmd_validate(const std::string &path, std::ostream &out) {
  const RunConfig defaults;
  const ScenarioMap map = load_scenario(path, defaults.heights);
  const std::vector<Vec3> raw = raw_grid(map);
  const std::vector<Vec3> grid = generate_ue_grid(map);
  const ReachabilityStats st = reachability(map, grid);
  std::size_t outside = 0;
  for (const Vec3 &p : raw) outside += !inside_any_building(map, {p.x, p.y});

  char line[160];
  out << "scenario: " << path << "\n";
  out << "buildings: " << map.buildings.size() << "\n";
  out << "relay: " << to_string(map.relay.kind) << "\n";
  out << "grid points: " << raw.size() << " (outside buildings: " << outside << ")\n";
  out << "potential coverage set: " << grid.size() << "\n";
  std::snprintf(line, sizeof line, "reachable: direct %.4f, relay %.4f, either %.4f\n", st.direct, st.relay, st.either);
  out << line;
  if (map.relay.kind == RelayKind::Ncr) {
    std::snprintf(line, sizeof line, "ncr panel separation: %.2f deg\n", ncr_panel_separation_deg(map));
    out << line;
  }
  const auto sector = serving_sector(map.bs, map.relay.position);
  out << "relay sector: " << (sector ? std::to_string(*sector) : std::string("none")) << "\n";
  out << "checks: ok\n";
  return kExitOk;
}

int cmd_heatmap(const CommonOptions &o, const std::string &mode_name, const CLI::App &cmd, std::ostream &out) {
  RunConfig c = resolve(o, cmd);
  c.mode = mode_from_string(mode_name);
  const ScenarioMap map = load_scenario(o.scenario, c.heights);
  const SimulationContext ctx = build_context(map, c);
  const CoverageResult r = heatmap(ctx, c.mode);

  json meta = run_metadata(ctx.config);
  meta["command"] = "heatmap";
  meta["scenario"] = o.scenario;
  meta["mode"] = to_string(c.mode);
  meta["relay"] = to_string(*ctx.relay);
  meta["points"] = r.size();
  json pc = json::object();
  for (double th : ctx.config.thresholds_db) pc[format_double(th)] = coverage_probability(r.snr_db, th);
  meta["coverage_probability"] = pc;
  meta["thresholds_db"] = thresholds_json(ctx.config.thresholds_db);
  meta["config"]["thresholds_db"] = thresholds_json(ctx.config.thresholds_db);

  const std::filesystem::path dir(o.out);
  const std::string csv = heatmap_csv(r, ctx.config.thresholds_db);
  ensure_dir(dir);
  write_file(dir / "heatmap.csv", csv);
  write_file(dir / "heatmap.json", meta.dump(2) + "\n");
  out << "wrote " << (dir / "heatmap.csv").string() << " (" << r.size() << " points)\n";
  return kExitOk;
}

int cmd_sweep(const CommonOptions &o, const std::string &relay_name, const std::string &param_name,
              const std::vector<double> &values, const CLI::App &cmd, std::ostream &out) {
  RunConfig c = resolve(o, cmd);
  const RelayKind kind = relay_kind_from_string(relay_name);
  const SweepParam param = sweep_param_from_string(param_name);
  if (relay_kind_of(param) != kind)
    throw DomainError("--param " + param_name + " does not apply to relay '" + relay_name + "'");
  if (values.empty()) throw DomainError("--values: at least one value is required");
  c.mode = kind == RelayKind::Ris ? Mode::RisAided : Mode::NcrAided;
  const ScenarioMap map = load_scenario(o.scenario, c.heights);
  const SweepResult r = sweep(map, c, param, values, c.thresholds_db);

  json meta = run_metadata(resolve_with_scenario(c, map));
  meta["command"] = "sweep";
  meta["scenario"] = o.scenario;
  meta["relay"] = to_string(kind);
  meta["param"] = to_string(param);
  meta["values"] = values;
  meta["thresholds_db"] = thresholds_json(c.thresholds_db);
  meta["config"]["thresholds_db"] = thresholds_json(c.thresholds_db);

  const std::filesystem::path dir(o.out);
  const std::string csv = sweep_csv(r);
  ensure_dir(dir);
  write_file(dir / "sweep.csv", csv);
  write_file(dir / "sweep.json", meta.dump(2) + "\n");
  out << "wrote " << (dir / "sweep.csv").string() << " (" << values.size() * c.thresholds_db.size() << " rows)\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"mmWave coverage simulator with RIS and NCR relays", "mmcov"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  std::string validate_path;
  auto *validate = app.add_subcommand("validate", "Check a scenario file and print statistics");
  validate->add_option("scenario", validate_path, "Scenario JSON file")->required();

  CommonOptions hm;
  std::string mode_name;
  auto *hcmd = app.add_subcommand("heatmap", "Per-point long-term SNR over the coverage grid");
  add_common(hcmd, hm);
  hcmd->add_option("--mode", mode_name, "direct | ris | ncr | ris-aided | ncr-aided")->required();

  CommonOptions sw;
  std::string relay_name, param_name;
  std::vector<double> values;
  auto *scmd = app.add_subcommand("sweep", "Coverage probability versus a relay parameter");
  add_common(scmd, sw);
  scmd->add_option("--relay", relay_name, "ris | ncr")->required();
  scmd->add_option("--param", param_name, "ris-elements-per-side | ncr-e2e-gain-db | ncr-elements-per-side")
      ->required();
  scmd->add_option("--values", values, "Parameter values")->delimiter(',')->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return kExitIo;
  }

  try {
    if (*validate) return cmd_validate(validate_path, out);
    if (*hcmd) return cmd_heatmap(hm, mode_name, *hcmd, out);
    if (*scmd) return cmd_sweep(sw, relay_name, param_name, values, *scmd, out);
  } catch (const IoError &e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DomainError &e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitDomain;
}

}  // namespace mmcov
