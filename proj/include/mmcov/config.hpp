// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mmcov/blockage.hpp"
#include "mmcov/channel.hpp"
#include "mmcov/link.hpp"
#include "mmcov/scene.hpp"

namespace mmcov {

enum class Mode { Direct, RisOnly, NcrOnly, RisAided, NcrAided };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view name);
/// Relay kind a mode needs; nullopt for direct.
std::optional<RelayKind> relay_kind_of(Mode mode);
bool is_aided(Mode mode);

/// Loss applied in the dynamically blocked state.
enum class BlockedState { KnifeEdge, Outage };

struct RadioConfig {
  double carrier_hz = 28e9;
  double bandwidth_hz = 200e6;
  double tx_power_dbm = 35.0;
  int bs_nh = 16;
  int bs_nv = 12;
  double nf_ue_db = 10.0;
};

struct NcrParams {
  int nh = 12;
  int nv = 6;
  double amp_gain_db = 55.0;
  double max_e2e_gain_db = 92.0;
  double nf_db = 8.0;
  double min_separation_deg = 120.0;
};

struct RisParams {
  int mh = 200;
  int mv = 200;
  double q = 0.029;
};

struct PropagationConfig {
  PathlossKind pathloss = PathlossKind::CloseIn3gpp;
  double shadowing_std_db = 4.0;
};

/// Every knob of a run. Defaults are the reference 28 GHz operating point.
struct RunConfig {
  Mode mode = Mode::Direct;
  RadioConfig radio;
  HeightDefaults heights;
  NcrParams ncr;
  RisParams ris;
  BlockageParams blockage;
  BlockedState blocked_state = BlockedState::KnifeEdge;
  PropagationConfig propagation;
  JointMode joint = JointMode::BestLink;
  int streams = 1;
  std::vector<double> thresholds_db{0.0, 5.0, 10.0};
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency

  double wavelength() const { return kSpeedOfLight / radio.carrier_hz; }
  double ue_noise_mw() const { return thermal_noise_mw(radio.bandwidth_hz, radio.nf_ue_db); }
  double ncr_noise_mw() const { return thermal_noise_mw(radio.bandwidth_hz, ncr.nf_db); }
  PathGainModel path_gain_model() const;
};

void validate_config(const RunConfig &config);

/// Applies the equipment overrides a scenario file carries (BS array, tx
/// power, relay sizes, NCR separation).
RunConfig resolve_with_scenario(RunConfig config, const ScenarioMap &map);

void to_json(nlohmann::json &j, const RunConfig &c);
/// Reads a (possibly partial) config; unspecified fields keep `base` values.
RunConfig config_from_json(const nlohmann::json &j, RunConfig base = {});

}  // namespace mmcov
