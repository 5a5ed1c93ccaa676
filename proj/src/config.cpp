// SPDX-License-Identifier: Apache-2.0
#include "mmcov/config.hpp"

namespace mmcov {

using nlohmann::json;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Direct: return "direct";
    case Mode::RisOnly: return "ris";
    case Mode::NcrOnly: return "ncr";
    case Mode::RisAided: return "ris-aided";
    case Mode::NcrAided: return "ncr-aided";
  }
  return "direct";
}

Mode mode_from_string(std::string_view name) {
  for (Mode m : {Mode::Direct, Mode::RisOnly, Mode::NcrOnly, Mode::RisAided, Mode::NcrAided})
    if (to_string(m) == name) return m;
  throw DomainError("unknown mode '" + std::string(name) + "'");
}

std::optional<RelayKind> relay_kind_of(Mode mode) {
  switch (mode) {
    case Mode::RisOnly:
    case Mode::RisAided: return RelayKind::Ris;
    case Mode::NcrOnly:
    case Mode::NcrAided: return RelayKind::Ncr;
    case Mode::Direct: break;
  }
  return std::nullopt;
}

bool is_aided(Mode mode) { return mode == Mode::RisAided || mode == Mode::NcrAided; }

PathGainModel RunConfig::path_gain_model() const {
  PathGainModel m;
  m.kind = propagation.pathloss;
  m.carrier_hz = radio.carrier_hz;
  m.shadowing_std_db = propagation.shadowing_std_db;
  m.seed = seed;
  return m;
}

void validate_config(const RunConfig &c) {
  if (!(c.radio.carrier_hz > 0.0)) throw DomainError("radio.carrier_hz: must be positive");
  if (!(c.radio.bandwidth_hz > 0.0)) throw DomainError("radio.bandwidth_hz: must be positive");
  if (!std::isfinite(c.radio.tx_power_dbm)) throw DomainError("radio.tx_power_dbm: must be finite");
  if (c.radio.bs_nh < 1 || c.radio.bs_nv < 1) throw DomainError("radio.bs_array: nh and nv must be >= 1");
  if (c.ncr.nh < 1 || c.ncr.nv < 1) throw DomainError("ncr.array: nh and nv must be >= 1");
  if (!std::isfinite(c.ncr.amp_gain_db)) throw DomainError("ncr.amp_gain_db: must be finite");
  if (c.ncr.min_separation_deg < 0.0 || c.ncr.min_separation_deg > 180.0)
    throw DomainError("ncr.min_separation_deg: must lie in [0, 180]");
  if (c.ris.mh < 1 || c.ris.mv < 1) throw DomainError("ris.elements: mh and mv must be >= 1");
  if (c.ris.q < 0.0) throw DomainError("ris.q: must be >= 0");
  validate_blockage(c.blockage);
  if (c.propagation.shadowing_std_db < 0.0) throw DomainError("propagation.shadowing_std_db: must be >= 0");
  if (c.streams < 1) throw DomainError("streams: must be >= 1");
  for (double t : c.thresholds_db)
    if (std::isnan(t)) throw DomainError("thresholds_db: NaN threshold");
}

RunConfig resolve_with_scenario(RunConfig c, const ScenarioMap &map) {
  if (map.bs.array) std::tie(c.radio.bs_nh, c.radio.bs_nv) = *map.bs.array;
  if (map.bs.tx_power_dbm) c.radio.tx_power_dbm = *map.bs.tx_power_dbm;
  if (map.relay.ris_elements) std::tie(c.ris.mh, c.ris.mv) = *map.relay.ris_elements;
  if (map.relay.ncr_array) std::tie(c.ncr.nh, c.ncr.nv) = *map.relay.ncr_array;
  if (map.relay.min_separation_deg) c.ncr.min_separation_deg = *map.relay.min_separation_deg;
  return c;
}

namespace {

std::string_view pathloss_name(PathlossKind k) { return k == PathlossKind::CloseIn3gpp ? "close-in-3gpp" : "free-space"; }

PathlossKind pathloss_from(std::string_view s) {
  if (s == "close-in-3gpp") return PathlossKind::CloseIn3gpp;
  if (s == "free-space") return PathlossKind::FreeSpace;
  throw DomainError("propagation.pathloss: unknown model '" + std::string(s) + "'");
}

std::string_view form_name(HeightRatioForm f) { return f == HeightRatioForm::Corrected ? "corrected" : "as-printed"; }

HeightRatioForm form_from(std::string_view s) {
  if (s == "corrected") return HeightRatioForm::Corrected;
  if (s == "as-printed") return HeightRatioForm::AsPrinted;
  throw DomainError("blockage.height_ratio: unknown form '" + std::string(s) + "'");
}

std::string_view blocked_name(BlockedState b) { return b == BlockedState::KnifeEdge ? "knife-edge" : "outage"; }

BlockedState blocked_from(std::string_view s) {
  if (s == "knife-edge") return BlockedState::KnifeEdge;
  if (s == "outage") return BlockedState::Outage;
  throw DomainError("blockage.blocked_state: unknown policy '" + std::string(s) + "'");
}

template <class T>
void read(const json &obj, const char *key, T &dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception &e) {
    throw DomainError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

void to_json(json &j, const RunConfig &c) {
  j = json{
      {"mode", to_string(c.mode)},
      {"radio",
       {{"carrier_hz", c.radio.carrier_hz},
        {"bandwidth_hz", c.radio.bandwidth_hz},
        {"tx_power_dbm", c.radio.tx_power_dbm},
        {"bs_nh", c.radio.bs_nh},
        {"bs_nv", c.radio.bs_nv},
        {"nf_ue_db", c.radio.nf_ue_db}}},
      {"heights", {{"bs_m", c.heights.bs}, {"relay_m", c.heights.relay}, {"ue_m", c.heights.ue}}},
      {"ncr",
       {{"nh", c.ncr.nh},
        {"nv", c.ncr.nv},
        {"amp_gain_db", c.ncr.amp_gain_db},
        {"e2e_gain_db", ncr_e2e_gain_db(c.ncr.amp_gain_db, c.ncr.nh * c.ncr.nv)},
        {"max_e2e_gain_db", c.ncr.max_e2e_gain_db},
        {"nf_db", c.ncr.nf_db},
        {"min_separation_deg", c.ncr.min_separation_deg}}},
      {"ris", {{"mh", c.ris.mh}, {"mv", c.ris.mv}, {"q", c.ris.q}}},
      {"blockage",
       {{"density_per_m2", c.blockage.density},
        {"speed_mps", c.blockage.speed},
        {"duration_s", c.blockage.duration_s},
        {"blocker_height_m", c.blockage.blocker_height},
        {"blocker_width_m", c.blockage.blocker_width},
        {"height_ratio", form_name(c.blockage.form)},
        {"blocked_state", blocked_name(c.blocked_state)}}},
      {"propagation",
       {{"pathloss", pathloss_name(c.propagation.pathloss)}, {"shadowing_std_db", c.propagation.shadowing_std_db}}},
      {"joint_mode", to_string(c.joint)},
      {"streams", c.streams},
      {"thresholds_db", c.thresholds_db},
      {"seed", c.seed},
      {"noise",
       {{"ue_noise_dbm", lin2db(c.ue_noise_mw())}, {"ncr_noise_dbm", lin2db(c.ncr_noise_mw())}}},
  };
}

RunConfig config_from_json(const json &j, RunConfig c) {
  if (!j.is_object()) throw DomainError("config: top-level value must be an object");
  if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("radio")) {
    const json &r = j.at("radio");
    read(r, "carrier_hz", c.radio.carrier_hz);
    read(r, "bandwidth_hz", c.radio.bandwidth_hz);
    read(r, "tx_power_dbm", c.radio.tx_power_dbm);
    read(r, "bs_nh", c.radio.bs_nh);
    read(r, "bs_nv", c.radio.bs_nv);
    read(r, "nf_ue_db", c.radio.nf_ue_db);
  }
  if (j.contains("heights")) {
    const json &h = j.at("heights");
    read(h, "bs_m", c.heights.bs);
    read(h, "relay_m", c.heights.relay);
    read(h, "ue_m", c.heights.ue);
  }
  if (j.contains("ncr")) {
    const json &n = j.at("ncr");
    read(n, "nh", c.ncr.nh);
    read(n, "nv", c.ncr.nv);
    read(n, "amp_gain_db", c.ncr.amp_gain_db);
    read(n, "max_e2e_gain_db", c.ncr.max_e2e_gain_db);
    read(n, "nf_db", c.ncr.nf_db);
    read(n, "min_separation_deg", c.ncr.min_separation_deg);
  }
  if (j.contains("ris")) {
    const json &r = j.at("ris");
    read(r, "mh", c.ris.mh);
    read(r, "mv", c.ris.mv);
    read(r, "q", c.ris.q);
  }
  if (j.contains("blockage")) {
    const json &b = j.at("blockage");
    read(b, "density_per_m2", c.blockage.density);
    read(b, "speed_mps", c.blockage.speed);
    read(b, "duration_s", c.blockage.duration_s);
    read(b, "blocker_height_m", c.blockage.blocker_height);
    read(b, "blocker_width_m", c.blockage.blocker_width);
    if (b.contains("height_ratio")) c.blockage.form = form_from(b.at("height_ratio").get<std::string>());
    if (b.contains("blocked_state")) c.blocked_state = blocked_from(b.at("blocked_state").get<std::string>());
  }
  if (j.contains("propagation")) {
    const json &p = j.at("propagation");
    if (p.contains("pathloss")) c.propagation.pathloss = pathloss_from(p.at("pathloss").get<std::string>());
    read(p, "shadowing_std_db", c.propagation.shadowing_std_db);
  }
  if (j.contains("joint_mode")) c.joint = joint_mode_from_string(j.at("joint_mode").get<std::string>());
  read(j, "streams", c.streams);
  read(j, "thresholds_db", c.thresholds_db);
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  validate_config(c);
  return c;
}

}  // namespace mmcov
