// SPDX-License-Identifier: Apache-2.0
#include "mmcov/coverage.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace mmcov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Single-antenna UE whose (isotropic) element faces the given source.
PlacedArray ue_facing(const Vec3 &ue, const Vec3 &source) {
  PlacedArray p;
  p.position = ue;
  p.array.nh = p.array.nv = 1;
  p.array.spacing = 1.0;
  p.array.pattern = Isotropic{};
  p.array.boresight = direction_between(ue, source);
  return p;
}

std::size_t sector_for_relay(const ScenarioMap &map) {
  const auto s = serving_sector(map.bs, map.relay.position);
  if (!s) throw DomainError("relay is outside every BS sector FoV");
  return *s;
}

double blocked_loss(const SimulationContext &ctx, const Vec3 &a, const Vec3 &b) {
  if (ctx.config.blocked_state == BlockedState::Outage) return kInf;
  // No screen fits between vertically stacked endpoints.
  if ((b - a).norm2d() < 1e-9) return 0.0;
  return knife_edge_loss(canonical_blocker(a, b, ctx.config.blockage), ctx.wavelength);
}

double scale_for_loss(double loss_db) { return std::isinf(loss_db) ? 0.0 : std::pow(10.0, -loss_db / 20.0); }

struct RelayChannels {
  ChannelMatrix h;
  ChannelMatrix h_noise;
  bool clamped = false;
};

RelayChannels relay_channels(const SimulationContext &ctx, const Vec3 &ue) {
  RelayChannels out;
  const Vec3 rpos = ctx.map.relay.position;
  if (*ctx.relay == RelayKind::Ris) {
    const PlacedArray ue_arr = ue_facing(ue, rpos);
    const ChannelMatrix reflected = ris_reflected_channel(ctx.ris, ue_arr, ctx.gains);
    out.h = reflected.cwiseAbs().cast<cplx>() * ctx.ris_incident_cophased;
    return out;
  }
  PlacedArray service{ctx.ncr.service, rpos};
  const ChannelMatrix h_o = far_field_channel(service, ue_facing(ue, rpos), ctx.gains, link_seed(rpos, ue, ctx.gains.seed));
  const NcrBeamformers bf = ncr_beamformers(ctx.ncr, ctx.map.bs.position, h_o, ctx.wavelength);
  NcrChannel nc = ncr_channel(ctx.ncr_donor_channel, h_o, ctx.ncr, bf);
  out.h = std::move(nc.h);
  out.h_noise = std::move(nc.h_noise);
  out.clamped = nc.clamped;
  return out;
}

}  // namespace

bool relay_serves(const ScenarioMap &map, const Vec3 &ue) {
  const Vec3 rpos = map.relay.position;
  if (ue == rpos) return false;
  if (map.relay.kind == RelayKind::Ris) {
    if ((ue - rpos).dot(panel_axes(map.relay.boresight).normal) <= 0.0) return false;
  } else if (!in_sector_fov(map.relay.boresight, ue, rpos)) {
    return false;
  }
  return los_visible(rpos, ue, map);
}

bool bs_serves(const ScenarioMap &map, const Vec3 &ue) {
  return ue != map.bs.position && serving_sector(map.bs, ue) && los_visible(map.bs.position, ue, map);
}

SimulationContext build_context(const ScenarioMap &map, const RunConfig &config_in, std::optional<RelayKind> relay) {
  SimulationContext ctx;
  ctx.map = map;
  ctx.config = resolve_with_scenario(config_in, map);
  validate_config(ctx.config);
  const RunConfig &c = ctx.config;

  ctx.relay = relay ? relay : relay_kind_of(c.mode);
  if (!ctx.relay) ctx.relay = map.relay.kind;
  // The same mount can host either relay kind.
  ctx.map.relay.kind = *ctx.relay;
  ctx.grid = generate_ue_grid(map);
  ctx.wavelength = c.wavelength();
  ctx.gains = c.path_gain_model();
  ctx.budget = {dbm2mw(c.radio.tx_power_dbm), c.ue_noise_mw(), c.ncr_noise_mw(), c.streams};

  for (double az : map.bs.sector_azimuths_deg) {
    PlacedArray sector;
    sector.position = map.bs.position;
    sector.array = {c.radio.bs_nh, c.radio.bs_nv, ctx.wavelength / 2.0, {az, map.bs.sector_elevation_deg}, ThreeGppPatch{}};
    ctx.bs_sectors.push_back(sector);
  }

  ctx.relay_sector = sector_for_relay(map);
  const PlacedArray &bs = ctx.bs_sectors[ctx.relay_sector];
  if (*ctx.relay == RelayKind::Ris) {
    ctx.ris.position = map.relay.position;
    ctx.ris.array = {c.ris.mh, c.ris.mv, ctx.wavelength / 4.0, map.relay.boresight, CosineQ{c.ris.q}};
    validate_array(ctx.ris.array);
    ctx.ris_incident = ris_incident_channel(bs, ctx.ris, ctx.gains);
    ctx.ris_incident_cophased = ctx.ris_incident;
    for (Eigen::Index m = 0; m < ctx.ris_incident.rows(); ++m)
      ctx.ris_incident_cophased.row(m) *= std::polar(1.0, -std::arg(ctx.ris_incident(m, 0)));
  } else {
    check_ncr_separation(map, c.ncr.min_separation_deg);
    ctx.ncr.position = map.relay.position;
    ctx.ncr.donor = {c.ncr.nh, c.ncr.nv, ctx.wavelength / 2.0, donor_panel_boresight(map.relay, map.bs.position),
                     ThreeGppPatch{}};
    ctx.ncr.service = {c.ncr.nh, c.ncr.nv, ctx.wavelength / 2.0, map.relay.boresight, ThreeGppPatch{}};
    ctx.ncr.amp_power_gain = db2lin(c.ncr.amp_gain_db);
    ctx.ncr.max_e2e_gain_db = c.ncr.max_e2e_gain_db;
    ctx.ncr.noise_figure_db = c.ncr.nf_db;
    if (!in_sector_fov(ctx.ncr.donor.boresight, map.bs.position, ctx.ncr.position))
      throw DomainError("relay: BS is outside the NCR donor panel FoV");
    const PlacedArray donor{ctx.ncr.donor, ctx.ncr.position};
    ctx.ncr_donor_channel = far_field_channel(bs, donor, ctx.gains, link_seed(bs.position, donor.position, ctx.gains.seed));
  }
  return ctx;
}

PointAssessment assess_point(const SimulationContext &ctx, const Vec3 &ue, bool with_combinations) {
  PointAssessment pa;
  const Vec3 bs_pos = ctx.map.bs.position;
  const Vec3 rpos = ctx.map.relay.position;
  const NoiseBudget &budget = ctx.budget;
  const auto n_t = ctx.bs_sectors.front().array.size();
  const ChannelMatrix zero = ChannelMatrix::Zero(1, n_t);

  // Direct link through the best sector.
  ChannelMatrix h_direct = zero;
  if (ue != bs_pos) {
    pa.direct_blockage.static_blocked = !los_visible(bs_pos, ue, ctx.map);
    pa.direct_blockage.dynamic_block_prob =
        dynamic_block_probability(distance(bs_pos, ue), bs_pos.z, ue.z, ctx.config.blockage);
    pa.direct_blockage.blocked_loss_db = blocked_loss(ctx, bs_pos, ue);
    if (const auto s = serving_sector(ctx.map.bs, ue); s && !pa.direct_blockage.static_blocked) {
      h_direct = direct_channel(ctx.bs_sectors[*s], ue_facing(ue, bs_pos), ctx.map, ctx.gains).h;
      pa.direct_reachable = true;
    }
  }
  const double direct_snr = pa.direct_reachable ? beamformed_snr(h_direct, zero, ChannelMatrix(), budget) : 0.0;
  const double ad = scale_for_loss(pa.direct_blockage.blocked_loss_db);
  pa.direct = {direct_snr * ad * ad, direct_snr, pa.direct_blockage.dynamic_block_prob};

  // Relayed link. The BS-relay leg is never blocked.
  RelayChannels relay{zero, ChannelMatrix(), false};
  if (ue != rpos) {
    pa.relay_blockage.static_blocked = !los_visible(rpos, ue, ctx.map);
    pa.relay_blockage.dynamic_block_prob =
        dynamic_block_probability(distance(rpos, ue), rpos.z, ue.z, ctx.config.blockage);
    pa.relay_blockage.blocked_loss_db = blocked_loss(ctx, rpos, ue);
    if (relay_serves(ctx.map, ue)) {
      relay = relay_channels(ctx, ue);
      pa.relay_reachable = true;
      pa.ncr_clamped = relay.clamped;
    }
  }
  const double ar = scale_for_loss(pa.relay_blockage.blocked_loss_db);
  if (pa.relay_reachable) {
    const ChannelMatrix blocked_noise = relay.h_noise.size() ? ChannelMatrix(ar * relay.h_noise) : ChannelMatrix();
    pa.relayed = {beamformed_snr(zero, ar * relay.h, blocked_noise, budget),
                  beamformed_snr(zero, relay.h, relay.h_noise, budget), pa.relay_blockage.dynamic_block_prob};
  } else {
    pa.relayed = {0.0, 0.0, pa.relay_blockage.dynamic_block_prob};
  }

  if (with_combinations) {
    // Joint transmission needs both legs on the sector that feeds the relay.
    AidedChannels ch;
    ch.direct = zero;
    const PlacedArray &sector = ctx.bs_sectors[ctx.relay_sector];
    if (ue != bs_pos && !pa.direct_blockage.static_blocked && in_sector_fov(sector.array.boresight, ue, bs_pos))
      ch.direct = direct_channel(sector, ue_facing(ue, bs_pos), ctx.map, ctx.gains).h;
    ch.relay = relay.h;
    ch.relay_noise = relay.h_noise;
    ch.direct_loss_db = pa.direct_blockage.blocked_loss_db;
    ch.relay_loss_db = pa.relay_blockage.blocked_loss_db;
    if (std::isinf(ch.direct_loss_db)) ch.direct_loss_db = 1e300;
    if (std::isinf(ch.relay_loss_db)) ch.relay_loss_db = 1e300;
    pa.combinations = aided_snr_combinations(ch, budget);
  }
  return pa;
}

LinkAssessment assessment_for_mode(const PointAssessment &pa, Mode mode, JointMode joint) {
  LinkAssessment out{pa.direct, pa.relayed, 0.0, ChosenLink::None};
  switch (mode) {
    case Mode::Direct:
      out.long_term = pa.direct.long_term();
      out.chosen = out.long_term > 0.0 ? ChosenLink::Direct : ChosenLink::None;
      return out;
    case Mode::RisOnly:
    case Mode::NcrOnly:
      out.long_term = pa.relayed.long_term();
      out.chosen = out.long_term > 0.0 ? ChosenLink::Relay : ChosenLink::None;
      return out;
    case Mode::RisAided:
    case Mode::NcrAided:
      return joint_long_term_snr(pa.direct, pa.relayed, joint, pa.combinations);
  }
  return out;
}

LinkAssessment evaluate_point(const SimulationContext &ctx, const Vec3 &ue, Mode mode) {
  if (const auto kind = relay_kind_of(mode); kind && kind != ctx.relay)
    throw DomainError("evaluate_point: mode '" + std::string(to_string(mode)) + "' needs a " +
                      std::string(to_string(*kind)) + " context");
  const bool combos = is_aided(mode) && ctx.config.joint == JointMode::Combined;
  return assessment_for_mode(assess_point(ctx, ue, combos), mode, ctx.config.joint);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto &th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<PointAssessment> assess_grid(const SimulationContext &ctx, bool with_combinations) {
  std::vector<PointAssessment> out(ctx.grid.size());
  parallel_for(ctx.grid.size(), ctx.config.threads,
               [&](std::size_t i) { out[i] = assess_point(ctx, ctx.grid[i], with_combinations); });
  return out;
}

namespace {

CoverageResult to_result(const SimulationContext &ctx, const std::vector<PointAssessment> &pas, Mode mode) {
  CoverageResult r;
  r.mode = mode;
  r.positions = ctx.grid;
  r.snr_linear.resize(pas.size());
  r.snr_db.resize(pas.size());
  r.chosen.resize(pas.size());
  for (std::size_t i = 0; i < pas.size(); ++i) {
    const LinkAssessment la = assessment_for_mode(pas[i], mode, ctx.config.joint);
    r.snr_linear[i] = la.long_term;
    r.snr_db[i] = la.long_term > 0.0 ? lin2db(la.long_term) : -kInf;
    r.chosen[i] = la.chosen;
  }
  return r;
}

}  // namespace

CoverageResult heatmap(const SimulationContext &ctx, Mode mode) {
  if (const auto kind = relay_kind_of(mode); kind && kind != ctx.relay)
    throw DomainError("heatmap: mode '" + std::string(to_string(mode)) + "' needs a " + std::string(to_string(*kind)) +
                      " context");
  const bool combos = is_aided(mode) && ctx.config.joint == JointMode::Combined;
  return to_result(ctx, assess_grid(ctx, combos), mode);
}

CoverageResult heatmap(const ScenarioMap &map, const RunConfig &config) {
  return heatmap(build_context(map, config), config.mode);
}

double coverage_probability(std::span<const double> snr_db, double threshold_db) {
  if (snr_db.empty()) throw DomainError("coverage_probability: empty position set");
  const auto served = std::count_if(snr_db.begin(), snr_db.end(), [&](double s) { return s > threshold_db; });
  return static_cast<double>(served) / static_cast<double>(snr_db.size());
}

ReachabilityStats reachability(const ScenarioMap &map, const std::vector<Vec3> &grid) {
  ReachabilityStats st;
  st.points = grid.size();
  if (grid.empty()) return st;
  std::size_t d = 0, r = 0, e = 0;
  for (const Vec3 &ue : grid) {
    const bool dv = bs_serves(map, ue);
    const bool rv = relay_serves(map, ue);
    d += dv;
    r += rv;
    e += dv || rv;
  }
  const double n = static_cast<double>(st.points);
  st.direct = static_cast<double>(d) / n;
  st.relay = static_cast<double>(r) / n;
  st.either = static_cast<double>(e) / n;
  return st;
}

ReachabilityStats reachability(const SimulationContext &ctx) { return reachability(ctx.map, ctx.grid); }

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::RisElementsPerSide: return "ris-elements-per-side";
    case SweepParam::NcrE2eGainDb: return "ncr-e2e-gain-db";
    case SweepParam::NcrElementsPerSide: return "ncr-elements-per-side";
  }
  return "";
}

SweepParam sweep_param_from_string(std::string_view name) {
  for (SweepParam p : {SweepParam::RisElementsPerSide, SweepParam::NcrE2eGainDb, SweepParam::NcrElementsPerSide})
    if (to_string(p) == name) return p;
  throw DomainError("unknown sweep parameter '" + std::string(name) + "'");
}

RelayKind relay_kind_of(SweepParam p) { return p == SweepParam::RisElementsPerSide ? RelayKind::Ris : RelayKind::Ncr; }

RunConfig apply_sweep_value(RunConfig c, SweepParam p, double value) {
  const auto as_count = [&](double v) {
    if (!(v >= 1.0) || v != std::floor(v)) throw DomainError("sweep: element count must be a positive integer");
    return static_cast<int>(v);
  };
  switch (p) {
    case SweepParam::RisElementsPerSide:
      c.ris.mh = c.ris.mv = as_count(value);
      break;
    case SweepParam::NcrElementsPerSide:
      c.ncr.nh = c.ncr.nv = as_count(value);
      c.ncr.max_e2e_gain_db = std::max(c.ncr.max_e2e_gain_db, ncr_e2e_gain_db(c.ncr.amp_gain_db, c.ncr.nh * c.ncr.nv));
      break;
    case SweepParam::NcrE2eGainDb:
      if (!std::isfinite(value)) throw DomainError("sweep: E2E gain must be finite");
      c.ncr.amp_gain_db = value - 20.0 * std::log10(static_cast<double>(c.ncr.nh * c.ncr.nv));
      c.ncr.max_e2e_gain_db = std::max(c.ncr.max_e2e_gain_db, value);
      break;
  }
  return c;
}

SweepResult sweep(const ScenarioMap &map, const RunConfig &config, SweepParam param, std::span<const double> values,
                  std::span<const double> thresholds_db) {
  SweepResult out;
  out.param = param;
  out.values.assign(values.begin(), values.end());
  out.thresholds_db.assign(thresholds_db.begin(), thresholds_db.end());
  const RelayKind kind = relay_kind_of(param);
  const Mode only = kind == RelayKind::Ris ? Mode::RisOnly : Mode::NcrOnly;
  const Mode aided = kind == RelayKind::Ris ? Mode::RisAided : Mode::NcrAided;
  const RunConfig base = resolve_with_scenario(config, map);
  // Sizes from the scenario are already in `base`; the swept value must win.
  ScenarioMap swept_map = map;
  swept_map.relay.ris_elements.reset();
  swept_map.relay.ncr_array.reset();
  for (double v : values) {
    const SimulationContext ctx = build_context(swept_map, apply_sweep_value(base, param, v), kind);
    const auto pas = assess_grid(ctx, ctx.config.joint == JointMode::Combined);
    const CoverageResult r_only = to_result(ctx, pas, only);
    const CoverageResult r_aided = to_result(ctx, pas, aided);
    std::vector<double> row_only, row_aided;
    for (double th : thresholds_db) {
      row_only.push_back(coverage_probability(r_only.snr_db, th));
      row_aided.push_back(coverage_probability(r_aided.snr_db, th));
    }
    out.pc_relay_only.push_back(std::move(row_only));
    out.pc_relay_aided.push_back(std::move(row_aided));
  }
  return out;
}

}  // namespace mmcov
