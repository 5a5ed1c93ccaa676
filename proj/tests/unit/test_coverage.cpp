// SPDX-License-Identifier: Apache-2.0
#include <limits>

#include "doctest.h"
#include "mmcov/coverage.hpp"

using namespace mmcov;
using doctest::Approx;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

RunConfig quiet_config() {
  RunConfig c;
  c.propagation.shadowing_std_db = 0.0;
  c.ris.mh = c.ris.mv = 16;
  c.threads = 1;
  return c;
}

ScenarioMap empty_scenario() { return load_scenario(MMCOV_DATA_DIR "/empty.json"); }

}  // namespace

TEST_CASE("direct link budget on the sector boresight") {
  RunConfig c = quiet_config();
  c.blocked_state = BlockedState::Outage;
  const ScenarioMap map = empty_scenario();
  const SimulationContext ctx = build_context(map, c);
  const Vec3 ue{60, 50, 1.5};
  const LinkAssessment a = evaluate_point(ctx, ue, Mode::Direct);

  // Hand budget: power, array gain, patch gain at the elevation offset,
  // close-in pathloss, noise floor.
  const double d = std::hypot(60.0, 4.5);
  const double el = rad2deg(std::atan2(4.5, 60.0));
  const double patch_db = 8.0 - 12.0 * (el / 65.0) * (el / 65.0);
  const double pl = 32.4 + 20 * std::log10(28.0) + 20 * std::log10(d);
  const double noise_dbm = -174 + 10 * std::log10(200e6) + 10;
  const double snr0_db = 35 + 10 * std::log10(192.0) + patch_db - pl - noise_dbm;
  CHECK(lin2db(a.direct.unblocked) == Approx(snr0_db).epsilon(1e-9));
  CHECK(a.direct.blocked == 0.0);
  const double rate = 2 / kPi * 4e-3 * 15 * d * (0.2 / 4.5) * 5;
  const double pb = rate / (1 + rate);
  CHECK(a.long_term == Approx((1 - pb) * db2lin(snr0_db)).epsilon(1e-9));
  CHECK(a.chosen == ChosenLink::Direct);

  // same point again: identical
  CHECK(evaluate_point(ctx, ue, Mode::Direct).long_term == a.long_term);
}

TEST_CASE("direct SNR falls along the boresight ray") {
  const SimulationContext ctx = build_context(empty_scenario(), quiet_config());
  double prev = std::numeric_limits<double>::infinity();
  for (double x = 20; x <= 100; x += 10) {
    const double s = evaluate_point(ctx, {x, 50, 1.5}, Mode::Direct).long_term;
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("RIS hidden behind a building gives zero") {
  ScenarioMap map = empty_scenario();
  map.relay.kind = RelayKind::Ris;
  map.relay.boresight = {180, 0};
  map.buildings.push_back({{{42, 28}, {48, 28}, {48, 38}, {42, 38}}, 20});
  const SimulationContext ctx = build_context(map, quiet_config(), RelayKind::Ris);
  const Vec3 ue{40, 20, 1.5};
  REQUIRE_FALSE(los_visible(map.relay.position, ue, map));
  const auto a = evaluate_point(ctx, ue, Mode::RisOnly);
  CHECK(a.long_term == 0.0);
  CHECK(a.chosen == ChosenLink::None);
  // a visible point is served
  CHECK(evaluate_point(ctx, {40, 60, 1.5}, Mode::RisOnly).long_term > 0.0);
}

TEST_CASE("relay-only service stays inside the NCR wedge") {
  const ScenarioMap map = load_scenario(MMCOV_DATA_DIR "/corridor.json");
  RunConfig c = quiet_config();
  const SimulationContext ctx = build_context(map, c, RelayKind::Ncr);
  const CoverageResult r = heatmap(ctx, Mode::NcrOnly);
  std::size_t served = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const bool in_wedge = in_sector_fov(map.relay.boresight, r.positions[i], map.relay.position) &&
                          los_visible(map.relay.position, r.positions[i], map);
    if (r.snr_linear[i] > 0.0) {
      ++served;
      CHECK(in_wedge);
      CHECK(r.chosen[i] == ChosenLink::Relay);
    } else {
      CHECK(r.snr_db[i] == kNegInf);
      CHECK(r.chosen[i] == ChosenLink::None);
    }
  }
  CHECK(served > 0);
}

TEST_CASE("coverage probability counting") {
  std::vector<double> s(100);
  for (int i = 0; i < 100; ++i) s[i] = i < 80 ? 10.0 : 0.0;
  CHECK(coverage_probability(s, 5.0) == Approx(0.8));
  CHECK(coverage_probability(s, -1.0) == 1.0);
  CHECK(coverage_probability(s, 10.0) == 0.0);  // strict comparison
  CHECK_THROWS_AS(coverage_probability(std::vector<double>{}, 0.0), DomainError);
}

TEST_CASE("parallel and serial heatmaps are identical") {
  const ScenarioMap map = load_scenario(MMCOV_DATA_DIR "/open_square_ris.json");
  RunConfig c;
  c.ris.mh = c.ris.mv = 8;
  c.threads = 1;
  const auto serial = heatmap(build_context(map, c, RelayKind::Ris), Mode::RisAided);
  c.threads = 4;
  const auto par = heatmap(build_context(map, c, RelayKind::Ris), Mode::RisAided);
  REQUIRE(serial.size() == par.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial.snr_linear[i] == par.snr_linear[i]);
    CHECK(serial.chosen[i] == par.chosen[i]);
  }
}

TEST_CASE("aided modes dominate their parts") {
  const ScenarioMap map = load_scenario(MMCOV_DATA_DIR "/open_square.json");
  RunConfig c = quiet_config();
  const SimulationContext ctx = build_context(map, c, RelayKind::Ncr);
  const auto pas = assess_grid(ctx, true);
  for (std::size_t i = 0; i < pas.size(); i += 7) {
    const auto best = assessment_for_mode(pas[i], Mode::NcrAided, JointMode::BestLink);
    CHECK(best.long_term >= assessment_for_mode(pas[i], Mode::Direct, JointMode::BestLink).long_term);
    CHECK(best.long_term >= assessment_for_mode(pas[i], Mode::NcrOnly, JointMode::BestLink).long_term);
    REQUIRE(pas[i].combinations);
    const auto &cmb = *pas[i].combinations;
    const auto joint = assessment_for_mode(pas[i], Mode::NcrAided, JointMode::Combined);
    CHECK(joint.long_term >= *std::min_element(cmb.begin(), cmb.end()) * (1 - 1e-12));
    CHECK(joint.long_term <= *std::max_element(cmb.begin(), cmb.end()) * (1 + 1e-12));
  }
}

TEST_CASE("relay-only sweep at minus infinity is the visibility fraction") {
  const ScenarioMap map = load_scenario(MMCOV_DATA_DIR "/corridor.json");
  RunConfig c = quiet_config();
  const std::vector<double> g{60, 75, 90, 105};
  const std::vector<double> th{kNegInf};
  const SweepResult r = sweep(map, c, SweepParam::NcrE2eGainDb, g, th);
  const SimulationContext ctx = build_context(map, c, RelayKind::Ncr);
  const auto reach = reachability(ctx);
  for (std::size_t v = 0; v < g.size(); ++v) {
    CHECK(r.pc_relay_only[v][0] == Approx(reach.relay).epsilon(1e-12));
    CHECK(r.pc_relay_aided[v][0] == Approx(reach.either).epsilon(1e-12));
  }
}

TEST_CASE("sweep helpers") {
  CHECK(sweep_param_from_string("ris-elements-per-side") == SweepParam::RisElementsPerSide);
  CHECK_THROWS_AS(sweep_param_from_string("bananas"), DomainError);
  RunConfig c;
  const RunConfig g = apply_sweep_value(c, SweepParam::NcrE2eGainDb, 100.0);
  CHECK(ncr_e2e_gain_db(g.ncr.amp_gain_db, 72) == Approx(100.0));
  CHECK(g.ncr.max_e2e_gain_db >= 100.0);
  CHECK(apply_sweep_value(c, SweepParam::RisElementsPerSide, 24).ris.mh == 24);
  CHECK_THROWS_AS(apply_sweep_value(c, SweepParam::RisElementsPerSide, 2.5), DomainError);
}

TEST_CASE("mode and context must agree") {
  const SimulationContext ctx = build_context(empty_scenario(), quiet_config(), RelayKind::Ncr);
  CHECK_THROWS_AS(evaluate_point(ctx, {60, 50, 1.5}, Mode::RisOnly), DomainError);
}

TEST_CASE("RIS co-phased fast path equals configure + cascade") {
  ScenarioMap map = load_scenario(MMCOV_DATA_DIR "/open_square_ris.json");
  map.relay.ris_elements.reset();
  RunConfig c = quiet_config();
  c.ris.mh = c.ris.mv = 8;
  const SimulationContext ctx = build_context(map, c, RelayKind::Ris);
  int checked = 0;
  for (const Vec3 &ue : ctx.grid) {
    if (!relay_serves(ctx.map, ue) || checked >= 25) continue;
    PlacedArray rx{{1, 1, ctx.wavelength / 2, direction_between(ue, ctx.ris.position), Isotropic{}}, ue};
    const ChannelMatrix ho = ris_reflected_channel(ctx.ris, rx, ctx.gains);
    const RISPhaseConfig cfg = configure_ris(ctx.ris_incident.col(0), ho.row(0).transpose());
    const ChannelMatrix h = ris_cascade(ho, cfg, ctx.ris_incident);
    const double expect = h.squaredNorm() * ctx.budget.tx_power / ctx.budget.noise;
    CHECK(assess_point(ctx, ue, false).relayed.unblocked == Approx(expect).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked == 25);
}
