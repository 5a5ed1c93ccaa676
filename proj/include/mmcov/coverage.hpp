// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmcov/blockage.hpp"
#include "mmcov/channel.hpp"
#include "mmcov/config.hpp"
#include "mmcov/link.hpp"
#include "mmcov/scene.hpp"

namespace mmcov {

/// Immutable per-run state: scenario, resolved config, potential coverage
/// set and every UE-independent channel (BS-relay legs are never blocked).
struct SimulationContext {
  ScenarioMap map;
  RunConfig config;
  std::optional<RelayKind> relay;
  std::vector<Vec3> grid;

  double wavelength = 0.0;
  PathGainModel gains;
  NoiseBudget budget;
  std::vector<PlacedArray> bs_sectors;

  // RIS
  PlacedArray ris;
  ChannelMatrix ris_incident;  // H_i, M x N_t
  // H_i with each row rotated so its first column is real and non-negative;
  // co-phasing a single-antenna UE then reduces to |h_o|^T times this.
  ChannelMatrix ris_incident_cophased;
  // NCR
  NCRConfig ncr;
  ChannelMatrix ncr_donor_channel;  // H_i, N_p x N_t

  std::size_t relay_sector = 0;
};

/// Builds the context for `relay` (defaults to the mode's relay kind, or the
/// scenario's when the mode is direct).
SimulationContext build_context(const ScenarioMap &map, const RunConfig &config,
                                std::optional<RelayKind> relay = std::nullopt);

/// Everything computed for one UE position.
struct PointAssessment {
  LinkSnrs direct;
  LinkSnrs relayed;
  LinkBlockageState direct_blockage;
  LinkBlockageState relay_blockage;
  std::optional<CombinationSnrs> combinations;
  bool direct_reachable = false;
  bool relay_reachable = false;
  bool ncr_clamped = false;
};

PointAssessment assess_point(const SimulationContext &ctx, const Vec3 &ue, bool with_combinations);

/// Long-term SNR for a mode out of a full assessment.
LinkAssessment assessment_for_mode(const PointAssessment &pa, Mode mode, JointMode joint);

/// Per-point evaluation; a point with no usable link gets long_term = 0.
LinkAssessment evaluate_point(const SimulationContext &ctx, const Vec3 &ue, Mode mode);

struct CoverageResult {
  Mode mode = Mode::Direct;
  std::vector<Vec3> positions;
  std::vector<double> snr_linear;
  std::vector<double> snr_db;
  std::vector<ChosenLink> chosen;

  std::size_t size() const { return positions.size(); }
};

/// Runs `fn(i)` for i in [0, n) on `threads` workers (0 = hardware
/// concurrency). Each index is processed exactly once.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn);

std::vector<PointAssessment> assess_grid(const SimulationContext &ctx, bool with_combinations);

CoverageResult heatmap(const SimulationContext &ctx, Mode mode);
CoverageResult heatmap(const ScenarioMap &map, const RunConfig &config);

/// Fraction of points with snr_db strictly above the threshold.
double coverage_probability(std::span<const double> snr_db, double threshold_db);

struct ReachabilityStats {
  std::size_t points = 0;
  double direct = 0.0;  // LOS to the BS inside a sector FoV
  double relay = 0.0;   // LOS to the relay inside its FoV
  double either = 0.0;
};

ReachabilityStats reachability(const SimulationContext &ctx);
/// Geometry-only variant (no channels are built).
ReachabilityStats reachability(const ScenarioMap &map, const std::vector<Vec3> &grid);

/// Relay-to-UE geometry: UE in front of the RIS or inside the NCR service
/// FoV, with line of sight.
bool relay_serves(const ScenarioMap &map, const Vec3 &ue);
/// BS-to-UE geometry: some sector covers the UE and there is line of sight.
bool bs_serves(const ScenarioMap &map, const Vec3 &ue);

enum class SweepParam { RisElementsPerSide, NcrE2eGainDb, NcrElementsPerSide };

std::string_view to_string(SweepParam p);
SweepParam sweep_param_from_string(std::string_view name);
RelayKind relay_kind_of(SweepParam p);

/// Config with one swept parameter set. An E2E-gain value adjusts |g|^2 at
/// the configured panel size and lifts G_max to at least that value.
RunConfig apply_sweep_value(RunConfig config, SweepParam p, double value);

struct SweepResult {
  SweepParam param = SweepParam::RisElementsPerSide;
  std::vector<double> values;
  std::vector<double> thresholds_db;
  // [value][threshold]
  std::vector<std::vector<double>> pc_relay_only;
  std::vector<std::vector<double>> pc_relay_aided;
};

SweepResult sweep(const ScenarioMap &map, const RunConfig &config, SweepParam param, std::span<const double> values,
                  std::span<const double> thresholds_db);

}  // namespace mmcov
