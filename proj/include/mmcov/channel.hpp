// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mmcov/antenna.hpp"
#include "mmcov/scene.hpp"
#include "mmcov/types.hpp"

namespace mmcov {

enum class PathlossKind {
  CloseIn3gpp,  // 32.4 + 20 log10(f_GHz) + 20 log10(d)
  FreeSpace,    // 20 log10(4 pi d / lambda)
};

struct PathGainModel {
  PathlossKind kind = PathlossKind::CloseIn3gpp;
  double carrier_hz = 28e9;
  double shadowing_std_db = 4.0;
  std::uint64_t seed = 0;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
};

/// Deterministic per-link key for the shadowing draw. Built from both link
/// endpoints quantized to 1 mm, independent of their order.
struct SeedContext {
  std::uint64_t key = 0;
};

SeedContext link_seed(const Vec3 &a, const Vec3 &b, std::uint64_t global_seed);

struct PathAmplitude {
  double amplitude = 0.0;     // linear, shadowing included
  double shadowing_db = 0.0;  // loss in dB (positive = weaker)
};

double pathloss_db(double distance_m, const PathGainModel &model);
double shadowing_draw_db(const PathGainModel &model, SeedContext ctx);
PathAmplitude path_amplitude(double distance_m, const PathGainModel &model, SeedContext ctx);

/// Noise power in mW for a bandwidth and noise figure.
double thermal_noise_mw(double bandwidth_hz, double noise_figure_db);

/// Array mounted at a position in the global frame.
struct PlacedArray {
  PlanarArray array;
  Vec3 position;
};

/// Receive-side response: conjugate of the steering vector toward the source,
/// so that H = alpha * a_r * a_t^H matches exact spherical propagation in the
/// far field.
CVector receive_response(const PlanarArray &array, const Direction &local, double wavelength);

/// Single-path far-field MIMO channel between two placed arrays (rx x tx).
ChannelMatrix far_field_channel(const PlacedArray &tx, const PlacedArray &rx, const PathGainModel &gains,
                                SeedContext seed);

struct DirectChannel {
  ChannelMatrix h;
  bool out_of_fov = false;
  bool static_blocked = false;
};

/// BS-UE channel through one BS panel. A UE outside the panel FoV or without
/// line of sight gets a zero channel with the matching flag set.
DirectChannel direct_channel(const PlacedArray &bs, const PlacedArray &ue, const ScenarioMap &map,
                             const PathGainModel &gains);

/// Near-field BS-to-RIS channel H_i (M x N_t) from exact per-element distances.
ChannelMatrix ris_incident_channel(const PlacedArray &bs, const PlacedArray &ris, const PathGainModel &gains);
/// Near-field RIS-to-UE channel H_o (N_r x M).
ChannelMatrix ris_reflected_channel(const PlacedArray &ris, const PlacedArray &ue, const PathGainModel &gains);

struct RisLegs {
  ChannelMatrix incident;   // H_i, M x N_t
  ChannelMatrix reflected;  // H_o, N_r x M
};

RisLegs ris_leg_channels(const PlacedArray &bs, const PlacedArray &ris, const PlacedArray &ue,
                         const PathGainModel &gains);

/// Phases applied by the RIS elements (radians in [0, 2 pi)).
struct RISPhaseConfig {
  Eigen::VectorXd phases;
};

/// Phase conjugation: co-phases every element term for the reference
/// incident column and reflected row.
RISPhaseConfig configure_ris(const CVector &incident_ref, const CVector &reflected_ref);

/// H_o diag(exp(j phi)) H_i.
ChannelMatrix ris_cascade(const ChannelMatrix &reflected, const RISPhaseConfig &phase, const ChannelMatrix &incident);

struct NCRConfig {
  PlanarArray donor;    // panel 1, faces the BS
  PlanarArray service;  // panel 2, faces the coverage area
  Vec3 position;
  double amp_power_gain = db2lin(55.0);  // |g|^2, linear
  double max_e2e_gain_db = 92.0;
  double noise_figure_db = 8.0;

  int panel_size() const { return donor.size(); }
};

struct NcrBeamformers {
  CVector combiner;  // w_p, squared norm N_p
  CVector precoder;  // f_p, squared norm N_p
};

/// w_p steers panel 1 at the BS position; f_p is the dominant right singular
/// vector of the NCR-UE channel. Throws DomainError if the BS is outside the
/// panel-1 FoV.
NcrBeamformers ncr_beamformers(const NCRConfig &ncr, const Vec3 &bs_position, const ChannelMatrix &service_channel,
                               double wavelength);

struct NcrChannel {
  ChannelMatrix h;        // H_ncr = g H_o f_p w_p^H H_i
  ChannelMatrix h_noise;  // H_z = g H_o f_p w_p^H
  double requested_gain_db = 0.0;
  double gain_db = 0.0;  // after the G_max cap
  bool clamped = false;
};

/// E2E gain |g|^2 N_p^2 in dB.
double ncr_e2e_gain_db(double amp_gain_db, int panel_elements);

NcrChannel ncr_channel(const ChannelMatrix &donor_channel, const ChannelMatrix &service_channel, const NCRConfig &ncr,
                       const NcrBeamformers &bf);

}  // namespace mmcov
