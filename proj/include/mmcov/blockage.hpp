// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmcov/scene.hpp"
#include "mmcov/types.hpp"

namespace mmcov {

/// Which height ratio enters the blocker-rate constant C.
enum class HeightRatioForm {
  Corrected,  // (z_B - z_R) / (z_T - z_R)
  AsPrinted,  // (z_B - z_T) / (z_T - z_R), kept for auditing; clamped to [0, 1]
};

struct BlockageParams {
  double density = 4e-3;      // blockers per m^2
  double speed = 15.0;        // m/s
  double duration_s = 5.0;    // mean blockage duration (1/mu)
  double blocker_height = 1.7;
  double blocker_width = 0.5;
  HeightRatioForm form = HeightRatioForm::Corrected;
};

void validate_blockage(const BlockageParams &params);

/// Blocker-rate constant C in 1/(m s).
double blocker_rate_constant(double z_t, double z_r, const BlockageParams &params);

/// Dynamic blockage probability r C / mu / (1 + r C / mu) for a link of
/// length r between heights z_t and z_r.
double dynamic_block_probability(double r, double z_t, double z_r, const BlockageParams &params);

/// Vertical rectangular screen standing on the ground, perpendicular to the
/// horizontal projection of the Tx-Rx link.
struct KnifeEdgeGeometry {
  Vec3 tx;
  Vec3 rx;
  Point2 blocker;  // screen center on the ground
  double blocker_height = 1.7;
  double blocker_width = 0.5;
};

struct KnifeEdgeTerms {
  double f_h1 = 0.0;  // top edge
  double f_h2 = 0.0;  // bottom edge
  double f_w1 = 0.0;
  double f_w2 = 0.0;
};

KnifeEdgeTerms knife_edge_terms(const KnifeEdgeGeometry &geometry, double wavelength);

/// -20 log10(1 - (F_h1 + F_h2)(F_w1 + F_w2)) in dB.
double knife_edge_loss(const KnifeEdgeGeometry &geometry, double wavelength);

struct LinkBlockageState {
  bool static_blocked = false;
  double dynamic_block_prob = 0.0;
  double blocked_loss_db = 0.0;
};

/// Canonical blocker: default-sized screen at the 2D midpoint of the link.
KnifeEdgeGeometry canonical_blocker(const Vec3 &a, const Vec3 &b, const BlockageParams &params);

LinkBlockageState link_blockage_state(const Vec3 &a, const Vec3 &b, const ScenarioMap &map,
                                      const BlockageParams &params, double wavelength);

}  // namespace mmcov
