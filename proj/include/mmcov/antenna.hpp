// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <variant>
#include <vector>

#include "mmcov/types.hpp"

namespace mmcov {

/// 3GPP TR 38.901 single-element pattern (65 deg HPBW, 30 dB front-to-back,
/// 8 dBi peak).
struct ThreeGppPatch {};

/// Reflectarray cosine model: power pattern cos^q of the off-boresight angle.
struct CosineQ {
  double q = 0.0;
};

struct Isotropic {};

using PatternKind = std::variant<ThreeGppPatch, CosineQ, Isotropic>;

inline constexpr double kPatchPeakGainDbi = 8.0;
inline constexpr double kPatchHpbwDeg = 65.0;
inline constexpr double kPatchFrontToBackDb = 30.0;

/// Uniform planar array. Elements are indexed `v * nh + h`, the horizontal
/// index running fastest; the lattice is centered on the panel origin.
struct PlanarArray {
  int nh = 1;
  int nv = 1;
  double spacing = 0.0;
  Direction boresight;
  PatternKind pattern = Isotropic{};

  int size() const { return nh * nv; }
};

void validate_array(const PlanarArray &array);

/// Panel frame axes in global coordinates: boresight, horizontal, vertical.
struct PanelAxes {
  Vec3 normal;
  Vec3 horizontal;
  Vec3 vertical;
};

PanelAxes panel_axes(const Direction &boresight);

/// Direction of a global unit vector, expressed relative to the panel
/// boresight (local azimuth/elevation in degrees).
Direction local_direction(const Direction &boresight, const Vec3 &unit);
Direction local_direction(const PanelAxes &axes, const Vec3 &unit);

/// Off-boresight angle in degrees for a local direction.
double off_boresight_deg(const Direction &local);

/// Element offsets from the panel origin, in global coordinates.
std::vector<Vec3> element_offsets(const PlanarArray &array);

/// Steering vector exp(-j k <d, u>) for a local direction in the front
/// hemisphere. Throws DomainError for directions behind the panel.
CVector array_response(const PlanarArray &array, const Direction &local, double wavelength);

/// Linear amplitude gain of a single element toward a local direction.
double element_gain(const PatternKind &pattern, const Direction &local);

}  // namespace mmcov
