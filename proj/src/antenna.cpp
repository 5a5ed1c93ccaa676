// SPDX-License-Identifier: Apache-2.0
#include "mmcov/antenna.hpp"

#include <algorithm>

namespace mmcov {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double patch_gain_db(const Direction &local) {
  const double az = wrap_deg(local.azimuth_deg);
  const double zenith_offset = -local.elevation_deg;  // theta - 90 deg
  const double a_v = -std::min(12.0 * std::pow(zenith_offset / kPatchHpbwDeg, 2), kPatchFrontToBackDb);
  const double a_h = -std::min(12.0 * std::pow(az / kPatchHpbwDeg, 2), kPatchFrontToBackDb);
  return kPatchPeakGainDbi - std::min(-(a_v + a_h), kPatchFrontToBackDb);
}

}  // namespace

void validate_array(const PlanarArray &array) {
  if (array.nh < 1 || array.nv < 1) throw DomainError("planar array: nh and nv must be >= 1");
  if (!(array.spacing > 0.0)) throw DomainError("planar array: spacing must be positive");
  if (const auto *c = std::get_if<CosineQ>(&array.pattern); c && c->q < 0.0)
    throw DomainError("planar array: cosine exponent q must be >= 0");
}

PanelAxes panel_axes(const Direction &boresight) {
  const double az = deg2rad(boresight.azimuth_deg);
  const double el = deg2rad(boresight.elevation_deg);
  return {
      {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)},
      {-std::sin(az), std::cos(az), 0.0},
      {-std::sin(el) * std::cos(az), -std::sin(el) * std::sin(az), std::cos(el)},
  };
}

Direction local_direction(const Direction &boresight, const Vec3 &unit) {
  return local_direction(panel_axes(boresight), unit);
}

Direction local_direction(const PanelAxes &ax, const Vec3 &unit) {
  const double x = unit.dot(ax.normal);
  const double y = unit.dot(ax.horizontal);
  const double z = std::clamp(unit.dot(ax.vertical), -1.0, 1.0);
  return {rad2deg(std::atan2(y, x)), rad2deg(std::asin(z))};
}

double off_boresight_deg(const Direction &local) {
  const double c = std::cos(deg2rad(local.azimuth_deg)) * std::cos(deg2rad(local.elevation_deg));
  return rad2deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

std::vector<Vec3> element_offsets(const PlanarArray &array) {
  const PanelAxes ax = panel_axes(array.boresight);
  const double ch = 0.5 * (array.nh - 1);
  const double cv = 0.5 * (array.nv - 1);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(array.size()));
  for (int v = 0; v < array.nv; ++v)
    for (int h = 0; h < array.nh; ++h)
      out.push_back(ax.horizontal * ((h - ch) * array.spacing) + ax.vertical * ((v - cv) * array.spacing));
  return out;
}

CVector array_response(const PlanarArray &array, const Direction &local, double wavelength) {
  if (std::abs(local.azimuth_deg) > 90.0 || std::abs(local.elevation_deg) > 90.0)
    throw DomainError("array_response: direction is behind the panel");
  // In the panel frame the horizontal and vertical components of the unit
  // direction are cos(el) sin(az) and sin(el).
  const double uh = std::cos(deg2rad(local.elevation_deg)) * std::sin(deg2rad(local.azimuth_deg));
  const double uv = std::sin(deg2rad(local.elevation_deg));
  const double k = 2.0 * kPi / wavelength;
  const double ch = 0.5 * (array.nh - 1);
  const double cv = 0.5 * (array.nv - 1);
  CVector a(array.size());
  for (int v = 0; v < array.nv; ++v)
    for (int h = 0; h < array.nh; ++h) {
      const double path = array.spacing * ((h - ch) * uh + (v - cv) * uv);
      a(v * array.nh + h) = std::polar(1.0, -k * path);
    }
  return a;
}

double element_gain(const PatternKind &pattern, const Direction &local) {
  return std::visit(overloaded{
                        [&](const ThreeGppPatch &) { return std::pow(10.0, patch_gain_db(local) / 20.0); },
                        [&](const CosineQ &c) {
                          const double cos_off = std::cos(deg2rad(off_boresight_deg(local)));
                          if (cos_off <= 0.0) return c.q == 0.0 ? 1.0 : 0.0;
                          return std::pow(cos_off, 0.5 * c.q);
                        },
                        [](const Isotropic &) { return 1.0; },
                    },
                    pattern);
}

}  // namespace mmcov
