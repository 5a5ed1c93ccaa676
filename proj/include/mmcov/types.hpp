// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mmcov {

using cplx = std::complex<double>;
using ChannelMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }
inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm2mw(double dbm) { return db2lin(dbm); }

/// Wraps an angle in degrees to (-180, 180].
inline double wrap_deg(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3 &) const = default;

  double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  double norm2d() const { return std::hypot(x, y); }
  Vec3 normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
  }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(const Vec3 &a, const Vec3 &b) { return (a - b).norm(); }

/// Azimuth/elevation pair in degrees. Azimuth is measured from +x toward +y,
/// elevation from the horizontal plane.
struct Direction {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
};

/// Global azimuth/elevation of the vector pointing from `from` to `to`.
inline Direction direction_between(const Vec3 &from, const Vec3 &to) {
  const Vec3 d = to - from;
  return {rad2deg(std::atan2(d.y, d.x)), rad2deg(std::atan2(d.z, d.norm2d()))};
}

inline Vec3 unit_vector(const Direction &dir) {
  const double az = deg2rad(dir.azimuth_deg);
  const double el = deg2rad(dir.elevation_deg);
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

/// Invariant violation or domain-level failure (CLI exit code 1).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File access or parse failure (CLI exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmcov
