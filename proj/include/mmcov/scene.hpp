// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmcov/types.hpp"

namespace mmcov {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Extruded building: footprint polygon x [0, height].
struct Building {
  std::vector<Point2> footprint;
  double height = 0.0;
};

struct Bounds {
  Point2 min;
  Point2 max;
};

struct BSPlacement {
  Vec3 position;
  std::vector<double> sector_azimuths_deg{0.0, 120.0, 240.0};
  double sector_elevation_deg = 0.0;
  // Equipment overrides; the run configuration supplies them when absent.
  std::optional<std::pair<int, int>> array;
  std::optional<double> tx_power_dbm;
};

enum class RelayKind { Ris, Ncr };

std::string_view to_string(RelayKind kind);
RelayKind relay_kind_from_string(std::string_view name);

/// Relay mount. `boresight` is the RIS surface normal or the NCR service
/// (panel 2) boresight; NCR panel 1 faces the BS unless given explicitly.
struct RelayPlacement {
  RelayKind kind = RelayKind::Ris;
  Vec3 position;
  Direction boresight;
  std::optional<Direction> donor_boresight;
  std::optional<double> min_separation_deg;
  std::optional<std::pair<int, int>> ris_elements;
  std::optional<std::pair<int, int>> ncr_array;
};

struct GridSpec {
  double spacing = 1.0;
  double ue_height = 1.5;
};

struct ScenarioMap {
  Bounds bounds;
  std::vector<Building> buildings;
  BSPlacement bs;
  RelayPlacement relay;
  GridSpec grid;
};

/// Heights used for positions given as [x, y] in the scenario file.
struct HeightDefaults {
  double bs = 6.0;
  double relay = 4.0;
  double ue = 1.5;
};

inline constexpr double kSectorHalfAzimuthDeg = 60.0;
inline constexpr double kSectorHalfElevationDeg = 30.0;

/// Parses and validates a scenario document. Throws IoError on malformed
/// JSON and DomainError on invariant violations.
ScenarioMap parse_scenario(std::string_view json_text, const HeightDefaults &heights = {});
ScenarioMap load_scenario(const std::filesystem::path &path, const HeightDefaults &heights = {});

/// Checks every ScenarioMap invariant, throwing DomainError on the first one
/// that fails.
void validate_scenario(const ScenarioMap &map);

/// Simple-polygon test: at least three vertices, non-zero area and no
/// intersections between non-adjacent edges.
bool is_simple_polygon(std::span<const Point2> polygon);

/// Point-in-polygon with the boundary counted as inside.
bool inside_or_on(std::span<const Point2> polygon, Point2 p);

bool inside_any_building(const ScenarioMap &map, Point2 p);

/// True iff the open segment (a, b) misses every extruded building volume.
/// Touching a wall or roof edge counts as blocked.
bool los_visible(const Vec3 &a, const Vec3 &b, const ScenarioMap &map);
bool segment_hits_building(const Vec3 &a, const Vec3 &b, const Building &building);

/// Potential coverage set: grid points outside buildings with line of
/// sight to the BS or the relay. Throws DomainError if the set is empty.
std::vector<Vec3> generate_ue_grid(const ScenarioMap &map);

/// Every grid point over the bounds at UE height, before any filtering.
std::vector<Vec3> raw_grid(const ScenarioMap &map);

/// Sector field-of-view test (inclusive boundary).
bool in_sector_fov(const Direction &boresight, const Vec3 &target, const Vec3 &node,
                   double half_azimuth_deg = kSectorHalfAzimuthDeg,
                   double half_elevation_deg = kSectorHalfElevationDeg);

/// Index of the BS sector whose FoV contains `target` with the smallest
/// azimuth offset, or nullopt.
std::optional<std::size_t> serving_sector(const BSPlacement &bs, const Vec3 &target);

/// Azimuth separation between the NCR donor and service panel boresights.
double ncr_panel_separation_deg(const ScenarioMap &map);
/// Throws DomainError when the NCR panels are closer than the minimum.
void check_ncr_separation(const ScenarioMap &map, double min_separation_deg);

/// Boresight of the NCR donor panel (explicit, or pointing at the BS).
Direction donor_panel_boresight(const RelayPlacement &relay, const Vec3 &bs_position);

}  // namespace mmcov
