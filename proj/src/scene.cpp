// SPDX-License-Identifier: Apache-2.0
#include "mmcov/scene.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mmcov {

namespace {

using nlohmann::json;

constexpr double kGeomEps = 1e-9;

double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Point2 a, Point2 b, Point2 p) {
  if (std::abs(cross(a, b, p)) > kGeomEps * std::max(1.0, std::hypot(b.x - a.x, b.y - a.y))) return false;
  return p.x >= std::min(a.x, b.x) - kGeomEps && p.x <= std::max(a.x, b.x) + kGeomEps &&
         p.y >= std::min(a.y, b.y) - kGeomEps && p.y <= std::max(a.y, b.y) + kGeomEps;
}

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(a, b, c);
  if (std::abs(v) <= kGeomEps) return 0;
  return v > 0 ? 1 : -1;
}

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

double polygon_area(std::span<const Point2> poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto &p = poly[i];
    const auto &q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

// --- JSON helpers -----------------------------------------------------------

const json &require(const json &obj, const char *key, const std::string &where) {
  if (!obj.is_object() || !obj.contains(key)) throw DomainError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

double number(const json &v, const std::string &where) {
  if (!v.is_number()) throw DomainError(where + ": expected a number");
  return v.get<double>();
}

Point2 point2(const json &v, const std::string &where) {
  if (!v.is_array() || v.size() != 2) throw DomainError(where + ": expected [x, y]");
  return {number(v[0], where), number(v[1], where)};
}

Vec3 position(const json &v, double default_z, const std::string &where) {
  if (!v.is_array() || (v.size() != 2 && v.size() != 3)) throw DomainError(where + ": expected [x, y] or [x, y, z]");
  Vec3 p{number(v[0], where), number(v[1], where), default_z};
  if (v.size() == 3) p.z = number(v[2], where);
  return p;
}

Direction direction(const json &obj, const std::string &where) {
  Direction d;
  d.azimuth_deg = number(require(obj, "azimuth", where), where + ".azimuth");
  if (obj.contains("elevation")) d.elevation_deg = number(obj.at("elevation"), where + ".elevation");
  return d;
}

std::pair<int, int> dims(const json &obj, const char *a, const char *b, const std::string &where) {
  const auto read = [&](const char *key) {
    const json &v = require(obj, key, where);
    if (!v.is_number_integer()) throw DomainError(where + "." + key + ": expected an integer");
    return v.get<int>();
  };
  return {read(a), read(b)};
}

}  // namespace

std::string_view to_string(RelayKind kind) { return kind == RelayKind::Ris ? "ris" : "ncr"; }

RelayKind relay_kind_from_string(std::string_view name) {
  if (name == "ris") return RelayKind::Ris;
  if (name == "ncr") return RelayKind::Ncr;
  throw DomainError("unknown relay kind '" + std::string(name) + "'");
}

bool is_simple_polygon(std::span<const Point2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  if (std::abs(polygon_area(poly)) <= kGeomEps) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a1 = poly[i], a2 = poly[(i + 1) % n];
    if (std::hypot(a2.x - a1.x, a2.y - a1.y) <= kGeomEps) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2 b1 = poly[j], b2 = poly[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges share exactly one vertex; anything more is a fold-back.
        const Point2 shared = (j == i + 1) ? a2 : a1;
        const Point2 other_a = (j == i + 1) ? a1 : a2;
        const Point2 other_b = (j == i + 1) ? b2 : b1;
        if (orientation(other_a, shared, other_b) == 0) {
          const double dot = (other_a.x - shared.x) * (other_b.x - shared.x) + (other_a.y - shared.y) * (other_b.y - shared.y);
          if (dot > 0) return false;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

bool inside_or_on(std::span<const Point2> poly, Point2 p) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = poly[i], b = poly[j];
    if (on_segment(a, b, p)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool inside_any_building(const ScenarioMap &map, Point2 p) {
  return std::any_of(map.buildings.begin(), map.buildings.end(),
                     [&](const Building &b) { return inside_or_on(b.footprint, p); });
}

bool segment_hits_building(const Vec3 &a, const Vec3 &b, const Building &building) {
  const auto &poly = building.footprint;
  const Point2 pa{a.x, a.y}, pb{b.x, b.y};
  const double dx = pb.x - pa.x, dy = pb.y - pa.y;
  const double len2 = dx * dx + dy * dy;
  const auto z_at = [&](double t) { return a.z + t * (b.z - a.z); };

  if (len2 <= kGeomEps * kGeomEps) {
    // Vertical segment: blocked if over the footprint and below the roof.
    return inside_or_on(poly, pa) && std::min(a.z, b.z) <= building.height;
  }

  // Bounding-box rejection.
  double minx = poly[0].x, maxx = poly[0].x, miny = poly[0].y, maxy = poly[0].y;
  for (const auto &v : poly) {
    minx = std::min(minx, v.x);
    maxx = std::max(maxx, v.x);
    miny = std::min(miny, v.y);
    maxy = std::max(maxy, v.y);
  }
  if (std::max(pa.x, pb.x) < minx - kGeomEps || std::min(pa.x, pb.x) > maxx + kGeomEps ||
      std::max(pa.y, pb.y) < miny - kGeomEps || std::min(pa.y, pb.y) > maxy + kGeomEps)
    return false;
  if (std::min(a.z, b.z) > building.height) return false;

  // Breakpoints where the projected segment meets the footprint boundary.
  std::vector<double> ts{0.0, 1.0};
  const auto param_of = [&](Point2 p) { return ((p.x - pa.x) * dx + (p.y - pa.y) * dy) / len2; };
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 q1 = poly[i], q2 = poly[(i + 1) % n];
    const double ex = q2.x - q1.x, ey = q2.y - q1.y;
    const double denom = dx * ey - dy * ex;
    if (std::abs(denom) <= kGeomEps * std::sqrt(len2) * std::hypot(ex, ey)) {
      // Parallel: only collinear overlaps contribute.
      if (orientation(pa, pb, q1) == 0) {
        ts.push_back(param_of(q1));
        ts.push_back(param_of(q2));
      }
      continue;
    }
    const double t = ((q1.x - pa.x) * ey - (q1.y - pa.y) * ex) / denom;
    const double u = ((q1.x - pa.x) * dy - (q1.y - pa.y) * dx) / denom;
    if (u >= -kGeomEps && u <= 1.0 + kGeomEps) ts.push_back(t);
  }
  for (auto &t : ts) t = std::clamp(t, 0.0, 1.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(), [](double x, double y) { return std::abs(x - y) <= 1e-12; }), ts.end());

  const auto point_at = [&](double t) { return Point2{pa.x + t * dx, pa.y + t * dy}; };
  // Boundary contacts strictly inside the open segment.
  for (double t : ts) {
    if (t <= 0.0 || t >= 1.0) continue;
    if (inside_or_on(poly, point_at(t)) && z_at(t) <= building.height) return true;
  }
  // Sub-intervals whose interior lies over the footprint. z is linear, so the
  // lowest point of the interval is at one of its ends.
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double t0 = ts[i], t1 = ts[i + 1];
    if (t1 - t0 <= 1e-12) continue;
    if (!inside_or_on(poly, point_at(0.5 * (t0 + t1)))) continue;
    if (std::min(z_at(t0), z_at(t1)) <= building.height) return true;
  }
  return false;
}

bool los_visible(const Vec3 &a, const Vec3 &b, const ScenarioMap &map) {
  return std::none_of(map.buildings.begin(), map.buildings.end(),
                      [&](const Building &bld) { return segment_hits_building(a, b, bld); });
}

std::vector<Vec3> raw_grid(const ScenarioMap &map) {
  const double s = map.grid.spacing;
  const auto count = [s](double lo, double hi) { return static_cast<std::size_t>(std::floor((hi - lo) / s + 1e-9)) + 1; };
  const std::size_t nx = count(map.bounds.min.x, map.bounds.max.x);
  const std::size_t ny = count(map.bounds.min.y, map.bounds.max.y);
  std::vector<Vec3> pts;
  pts.reserve(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix)
      pts.push_back({map.bounds.min.x + static_cast<double>(ix) * s, map.bounds.min.y + static_cast<double>(iy) * s,
                     map.grid.ue_height});
  return pts;
}

std::vector<Vec3> generate_ue_grid(const ScenarioMap &map) {
  if (!(map.grid.spacing > 0.0)) throw DomainError("grid.spacing: must be positive");
  std::vector<Vec3> out;
  for (const Vec3 &p : raw_grid(map)) {
    if (inside_any_building(map, {p.x, p.y})) continue;
    if (p == map.bs.position || p == map.relay.position) continue;
    if (los_visible(p, map.bs.position, map) || los_visible(p, map.relay.position, map)) out.push_back(p);
  }
  if (out.empty()) throw DomainError("potential coverage set is empty: every grid point is excluded");
  return out;
}

bool in_sector_fov(const Direction &boresight, const Vec3 &target, const Vec3 &node, double half_az, double half_el) {
  if (target == node) return false;
  const Direction d = direction_between(node, target);
  const double daz = std::abs(wrap_deg(d.azimuth_deg - boresight.azimuth_deg));
  const double del = std::abs(d.elevation_deg - boresight.elevation_deg);
  // Tolerate round-off so that a target placed exactly on the limit is inside.
  constexpr double kTol = 1e-9;
  return daz <= half_az + kTol && del <= half_el + kTol;
}

std::optional<std::size_t> serving_sector(const BSPlacement &bs, const Vec3 &target) {
  std::optional<std::size_t> best;
  double best_off = 0.0;
  const Direction d = direction_between(bs.position, target);
  for (std::size_t i = 0; i < bs.sector_azimuths_deg.size(); ++i) {
    const Direction bore{bs.sector_azimuths_deg[i], bs.sector_elevation_deg};
    if (!in_sector_fov(bore, target, bs.position)) continue;
    const double off = std::abs(wrap_deg(d.azimuth_deg - bore.azimuth_deg));
    if (!best || off < best_off) {
      best = i;
      best_off = off;
    }
  }
  return best;
}

double ncr_panel_separation_deg(const ScenarioMap &map) {
  const Direction donor = donor_panel_boresight(map.relay, map.bs.position);
  return std::abs(wrap_deg(map.relay.boresight.azimuth_deg - donor.azimuth_deg));
}

void check_ncr_separation(const ScenarioMap &map, double min_separation_deg) {
  const double sep = ncr_panel_separation_deg(map);
  if (sep + 1e-9 < min_separation_deg)
    throw DomainError("relay: NCR panel separation " + std::to_string(sep) + " deg is below the minimum " +
                      std::to_string(min_separation_deg) + " deg");
}

Direction donor_panel_boresight(const RelayPlacement &relay, const Vec3 &bs_position) {
  if (relay.donor_boresight) return *relay.donor_boresight;
  return direction_between(relay.position, bs_position);
}

void validate_scenario(const ScenarioMap &map) {
  const auto &bd = map.bounds;
  if (!(bd.max.x > bd.min.x && bd.max.y > bd.min.y)) throw DomainError("bounds: max must exceed min on both axes");
  for (std::size_t i = 0; i < map.buildings.size(); ++i) {
    const Building &b = map.buildings[i];
    const std::string tag = "buildings[" + std::to_string(i) + "]";
    if (b.footprint.size() < 3) throw DomainError(tag + ".footprint: needs at least 3 vertices");
    for (const auto &v : b.footprint) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw DomainError(tag + ".footprint: non-finite vertex");
      if (v.x < bd.min.x - kGeomEps || v.x > bd.max.x + kGeomEps || v.y < bd.min.y - kGeomEps || v.y > bd.max.y + kGeomEps)
        throw DomainError(tag + ".footprint: vertex outside bounds");
    }
    if (!is_simple_polygon(b.footprint)) throw DomainError(tag + ".footprint: polygon is not simple (self-intersecting or degenerate)");
    if (!(b.height > 0.0)) throw DomainError(tag + ".height: must be positive");
  }

  const auto check_node = [&](const Vec3 &p, const std::string &tag) {
    if (!p.finite()) throw DomainError(tag + ".position: non-finite component");
    for (std::size_t i = 0; i < map.buildings.size(); ++i) {
      const Building &b = map.buildings[i];
      if (inside_or_on(b.footprint, {p.x, p.y}) && p.z <= b.height)
        throw DomainError(tag + ".position: inside buildings[" + std::to_string(i) + "]");
    }
  };
  check_node(map.bs.position, "bs");
  check_node(map.relay.position, "relay");
  if (map.bs.position == map.relay.position) throw DomainError("relay.position: coincides with the BS");

  const auto &sectors = map.bs.sector_azimuths_deg;
  if (sectors.empty() || sectors.size() > 3) throw DomainError("bs.sector_azimuths: expected 1 to 3 sectors");
  if (map.bs.array && (map.bs.array->first < 1 || map.bs.array->second < 1))
    throw DomainError("bs.array: nh and nv must be >= 1");

  const auto &relay = map.relay;
  if (relay.ris_elements && (relay.ris_elements->first < 1 || relay.ris_elements->second < 1))
    throw DomainError("relay.elements: mh and mv must be >= 1");
  if (relay.ncr_array && (relay.ncr_array->first < 1 || relay.ncr_array->second < 1))
    throw DomainError("relay.array: nh and nv must be >= 1");
  if (relay.kind == RelayKind::Ncr) check_ncr_separation(map, relay.min_separation_deg.value_or(120.0));

  if (!(map.grid.spacing > 0.0)) throw DomainError("grid.spacing: must be positive");
  if (!std::isfinite(map.grid.ue_height)) throw DomainError("grid.ue_height: non-finite");
}

ScenarioMap parse_scenario(std::string_view json_text, const HeightDefaults &heights) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw IoError(std::string("scenario parse error at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw DomainError("scenario: top-level value must be an object");

  ScenarioMap map;
  const json &bounds = require(doc, "bounds", "scenario");
  map.bounds.min = point2(require(bounds, "min", "bounds"), "bounds.min");
  map.bounds.max = point2(require(bounds, "max", "bounds"), "bounds.max");

  if (doc.contains("buildings")) {
    const json &blds = doc.at("buildings");
    if (!blds.is_array()) throw DomainError("buildings: expected an array");
    for (std::size_t i = 0; i < blds.size(); ++i) {
      const std::string tag = "buildings[" + std::to_string(i) + "]";
      Building b;
      const json &fp = require(blds[i], "footprint", tag);
      if (!fp.is_array()) throw DomainError(tag + ".footprint: expected an array of [x, y]");
      for (const auto &v : fp) b.footprint.push_back(point2(v, tag + ".footprint"));
      b.height = number(require(blds[i], "height", tag), tag + ".height");
      map.buildings.push_back(std::move(b));
    }
  }

  const json &bs = require(doc, "bs", "scenario");
  map.bs.position = position(require(bs, "position", "bs"), heights.bs, "bs.position");
  if (bs.contains("sector_azimuths")) {
    map.bs.sector_azimuths_deg.clear();
    for (const auto &a : bs.at("sector_azimuths")) map.bs.sector_azimuths_deg.push_back(number(a, "bs.sector_azimuths"));
  }
  if (bs.contains("sector_elevation")) map.bs.sector_elevation_deg = number(bs.at("sector_elevation"), "bs.sector_elevation");
  if (bs.contains("array")) map.bs.array = dims(bs.at("array"), "nh", "nv", "bs.array");
  if (bs.contains("tx_power_dbm")) map.bs.tx_power_dbm = number(bs.at("tx_power_dbm"), "bs.tx_power_dbm");

  const json &relay = require(doc, "relay", "scenario");
  map.relay.kind = relay_kind_from_string(require(relay, "kind", "relay").get<std::string>());
  map.relay.position = position(require(relay, "position", "relay"), heights.relay, "relay.position");
  map.relay.boresight = direction(relay, "relay");
  if (relay.contains("donor")) map.relay.donor_boresight = direction(relay.at("donor"), "relay.donor");
  if (relay.contains("min_separation")) map.relay.min_separation_deg = number(relay.at("min_separation"), "relay.min_separation");
  if (relay.contains("elements")) map.relay.ris_elements = dims(relay.at("elements"), "mh", "mv", "relay.elements");
  if (relay.contains("array")) map.relay.ncr_array = dims(relay.at("array"), "nh", "nv", "relay.array");

  map.grid.ue_height = heights.ue;
  const json &grid = require(doc, "grid", "scenario");
  map.grid.spacing = number(require(grid, "spacing", "grid"), "grid.spacing");
  if (grid.contains("ue_height")) map.grid.ue_height = number(grid.at("ue_height"), "grid.ue_height");

  validate_scenario(map);
  return map;
}

ScenarioMap load_scenario(const std::filesystem::path &path, const HeightDefaults &heights) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), heights);
}

}  // namespace mmcov
