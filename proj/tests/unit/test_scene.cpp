// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <random>

#include "doctest.h"
#include "mmcov/scene.hpp"

using namespace mmcov;

namespace {

std::vector<Point2> rect(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

ScenarioMap empty_map() {
  ScenarioMap m;
  m.bounds = {{0, 0}, {100, 100}};
  m.bs.position = {0, 50, 6};
  m.relay.kind = RelayKind::Ris;
  m.relay.position = {100, 50, 4};
  m.relay.boresight = {180, 0};
  m.grid.spacing = 10;
  return m;
}

// Ray-casting point-in-polygon, written independently of the library.
bool pip_oracle(const std::vector<Point2> &poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto &a = poly[i], &b = poly[j];
    // boundary counts as inside
    const double cr = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
    if (std::abs(cr) < 1e-12 && x >= std::min(a.x, b.x) - 1e-12 && x <= std::max(a.x, b.x) + 1e-12 &&
        y >= std::min(a.y, b.y) - 1e-12 && y <= std::max(a.y, b.y) + 1e-12)
      return true;
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

// Dense sampling along the segment; misses only grazing contacts.
bool los_oracle(const Vec3 &a, const Vec3 &b, const std::vector<Building> &blds) {
  const int n = 20000;
  for (int i = 1; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    const Vec3 p = a + (b - a) * t;
    for (const auto &bl : blds)
      if (p.z < bl.height && pip_oracle(bl.footprint, p.x, p.y)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("empty map is fully visible") {
  const ScenarioMap m = empty_map();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 100), h(0, 30);
  for (int i = 0; i < 200; ++i) {
    const Vec3 a{u(rng), u(rng), h(rng)}, b{u(rng), u(rng), h(rng)};
    CHECK(los_visible(a, b, m));
  }
}

TEST_CASE("tall building between endpoints blocks") {
  ScenarioMap m = empty_map();
  m.buildings.push_back({rect(40, 40, 60, 60), 20});
  CHECK_FALSE(los_visible({30, 50, 5}, {70, 50, 5}, m));
  CHECK_FALSE(los_visible({70, 50, 5}, {30, 50, 5}, m));
}

TEST_CASE("segment above a 10 m building is clear") {
  ScenarioMap m = empty_map();
  m.buildings.push_back({rect(40, 40, 60, 60), 10});
  CHECK(los_visible({30, 50, 20}, {70, 50, 20}, m));
  CHECK(los_oracle({30, 50, 20}, {70, 50, 20}, m.buildings));
}

TEST_CASE("grazing a wall or roof edge counts as blocked") {
  ScenarioMap m = empty_map();
  m.buildings.push_back({rect(40, 40, 60, 60), 10});
  CHECK_FALSE(los_visible({30, 40, 5}, {70, 40, 5}, m));   // along a wall
  CHECK_FALSE(los_visible({30, 50, 10}, {70, 50, 10}, m));  // along the roof
  CHECK_FALSE(los_visible({30, 50, 5}, {50, 30, 5}, m));   // touches one corner
  CHECK(los_visible({30, 39.9, 5}, {70, 39.9, 5}, m));
}

TEST_CASE("los matches dense-sampling oracle on random segments") {
  ScenarioMap m = empty_map();
  m.buildings.push_back({rect(20, 20, 35, 40), 12});
  m.buildings.push_back({{{60, 10}, {85, 25}, {70, 45}, {55, 30}}, 25});
  m.buildings.push_back({{{40, 60}, {70, 60}, {70, 90}, {60, 90}, {60, 70}, {40, 70}}, 8});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 100), h(0.5, 30);
  int checked = 0, disagree = 0;
  for (int i = 0; i < 400; ++i) {
    const Vec3 a{u(rng), u(rng), h(rng)}, b{u(rng), u(rng), h(rng)};
    if (inside_any_building(m, {a.x, a.y}) || inside_any_building(m, {b.x, b.y})) continue;
    ++checked;
    const bool lib = los_visible(a, b, m);
    CHECK(lib == los_visible(b, a, m));
    disagree += lib != los_oracle(a, b, m.buildings);
  }
  CHECK(checked > 200);
  CHECK(disagree == 0);
}

TEST_CASE("adding a building never restores visibility") {
  ScenarioMap m = empty_map();
  m.buildings.push_back({rect(20, 20, 35, 40), 12});
  ScenarioMap more = m;
  more.buildings.push_back({rect(50, 50, 70, 65), 18});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 100), h(0.5, 25);
  for (int i = 0; i < 300; ++i) {
    const Vec3 a{u(rng), u(rng), h(rng)}, b{u(rng), u(rng), h(rng)};
    if (!los_visible(a, b, m)) CHECK_FALSE(los_visible(a, b, more));
  }
}

TEST_CASE("grid counting") {
  ScenarioMap m = empty_map();
  CHECK(generate_ue_grid(m).size() == 121);
  for (const auto &p : generate_ue_grid(m)) CHECK(p.z == doctest::Approx(1.5));

  ScenarioMap full = empty_map();
  full.buildings.push_back({rect(0, 0, 100, 100), 50});
  full.bs.position = {0, 50, 60};
  full.relay.position = {100, 50, 60};
  CHECK_THROWS_AS(generate_ue_grid(full), DomainError);
}

TEST_CASE("corridor fixture: grid matches point-in-polygon sweep") {
  const ScenarioMap m = load_scenario(MMCOV_DATA_DIR "/corridor.json");
  REQUIRE(m.buildings.size() == 2);
  // two parallel slabs with a street between them
  CHECK_FALSE(los_visible({30, 30, 1.5}, {30, 70, 1.5}, m));
  CHECK(los_visible({30, 50, 1.5}, {90, 50, 1.5}, m));

  std::size_t outside = 0;
  for (int j = 0; j <= 100; ++j)
    for (int i = 0; i <= 100; ++i) {
      bool in = false;
      for (const auto &b : m.buildings) in = in || pip_oracle(b.footprint, i, j);
      outside += !in;
    }
  const auto grid = generate_ue_grid(m);
  for (const auto &p : grid) CHECK_FALSE(inside_any_building(m, {p.x, p.y}));
  std::size_t raw_outside = 0;
  for (const auto &p : raw_grid(m)) raw_outside += !inside_any_building(m, {p.x, p.y});
  CHECK(raw_outside == outside);
  // every retained point has a geometric path, every dropped one has none
  std::size_t members = 0;
  for (const auto &p : raw_grid(m)) {
    if (inside_any_building(m, {p.x, p.y})) continue;
    members += los_visible(p, m.bs.position, m) || los_visible(p, m.relay.position, m);
  }
  CHECK(members == grid.size());
}

TEST_CASE("grid invariant to building order") {
  ScenarioMap m = load_scenario(MMCOV_DATA_DIR "/open_square.json");
  m.buildings.push_back({rect(80, 70, 90, 80), 10});
  ScenarioMap r = m;
  std::reverse(r.buildings.begin(), r.buildings.end());
  const auto a = generate_ue_grid(m), b = generate_ue_grid(r);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("sector FoV") {
  const Vec3 node{0, 0, 0};
  CHECK(in_sector_fov({0, 0}, {10, 0, 0}, node));
  CHECK_FALSE(in_sector_fov({0, 0}, {std::cos(deg2rad(61)), std::sin(deg2rad(61)), 0}, node));
  CHECK(in_sector_fov({0, 0}, {std::cos(deg2rad(-60)), std::sin(deg2rad(-60)), 0}, node));
  CHECK(in_sector_fov({0, 0}, {std::cos(deg2rad(30)), 0, std::sin(deg2rad(30))}, node));
  CHECK_FALSE(in_sector_fov({0, 0}, {std::cos(deg2rad(31)), 0, -std::sin(deg2rad(31))}, node));
  CHECK(in_sector_fov({170, 0}, {-10, -3, 0}, node));  // wraps through 180
}

TEST_CASE("scenario parsing") {
  SUBCASE("no buildings") {
    const auto m = parse_scenario(R"({"bounds":{"min":[0,0],"max":[10,10]},
      "bs":{"position":[0,0]},"relay":{"kind":"ris","position":[10,10],"azimuth":-135},
      "grid":{"spacing":1}})");
    CHECK(m.buildings.empty());
    CHECK(m.bs.position.z == 6.0);
    CHECK(m.relay.position.z == 4.0);
    CHECK(m.grid.ue_height == 1.5);
  }
  SUBCASE("self-intersecting footprint names the building") {
    try {
      (void)load_scenario(MMCOV_TEST_DATA_DIR "/bowtie.json");
      FAIL("expected an error");
    } catch (const DomainError &e) {
      CHECK(std::string(e.what()).find("buildings[1]") != std::string::npos);
    }
  }
  SUBCASE("malformed JSON") { CHECK_THROWS_AS(load_scenario(MMCOV_TEST_DATA_DIR "/malformed.json"), IoError); }
  SUBCASE("BS inside a building") {
    try {
      (void)load_scenario(MMCOV_TEST_DATA_DIR "/bs_inside.json");
      FAIL("expected an error");
    } catch (const DomainError &e) {
      CHECK(std::string(e.what()).find("bs.position: inside buildings[0]") != std::string::npos);
    }
  }
  SUBCASE("NCR panels too close") {
    CHECK_THROWS_AS(parse_scenario(R"({"bounds":{"min":[0,0],"max":[10,10]},
      "bs":{"position":[0,0]},"relay":{"kind":"ncr","position":[10,10],"azimuth":-135},
      "grid":{"spacing":1}})"),
                    DomainError);
  }
}
