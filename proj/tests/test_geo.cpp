#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "sentiscope/error.hpp"
#include "sentiscope/geo.hpp"
#include "support.hpp"

using namespace sentiscope;
using nlohmann::json;

namespace {

Polygon square(double x0, double y0, double side) {
  return {{{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}, {x0, y0}}};
}

json feature(const std::string& code, std::int64_t population, const Polygon& poly) {
  json props = {{"population", population}, {"gun_ownership_pct", 0.4}};
  if (!code.empty()) props["state_code"] = code;
  json rings = json::array();
  for (const auto& r : poly) {
    json ring = json::array();
    for (const auto& v : r) ring.push_back({v[0], v[1]});
    rings.push_back(ring);
  }
  return {{"type", "Feature"}, {"properties", props}, {"geometry", {{"type", "Polygon"}, {"coordinates", rings}}}};
}

json collection(std::vector<json> features) {
  return {{"type", "FeatureCollection"}, {"features", features}};
}

}  // namespace

TEST_SUITE("geo") {
  TEST_CASE("unit square membership") {
    const auto p = square(0, 0, 1);
    CHECK(point_in_polygon(0.5, 0.5, p));
    CHECK_FALSE(point_in_polygon(2, 2, p));
    CHECK(point_in_polygon(0, 0.5, p));
    CHECK(point_in_polygon(1, 1, p));
    CHECK_FALSE(point_in_polygon(-1e-9, 0.5, p));
  }

  TEST_CASE("holes are excluded") {
    Polygon donut = square(0, 0, 4);
    donut.push_back(square(1, 1, 2)[0]);
    const auto s = make_state_polygon("DN", {donut});
    CHECK(point_in_polygon(0.5, 0.5, s));
    CHECK_FALSE(point_in_polygon(2, 2, s));
  }

  TEST_CASE("ring validation") {
    CHECK_THROWS_AS(make_state_polygon("XX", {{{{0, 0}, {1, 0}, {0, 0}}}}), GeometryError);
    CHECK_THROWS_AS(make_state_polygon("XX", {{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}}), GeometryError);
    // Bow tie: edges cross.
    CHECK_THROWS_AS(make_state_polygon("XX", {{{{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}}}}), GeometryError);
    // A repeated vertex is tolerated.
    CHECK_NOTHROW(make_state_polygon("XX", {{{{0, 0}, {1, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}}}));
  }

  TEST_CASE("schema errors carry the feature index") {
    const auto fc = collection({feature("AA", 10, square(0, 0, 1)), feature("", 10, square(2, 0, 1))});
    try {
      parse_state_geo(fc);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.feature_index() == 1);
    }
    CHECK_THROWS_AS(parse_state_geo(collection({feature("AA", 0, square(0, 0, 1))})), SchemaError);
    CHECK_THROWS_AS(parse_state_geo(collection({feature("AA", 1, square(0, 0, 1)), feature("AA", 1, square(3, 0, 1))})),
                    SchemaError);
    CHECK_THROWS_AS(parse_state_geo(json::array()), SchemaError);
  }

  TEST_CASE("population table and overrides") {
    auto geo = parse_state_geo(collection({feature("BB", 300, square(2, 0, 1)), feature("AA", 100, square(0, 0, 1))}));
    CHECK(geo.polygons[0].state_code == "AA");
    CHECK(geo.population.national_population == 400);
    CHECK(geo.population.at("BB").population == 300);
    CHECK_THROWS_AS(geo.population.at("CC"), UnknownState);

    test::TempDir dir("geo");
    {
      std::ofstream out(dir / "pop.csv");
      out << "state_code,population,gun_ownership_pct\nAA,1000,0.25\n";
    }
    apply_population_overrides(geo.population, dir / "pop.csv");
    CHECK(geo.population.at("AA") == StateInfo{1000, 0.25});
    CHECK(geo.population.national_population == 1300);
  }

  TEST_CASE("state assignment") {
    const auto geo = parse_state_geo(collection({feature("AA", 1, square(0, 0, 1)), feature("BB", 1, square(1, 0, 1))}));
    CHECK(assign_state(0.5, 0.5, geo.polygons) == "AA");
    CHECK(assign_state(1.5, 0.5, geo.polygons) == "BB");
    // Shared edge: lexicographically first state wins.
    CHECK(assign_state(1.0, 0.5, geo.polygons) == "AA");
    CHECK(assign_state(5, 5, geo.polygons) == std::nullopt);
    Tweet t = test::tweet("x", "no place");
    CHECK(assign_state(t, geo.polygons) == std::nullopt);
    t.coordinates = Coordinates{0.5, 1.5};
    CHECK(assign_state(t, geo.polygons) == "BB");
  }

  TEST_CASE("translation keeps membership") {
    CounterRng rng(3);
    const auto base = square(-3, 2, 2.5);
    for (int i = 0; i < 200; ++i) {
      const double x = rng.uniform(-5, 2), y = rng.uniform(0, 6);
      const double dx = rng.uniform(-50, 50), dy = rng.uniform(-30, 30);
      Polygon moved = base;
      for (auto& v : moved[0]) v = {v[0] + dx, v[1] + dy};
      CHECK(point_in_polygon(x, y, base) == point_in_polygon(x + dx, y + dy, moved));
    }
  }

  TEST_CASE("fixtures resolve real places") {
    const auto full = load_state_geo(test::data_path("us_states_full.geojson"));
    CHECK(full.polygons.size() == 50);
    CHECK(assign_state(-74.0060, 40.7128, full.polygons) == "NY");
    CHECK(assign_state(-87.6298, 41.8781, full.polygons) == "IL");
    CHECK(assign_state(-60, 30, full.polygons) == std::nullopt);
    std::int64_t sum = 0;
    for (const auto& [code, info] : full.population.states) sum += info.population;
    CHECK(full.population.national_population == sum);

    const auto simple = load_state_geo(test::data_path("us_states_simplified.geojson"));
    CHECK(simple.polygons.size() == 50);
    CHECK(assign_state(-74.0060, 40.7128, simple.polygons) == "NY");
  }
}
