#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sentiscope/scoring.hpp"
#include "sentiscope/tweet.hpp"

namespace sentiscope {

using Vertex = std::array<double, 2>;  // (lon, lat)
using Ring = std::vector<Vertex>;      // closed: front() == back()
using Polygon = std::vector<Ring>;     // outer ring first, then holes

struct BoundingBox {
  double min_lon = 0, min_lat = 0, max_lon = 0, max_lat = 0;
  bool contains(double lon, double lat) const {
    return lon >= min_lon && lon <= max_lon && lat >= min_lat && lat <= max_lat;
  }
  double area() const { return (max_lon - min_lon) * (max_lat - min_lat); }
};

struct StatePolygon {
  std::string state_code;
  std::vector<Polygon> polygons;
  std::vector<BoundingBox> part_boxes;  // one per polygon
  BoundingBox bbox;
};

// Validates every ring (>= 4 vertices, closed, simple) and computes the
// bounding boxes. Throws GeometryError.
StatePolygon make_state_polygon(std::string code, std::vector<Polygon> polygons);

bool point_in_polygon(double lon, double lat, const Polygon& polygon);
// Even-odd over each part; points on any edge count as inside.
bool point_in_polygon(double lon, double lat, const StatePolygon& state);

struct StateGeo {
  std::vector<StatePolygon> polygons;  // sorted by state code
  PopulationTable population;
};

StateGeo parse_state_geo(const nlohmann::json& feature_collection);
StateGeo load_state_geo(const std::filesystem::path& path);
// CSV with header state_code,population,gun_ownership_pct; rows replace the
// matching states' properties and national_population is recomputed.
void apply_population_overrides(PopulationTable& table, const std::filesystem::path& csv_path);

// `polygons` must be sorted by code; the first containing polygon wins.
std::optional<std::string> assign_state(const Tweet& tweet, std::span<const StatePolygon> polygons);
std::optional<std::string> assign_state(double lon, double lat, std::span<const StatePolygon> polygons);
void assign_states(std::span<TweetRecord> records, std::span<const StatePolygon> polygons);

}  // namespace sentiscope
