#include "sentiscope/geo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sentiscope/error.hpp"
#include "sentiscope/ingest.hpp"
#include "sentiscope/parallel.hpp"

namespace sentiscope {

namespace {

double cross(const Vertex& o, const Vertex& a, const Vertex& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool on_segment(const Vertex& p, const Vertex& a, const Vertex& b) {
  return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= p[1] &&
         p[1] <= std::max(a[1], b[1]);
}

int sign(double v) { return (v > 0) - (v < 0); }

bool segments_intersect(const Vertex& a, const Vertex& b, const Vertex& c, const Vertex& d) {
  const int d1 = sign(cross(c, d, a)), d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c)), d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  return (d1 == 0 && on_segment(a, c, d)) || (d2 == 0 && on_segment(b, c, d)) ||
         (d3 == 0 && on_segment(c, a, b)) || (d4 == 0 && on_segment(d, a, b));
}

// Sweep over segments sorted by min x; only neighbours along the ring may
// share a point.
void check_simple(const Ring& ring, const std::string& where) {
  const std::size_t n = ring.size() - 1;  // segment i joins ring[i], ring[i+1]
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const auto min_x = [&](std::size_t i) { return std::min(ring[i][0], ring[i + 1][0]); };
  const auto max_x = [&](std::size_t i) { return std::max(ring[i][0], ring[i + 1][0]); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return min_x(a) < min_x(b); });
  for (std::size_t oi = 0; oi < n; ++oi) {
    const std::size_t i = order[oi];
    const double hi = max_x(i);
    for (std::size_t oj = oi + 1; oj < n && min_x(order[oj]) <= hi; ++oj) {
      const std::size_t j = order[oj];
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap == 1 || gap == n - 1) continue;
      if (segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1]))
        throw GeometryError(where + ": ring self-intersects near (" + std::to_string(ring[i][0]) + ", " +
                            std::to_string(ring[i][1]) + ")");
    }
  }
}

// Repeated consecutive vertices are legal GeoJSON but give zero-length edges.
void drop_repeats(Ring& ring) {
  ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
}

void validate_ring(Ring& ring, const std::string& where) {
  if (ring.size() < 4) throw GeometryError(where + ": ring has " + std::to_string(ring.size()) + " vertices, need 4");
  if (ring.front() != ring.back()) throw GeometryError(where + ": ring is not closed");
  for (const auto& v : ring)
    if (!std::isfinite(v[0]) || !std::isfinite(v[1])) throw GeometryError(where + ": non-finite vertex");
  drop_repeats(ring);
  if (ring.size() < 4) throw GeometryError(where + ": ring collapses to fewer than 3 distinct vertices");
  check_simple(ring, where);
}

BoundingBox ring_box(const Ring& ring) {
  BoundingBox b{ring[0][0], ring[0][1], ring[0][0], ring[0][1]};
  for (const auto& v : ring) {
    b.min_lon = std::min(b.min_lon, v[0]);
    b.max_lon = std::max(b.max_lon, v[0]);
    b.min_lat = std::min(b.min_lat, v[1]);
    b.max_lat = std::max(b.max_lat, v[1]);
  }
  return b;
}

BoundingBox merge(BoundingBox a, const BoundingBox& b) {
  a.min_lon = std::min(a.min_lon, b.min_lon);
  a.max_lon = std::max(a.max_lon, b.max_lon);
  a.min_lat = std::min(a.min_lat, b.min_lat);
  a.max_lat = std::max(a.max_lat, b.max_lat);
  return a;
}

Ring parse_ring(const nlohmann::json& j, std::size_t feature) {
  if (!j.is_array()) throw SchemaError(feature, "ring is not an array");
  Ring ring;
  ring.reserve(j.size());
  for (const auto& p : j) {
    if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number())
      throw SchemaError(feature, "vertex is not a [lon, lat] pair");
    ring.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return ring;
}

Polygon parse_polygon(const nlohmann::json& j, std::size_t feature) {
  if (!j.is_array() || j.empty()) throw SchemaError(feature, "polygon has no rings");
  Polygon poly;
  for (const auto& r : j) poly.push_back(parse_ring(r, feature));
  return poly;
}

}  // namespace

StatePolygon make_state_polygon(std::string code, std::vector<Polygon> polygons) {
  if (polygons.empty()) throw GeometryError(code + ": no polygons");
  StatePolygon state{std::move(code), std::move(polygons), {}, {}};
  for (std::size_t p = 0; p < state.polygons.size(); ++p) {
    Polygon& poly = state.polygons[p];
    if (poly.empty()) throw GeometryError(state.state_code + ": polygon " + std::to_string(p) + " has no rings");
    for (std::size_t r = 0; r < poly.size(); ++r)
      validate_ring(poly[r], state.state_code + " polygon " + std::to_string(p) + " ring " + std::to_string(r));
    state.part_boxes.push_back(ring_box(poly.front()));
    state.bbox = p == 0 ? state.part_boxes.back() : merge(state.bbox, state.part_boxes.back());
  }
  return state;
}

bool point_in_polygon(double lon, double lat, const Polygon& polygon) {
  const Vertex p{lon, lat};
  bool inside = false;
  for (const Ring& ring : polygon) {
    for (std::size_t i = 0, j = ring.size() - 2; i + 1 < ring.size(); j = i++) {
      const Vertex& a = ring[i];
      const Vertex& b = ring[j];
      if (cross(a, b, p) == 0.0 && on_segment(p, a, b)) return true;
      if ((a[1] > lat) != (b[1] > lat) && lon < (b[0] - a[0]) * (lat - a[1]) / (b[1] - a[1]) + a[0])
        inside = !inside;
    }
  }
  return inside;
}

bool point_in_polygon(double lon, double lat, const StatePolygon& state) {
  if (!state.bbox.contains(lon, lat)) return false;
  for (std::size_t p = 0; p < state.polygons.size(); ++p)
    if (state.part_boxes[p].contains(lon, lat) && point_in_polygon(lon, lat, state.polygons[p])) return true;
  return false;
}

StateGeo parse_state_geo(const nlohmann::json& fc) {
  if (!fc.is_object() || fc.value("type", "") != "FeatureCollection" || !fc.contains("features") ||
      !fc["features"].is_array())
    throw SchemaError(0, "not a GeoJSON FeatureCollection");
  StateGeo geo;
  std::map<std::string, StateInfo> table;
  const auto& features = fc["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    if (!f.is_object() || !f.contains("properties") || !f["properties"].is_object())
      throw SchemaError(i, "missing properties");
    const auto& props = f["properties"];
    if (!props.contains("state_code") || !props["state_code"].is_string() ||
        props["state_code"].get<std::string>().empty())
      throw SchemaError(i, "missing state_code");
    const std::string code = props["state_code"].get<std::string>();
    if (!props.contains("population") || !props["population"].is_number_integer() ||
        props["population"].get<std::int64_t>() <= 0)
      throw SchemaError(i, "population must be a positive integer");
    if (!props.contains("gun_ownership_pct") || !props["gun_ownership_pct"].is_number())
      throw SchemaError(i, "missing gun_ownership_pct");
    const double pct = props["gun_ownership_pct"].get<double>();
    if (!(pct >= 0.0 && pct <= 1.0)) throw SchemaError(i, "gun_ownership_pct must be a fraction in [0,1]");
    if (table.contains(code)) throw SchemaError(i, "duplicate state_code " + code);
    table[code] = {props["population"].get<std::int64_t>(), pct};

    if (!f.contains("geometry") || !f["geometry"].is_object()) throw SchemaError(i, "missing geometry");
    const auto& g = f["geometry"];
    const std::string type = g.value("type", "");
    if (!g.contains("coordinates")) throw SchemaError(i, "geometry has no coordinates");
    std::vector<Polygon> polys;
    if (type == "Polygon") {
      polys.push_back(parse_polygon(g["coordinates"], i));
    } else if (type == "MultiPolygon") {
      if (!g["coordinates"].is_array()) throw SchemaError(i, "bad MultiPolygon");
      for (const auto& p : g["coordinates"]) polys.push_back(parse_polygon(p, i));
    } else {
      throw SchemaError(i, "unsupported geometry type '" + type + "'");
    }
    geo.polygons.push_back(make_state_polygon(code, std::move(polys)));
  }
  std::sort(geo.polygons.begin(), geo.polygons.end(),
            [](const StatePolygon& a, const StatePolygon& b) { return a.state_code < b.state_code; });
  geo.population = make_population_table(std::move(table));
  return geo;
}

StateGeo load_state_geo(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(0, path.string() + " is not valid JSON: " + e.what());
  }
  return parse_state_geo(j);
}

void apply_population_overrides(PopulationTable& table, const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open " + csv_path.string());
  std::vector<std::string> fields;
  if (!read_csv_record(in, fields, 0) || fields != std::vector<std::string>{"state_code", "population", "gun_ownership_pct"})
    throw CsvFormatError(0, "expected header state_code,population,gun_ownership_pct");
  auto states = table.states;
  for (std::size_t row = 1; read_csv_record(in, fields, row); ++row) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 3) throw CsvFormatError(row, "expected 3 columns");
    if (!states.contains(fields[0])) throw UnknownState("override for unknown state '" + fields[0] + "'");
    try {
      std::size_t used = 0;
      const long long pop = std::stoll(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("population");
      const double pct = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("pct");
      states[fields[0]] = {pop, pct};
    } catch (const std::logic_error&) {
      throw CsvFormatError(row, "unparseable number");
    }
  }
  table = make_population_table(std::move(states));
}

std::optional<std::string> assign_state(double lon, double lat, std::span<const StatePolygon> polygons) {
  if (!std::isfinite(lon) || !std::isfinite(lat)) return std::nullopt;
  for (const auto& s : polygons)
    if (point_in_polygon(lon, lat, s)) return s.state_code;
  return std::nullopt;
}

std::optional<std::string> assign_state(const Tweet& tweet, std::span<const StatePolygon> polygons) {
  if (!tweet.coordinates) return std::nullopt;
  return assign_state(tweet.coordinates->lon, tweet.coordinates->lat, polygons);
}

void assign_states(std::span<TweetRecord> records, std::span<const StatePolygon> polygons) {
  parallel_for(records.size(), [&](std::size_t i) { records[i].state = assign_state(records[i].tweet, polygons); });
}

}  // namespace sentiscope
