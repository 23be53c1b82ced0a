#include "skyway/city.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json_util.hpp"

namespace skyway {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string out = "invalid city model";
  for (const auto& s : v) {
    out += "; ";
    out += s;
  }
  return out;
}

// Interior spans of the horizontal line at y, as sorted [lo, hi] pairs.
std::vector<std::pair<double, double>> scanline_spans(const Polygon2& poly, double y) {
  std::vector<double> xs;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = poly[j];
    const Point2 b = poly[i];
    if ((b.y > y) != (a.y > y)) {
      xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
  }
  std::sort(xs.begin(), xs.end());
  std::vector<std::pair<double, double>> spans;
  for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
    if (xs[k + 1] - xs[k] > kEps) spans.emplace_back(xs[k], xs[k + 1]);
  }
  return spans;
}

std::optional<Point2> nearest_span_point(const Polygon2& poly, Point2 target, double y) {
  const auto spans = scanline_spans(poly, y);
  if (spans.empty()) return std::nullopt;
  const std::pair<double, double>* best = nullptr;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& s : spans) {
    const double gap = target.x < s.first ? s.first - target.x
                       : target.x > s.second ? target.x - s.second
                                             : 0.0;
    if (gap < best_gap) {
      best_gap = gap;
      best = &s;
    }
  }
  const double margin = std::min(0.5, 0.25 * (best->second - best->first));
  return Point2{std::clamp(target.x, best->first + margin, best->second - margin), y};
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

const Building* CityModel::find_building(std::string_view id) const {
  for (const auto& b : buildings) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

std::size_t CityModel::station_count() const {
  return static_cast<std::size_t>(
      std::count_if(buildings.begin(), buildings.end(), [](const Building& b) { return b.has_station; }));
}

NodePlacement station_point(const Polygon2& footprint) {
  const Point2 c = area_centroid(footprint);
  if (locate(c, footprint) == Containment::Inside) return {c, PlacementRule::Centroid};

  const Point2 v = vertex_average(footprint);
  if (locate(v, footprint) == Containment::Inside) return {v, PlacementRule::VertexAverage};

  double ymin = footprint[0].y;
  double ymax = ymin;
  for (const auto& p : footprint.vertices) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double y = (v.y > ymin && v.y < ymax) ? v.y : 0.5 * (ymin + ymax);
  auto p = nearest_span_point(footprint, v, y);
  if (!p || locate(*p, footprint) != Containment::Inside) {
    p = nearest_span_point(footprint, v, 0.5 * (ymin + ymax));
  }
  return {p.value_or(v), PlacementRule::ProjectedAverage};
}

SkywayNode rooftop_node(const Building& b, const CityModel& city) {
  if (!b.has_station) throw std::invalid_argument("building '" + b.id + "' has no station");
  const Point2 xy = station_point(b.footprint).xy;
  return {b.id, {xy.x, xy.y, b.height + city.node_offset}, b.is_recharge};
}

std::vector<SkywayNode> station_nodes(const CityModel& city) {
  std::vector<SkywayNode> nodes;
  for (const auto& b : city.buildings) {
    if (b.has_station) nodes.push_back(rooftop_node(b, city));
  }
  return nodes;
}

std::vector<std::string> normalize_and_validate(CityModel& city) {
  std::vector<std::string> errors;
  if (!std::isfinite(city.node_offset) || !(city.node_offset > 0.0)) {
    errors.emplace_back("node_offset must be positive and finite");
  }

  std::set<std::string> ids;
  std::vector<bool> footprint_ok(city.buildings.size(), false);
  for (std::size_t i = 0; i < city.buildings.size(); ++i) {
    auto& b = city.buildings[i];
    const std::string who = "building '" + b.id + "': ";
    if (b.id.empty()) errors.push_back("building with empty id");
    if (!ids.insert(b.id).second) errors.push_back(who + "duplicate id");
    if (!std::isfinite(b.height) || !(b.height > 0.0)) errors.push_back(who + "height must be positive");
    if (b.is_recharge && !b.has_station) errors.push_back(who + "recharge building must have a station");
    const auto defects = polygon_defects(b.footprint);
    for (const auto& d : defects) errors.push_back(who + d);
    if (defects.empty()) {
      footprint_ok[i] = true;
      if (signed_area(b.footprint) < 0.0) {
        std::reverse(b.footprint.vertices.begin(), b.footprint.vertices.end());
      }
    }
  }

  std::set<std::string> zone_ids;
  std::vector<bool> zone_ok(city.no_fly_zones.size(), false);
  for (std::size_t i = 0; i < city.no_fly_zones.size(); ++i) {
    auto& z = city.no_fly_zones[i];
    const std::string who = "no-fly zone '" + z.id + "': ";
    if (z.id.empty()) errors.push_back("no-fly zone with empty id");
    if (!zone_ids.insert(z.id).second) errors.push_back(who + "duplicate id");
    const auto defects = polygon_defects(z.region);
    for (const auto& d : defects) errors.push_back(who + d);
    if (defects.empty()) {
      zone_ok[i] = true;
      if (signed_area(z.region) < 0.0) std::reverse(z.region.vertices.begin(), z.region.vertices.end());
    }
  }

  for (std::size_t i = 0; i < city.buildings.size(); ++i) {
    const auto& b = city.buildings[i];
    if (!b.has_station || !footprint_ok[i]) continue;
    const Point2 xy = station_point(b.footprint).xy;
    for (std::size_t k = 0; k < city.no_fly_zones.size(); ++k) {
      if (zone_ok[k] && inside_or_on(xy, city.no_fly_zones[k].region)) {
        errors.push_back("building '" + b.id + "': station lies inside no-fly zone '" +
                         city.no_fly_zones[k].id + "'");
      }
    }
  }

  if (city.station_count() < 2) errors.emplace_back("at least 2 stations required");
  return errors;
}

CityModel load_city(std::string_view document) {
  using detail::json;
  CityModel city;
  try {
    const json doc = json::parse(document.begin(), document.end());
    if (!doc.is_object()) throw ParseError("city document must be a JSON object");
    for (const auto& jb : doc.at("buildings")) {
      Building b;
      b.id = jb.at("id").get<std::string>();
      b.footprint = detail::polygon_from(jb.at("footprint"));
      b.height = detail::number(jb.at("height"));
      b.has_station = jb.value("has_station", false);
      b.is_recharge = jb.value("is_recharge", false);
      city.buildings.push_back(std::move(b));
    }
    if (doc.contains("no_fly_zones")) {
      for (const auto& jz : doc.at("no_fly_zones")) {
        city.no_fly_zones.push_back(
            {jz.at("id").get<std::string>(), detail::polygon_from(jz.at("region"))});
      }
    }
    if (doc.contains("node_offset")) city.node_offset = detail::number(doc.at("node_offset"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed city document: ") + e.what());
  }
  auto violations = normalize_and_validate(city);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return city;
}

CityModel load_city(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_city(std::string_view(text));
}

CityModel load_city_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open city document '" + path + "'");
  return load_city(in);
}

std::string save_city(const CityModel& city) {
  using detail::json;
  json doc;
  json buildings = json::array();
  for (const auto& b : city.buildings) {
    buildings.push_back({{"id", b.id},
                         {"footprint", detail::to_json(b.footprint)},
                         {"height", b.height},
                         {"has_station", b.has_station},
                         {"is_recharge", b.is_recharge}});
  }
  json zones = json::array();
  for (const auto& z : city.no_fly_zones) {
    zones.push_back({{"id", z.id}, {"region", detail::to_json(z.region)}});
  }
  doc["buildings"] = std::move(buildings);
  doc["no_fly_zones"] = std::move(zones);
  doc["node_offset"] = city.node_offset;
  return doc.dump(2) + "\n";
}

}  // namespace skyway
