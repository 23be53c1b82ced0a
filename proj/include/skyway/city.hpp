#ifndef SKYWAY_CITY_HPP
#define SKYWAY_CITY_HPP

#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skyway/geometry.hpp"

namespace skyway {

/// Malformed document: not JSON, or JSON of the wrong shape.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed document describing an invalid world.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct Building {
  std::string id;
  Polygon2 footprint;
  double height = 0.0;
  bool has_station = false;
  bool is_recharge = false;

  friend bool operator==(const Building&, const Building&) = default;
};

/// Ground-to-unlimited-altitude prism over `region`.
struct NoFlyZone {
  std::string id;
  Polygon2 region;

  friend bool operator==(const NoFlyZone&, const NoFlyZone&) = default;
};

struct CityModel {
  std::vector<Building> buildings;
  std::vector<NoFlyZone> no_fly_zones;
  double node_offset = 1.0;  // station height above the rooftop

  const Building* find_building(std::string_view id) const;
  std::size_t station_count() const;

  friend bool operator==(const CityModel&, const CityModel&) = default;
};

/// Take-off and landing station on a rooftop. The id is the building id.
struct SkywayNode {
  std::string id;
  Point3 position;
  bool is_recharge = false;

  friend bool operator==(const SkywayNode&, const SkywayNode&) = default;
};

/// Which rule picked the horizontal station position.
enum class PlacementRule {
  Centroid,        // area centroid lies inside the footprint
  VertexAverage,   // centroid outside, vertex average inside
  ProjectedAverage // vertex average moved onto the nearest interior span
};

struct NodePlacement {
  Point2 xy;
  PlacementRule rule = PlacementRule::Centroid;
};

/// Interior station point for a footprint (centroid with fallbacks for
/// non-convex shapes whose centroid falls outside).
NodePlacement station_point(const Polygon2& footprint);

SkywayNode rooftop_node(const Building& b, const CityModel& city);

/// Nodes for every station building, in building order.
std::vector<SkywayNode> station_nodes(const CityModel& city);

/// Checks every invariant; returns the violations (empty when valid).
/// Footprints and zones given clockwise are reversed in place.
std::vector<std::string> normalize_and_validate(CityModel& city);

CityModel load_city(std::string_view document);
CityModel load_city(std::istream& in);
std::string save_city(const CityModel& city);

CityModel load_city_file(const std::string& path);

}  // namespace skyway

#endif  // SKYWAY_CITY_HPP
