#ifndef SKYWAY_SRC_JSON_UTIL_HPP
#define SKYWAY_SRC_JSON_UTIL_HPP

#include <cmath>
#include <limits>

#include "json.hpp"
#include "skyway/geometry.hpp"

namespace skyway::detail {

using nlohmann::json;

inline json to_json(Point2 p) { return json::array({p.x, p.y}); }
inline json to_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

inline json to_json(const Polygon2& poly) {
  json out = json::array();
  for (const auto& v : poly.vertices) out.push_back(to_json(v));
  return out;
}

// JSON has no infinity; unlimited batteries are written as "inf".
inline json quantity(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number(const json& j) {
  if (j.is_string()) {
    if (j == "inf") return std::numeric_limits<double>::infinity();
    if (j == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (!j.is_number()) throw json::type_error::create(302, "expected a number", &j);
  return j.get<double>();
}

inline Point2 point2_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw json::type_error::create(302, "expected [x, y]", &j);
  return {number(j[0]), number(j[1])};
}

inline Point3 point3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw json::type_error::create(302, "expected [x, y, z]", &j);
  return {number(j[0]), number(j[1]), number(j[2])};
}

inline Polygon2 polygon_from(const json& j) {
  if (!j.is_array()) throw json::type_error::create(302, "expected a vertex list", &j);
  Polygon2 poly;
  for (const auto& v : j) poly.vertices.push_back(point2_from(v));
  return poly;
}

}  // namespace skyway::detail

#endif  // SKYWAY_SRC_JSON_UTIL_HPP
