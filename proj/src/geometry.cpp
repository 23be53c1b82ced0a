#include "skyway/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skyway {

double norm(Point2 v) { return std::hypot(v.x, v.y); }

double distance(Point2 a, Point2 b) { return norm(b - a); }

double distance(const Point3& a, const Point3& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double dz = b.z - a.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double signed_area(const Polygon2& poly) {
  const std::size_t n = poly.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * twice;
}

Point2 area_centroid(const Polygon2& poly) {
  // Shift to the first vertex to limit cancellation for far-from-origin input.
  const Point2 o = poly[0];
  const std::size_t n = poly.size();
  double a2 = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = poly[i] - o;
    const Point2 q = poly[(i + 1) % n] - o;
    const double c = cross(p, q);
    a2 += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)};
}

Point2 vertex_average(const Polygon2& poly) {
  Point2 sum;
  for (const auto& v : poly.vertices) sum = sum + v;
  return (1.0 / static_cast<double>(poly.size())) * sum;
}

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

namespace {

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

}  // namespace

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  if (distance_to_segment(a, c, d) <= kEps || distance_to_segment(b, c, d) <= kEps ||
      distance_to_segment(c, a, b) <= kEps || distance_to_segment(d, a, b) <= kEps) {
    return true;
  }
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

std::optional<Point2> segment_crossing(Point2 a, Point2 b, Point2 c, Point2 d) {
  const Point2 r = b - a;
  const Point2 s = d - c;
  const double denom = cross(r, s);
  if (denom == 0.0) return std::nullopt;
  const double t = cross(c - a, s) / denom;
  const double u = cross(c - a, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return a + t * r;
}

Containment locate(Point2 p, const Polygon2& poly) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = poly[j];
    const Point2 b = poly[i];
    if (distance_to_segment(p, a, b) <= kEps) return Containment::Boundary;
    // Half-open crossing rule on y.
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside ? Containment::Inside : Containment::Outside;
}

std::vector<std::string> polygon_defects(const Polygon2& poly) {
  std::vector<std::string> out;
  const std::size_t n = poly.size();
  if (n < 3) {
    out.emplace_back("polygon needs at least 3 vertices");
    return out;
  }
  for (const auto& v : poly.vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      out.emplace_back("polygon has a non-finite coordinate");
      return out;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(poly[i], poly[(i + 1) % n]) <= kEps) {
      out.emplace_back("polygon has a zero-length edge");
      return out;
    }
  }
  bool crossing = false;
  for (std::size_t i = 0; i < n && !crossing; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n && !crossing; ++j) {
      const Point2 c = poly[j];
      const Point2 d = poly[(j + 1) % n];
      const bool next = j == i + 1;
      const bool wrap = i == 0 && j == n - 1;
      if (next) {
        // Shared vertex b == c; folding back onto the previous edge is the only failure.
        crossing = distance_to_segment(d, a, b) <= kEps || distance_to_segment(a, c, d) <= kEps;
      } else if (wrap) {
        crossing = distance_to_segment(c, a, b) <= kEps || distance_to_segment(b, c, d) <= kEps;
      } else {
        crossing = segments_intersect(a, b, c, d);
      }
    }
  }
  if (crossing) out.emplace_back("polygon is not simple");
  if (std::abs(signed_area(poly)) <= kEps) out.emplace_back("polygon has zero area");
  return out;
}

bool polygons_intersect(const Polygon2& p, const Polygon2& q) {
  const std::size_t n = p.size();
  const std::size_t m = q.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = p[i];
    const Point2 b = p[(i + 1) % n];
    for (std::size_t j = 0; j < m; ++j) {
      if (segments_intersect(a, b, q[j], q[(j + 1) % m])) return true;
    }
  }
  // No boundary contact: either nested or disjoint.
  return inside_or_on(p[0], q) || inside_or_on(q[0], p);
}

bool segment_meets_polygon(Point2 a, Point2 b, const Polygon2& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (segments_intersect(a, b, poly[i], poly[(i + 1) % n])) return true;
  }
  return inside_or_on(a, poly);
}

double Corridor::axis_fraction(Point2 q) const {
  const Point2 axis = to - from;
  return std::clamp(dot(q - from, axis) / dot(axis, axis), 0.0, 1.0);
}

Corridor corridor(Point2 a, Point2 b, double width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw GeometryError("corridor width must be positive and finite");
  }
  const double len = distance(a, b);
  if (len <= kEps) throw GeometryError("corridor endpoints coincide");
  const Point2 dir = (1.0 / len) * (b - a);
  const Point2 off = (0.5 * width) * Point2{-dir.y, dir.x};
  // a-right, b-right, b-left, a-left is counter-clockwise.
  Corridor c;
  c.quad.vertices = {a - off, b - off, b + off, a + off};
  c.from = a;
  c.to = b;
  c.width = width;
  return c;
}

double los_height_at(const Point3& a, const Point3& b, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw GeometryError("height fraction outside [0, 1]");
  return a.z + t * (b.z - a.z);
}

std::optional<double> min_los_height_over(const Polygon2& p, const Point3& a,
                                          const Point3& b, double corridor_width) {
  const Corridor c = corridor(a.xy(), b.xy(), corridor_width);
  const Polygon2& quad = c.quad;

  // The altitude is linear over the corridor, so its minimum over p ∩ quad
  // sits at a vertex of that region: a vertex of p inside the quad, a quad
  // corner inside p, or a crossing of the two boundaries.
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  auto consider = [&](Point2 q) {
    any = true;
    best = std::min(best, los_height_at(a, b, c.axis_fraction(q)));
  };

  for (const auto& v : p.vertices) {
    if (inside_or_on(v, quad)) consider(v);
  }
  for (const auto& v : quad.vertices) {
    if (inside_or_on(v, p)) consider(v);
  }
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e0 = p[i];
    const Point2 e1 = p[(i + 1) % n];
    for (std::size_t j = 0; j < 4; ++j) {
      if (auto x = segment_crossing(e0, e1, quad[j], quad[(j + 1) % 4])) consider(*x);
    }
  }
  if (!any) return std::nullopt;
  return best;
}

}  // namespace skyway
