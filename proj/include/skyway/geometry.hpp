#ifndef SKYWAY_GEOMETRY_HPP
#define SKYWAY_GEOMETRY_HPP

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace skyway {

/// Absolute tolerance (meters) for orientation and containment predicates.
inline constexpr double kEps = 1e-9;

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point2 xy() const { return {x, y}; }
  friend bool operator==(const Point3&, const Point3&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

double norm(Point2 v);
double distance(Point2 a, Point2 b);
double distance(const Point3& a, const Point3& b);

/// Simple polygon, vertices counter-clockwise, no repeated closing vertex.
struct Polygon2 {
  std::vector<Point2> vertices;

  std::size_t size() const { return vertices.size(); }
  const Point2& operator[](std::size_t i) const { return vertices[i]; }
  friend bool operator==(const Polygon2&, const Polygon2&) = default;
};

/// Signed shoelace area; positive for counter-clockwise order.
double signed_area(const Polygon2& poly);

/// Area centroid. Undefined for zero-area input.
Point2 area_centroid(const Polygon2& poly);

Point2 vertex_average(const Polygon2& poly);

/// Returns the list of violated shape invariants (empty when the polygon is
/// valid): vertex count, finiteness, zero-length edges, self-intersection,
/// area.
std::vector<std::string> polygon_defects(const Polygon2& poly);

enum class Containment { Outside, Boundary, Inside };

/// Boundary is reported when the point is within kEps of an edge.
Containment locate(Point2 p, const Polygon2& poly);

inline bool inside_or_on(Point2 p, const Polygon2& poly) {
  return locate(p, poly) != Containment::Outside;
}

double distance_to_segment(Point2 p, Point2 a, Point2 b);

/// Closed-segment intersection; endpoints within kEps of the other segment
/// count as touching.
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);

/// Intersection point of two segments that cross at a single point, or none
/// (parallel, collinear or disjoint).
std::optional<Point2> segment_crossing(Point2 a, Point2 b, Point2 c, Point2 d);

/// True iff the closed regions share a point (touching counts).
bool polygons_intersect(const Polygon2& p, const Polygon2& q);

/// True iff the closed segment ab meets the closed region of poly.
bool segment_meets_polygon(Point2 a, Point2 b, const Polygon2& poly);

/// Rectangle of the given width centred on the axis from a to b.
struct Corridor {
  Polygon2 quad;
  Point2 from;
  Point2 to;
  double width = 0.0;

  /// Projection fraction of q onto the axis, clamped to [0, 1].
  double axis_fraction(Point2 q) const;
};

Corridor corridor(Point2 a, Point2 b, double width);

struct HeightProfileSample {
  double t = 0.0;
  double z = 0.0;
};

/// Altitude of the straight segment a-b at horizontal fraction t.
double los_height_at(const Point3& a, const Point3& b, double t);

/// Lowest altitude of the a-b segment over the part of p inside the corridor
/// of the given width; none when p misses the corridor.
std::optional<double> min_los_height_over(const Polygon2& p, const Point3& a,
                                          const Point3& b,
                                          double corridor_width);

}  // namespace skyway

#endif  // SKYWAY_GEOMETRY_HPP
