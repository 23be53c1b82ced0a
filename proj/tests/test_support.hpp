#ifndef SKYWAY_TESTS_SUPPORT_HPP
#define SKYWAY_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "skyway/city.hpp"
#include "skyway/geometry.hpp"
#include "skyway/losnet.hpp"
#include "skyway/planner.hpp"
#include "skyway/simulator.hpp"

namespace skyway::test {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }

 private:
  std::mt19937_64 engine_;
};

inline Polygon2 square(double x0, double y0, double x1, double y1) {
  return Polygon2{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

/// Star-shaped (generally non-convex) simple polygon around a centre.
inline Polygon2 random_star(Rng& rng, Point2 c, double rmin, double rmax, int nmin = 3, int nmax = 9) {
  const int n = rng.integer(nmin, nmax);
  std::vector<double> angles;
  for (int i = 0; i < n; ++i) angles.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
  std::sort(angles.begin(), angles.end());
  Polygon2 p;
  for (double a : angles) {
    const double r = rng.uniform(rmin, rmax);
    p.vertices.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return p;
}

/// Convex polygon: random points on a circle, in angular order.
inline Polygon2 random_convex(Rng& rng, Point2 c, double r, int nmin = 3, int nmax = 8) {
  const int n = rng.integer(nmin, nmax);
  std::vector<double> angles;
  for (int i = 0; i < n; ++i) angles.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
  std::sort(angles.begin(), angles.end());
  Polygon2 p;
  for (double a : angles) p.vertices.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  return p;
}

inline bool well_formed(const Polygon2& p) { return polygon_defects(p).empty() && std::abs(signed_area(p)) > 1.0; }

inline Polygon2 scaled_about(const Polygon2& p, Point2 c, double k) {
  Polygon2 out;
  for (const auto& v : p.vertices) out.vertices.push_back(c + k * (v - c));
  return out;
}

inline Polygon2 rotated_order(const Polygon2& p, std::size_t k) {
  Polygon2 out = p;
  std::rotate(out.vertices.begin(), out.vertices.begin() + static_cast<long>(k % p.size()), out.vertices.end());
  return out;
}

inline Building building(std::string id, Polygon2 footprint, double height, bool station = false,
                         bool recharge = false) {
  return Building{std::move(id), std::move(footprint), height, station, recharge};
}

inline SkywayNode node_at(std::string id, double x, double y, double z, bool recharge = false) {
  return SkywayNode{std::move(id), {x, y, z}, recharge};
}

/// Random scene: up to `max_buildings` box-or-star towers in a square area,
/// the first `stations` of them carrying stations, and a couple of zones.
inline CityModel random_scene(Rng& rng, int max_buildings, int max_stations, double extent = 120.0) {
  for (;;) {
    CityModel city;
    const int count = rng.integer(std::max(2, max_stations / 2), max_buildings);
    const int stations = std::min(count, rng.integer(2, max_stations));
    for (int i = 0; i < count; ++i) {
      const Point2 c{rng.uniform(0.0, extent), rng.uniform(0.0, extent)};
      Polygon2 fp;
      if (rng.chance(0.5)) {
        const double w = rng.uniform(3.0, 14.0);
        const double h = rng.uniform(3.0, 14.0);
        fp = square(c.x - w / 2, c.y - h / 2, c.x + w / 2, c.y + h / 2);
      } else {
        fp = random_star(rng, c, 2.0, 9.0, 4, 8);
      }
      if (!well_formed(fp)) fp = square(c.x - 3, c.y - 3, c.x + 3, c.y + 3);
      city.buildings.push_back(building("b" + std::to_string(i), fp, rng.uniform(10.0, 90.0), i < stations,
                                        i < stations && rng.chance(0.4)));
    }
    const int zones = rng.integer(0, 2);
    for (int z = 0; z < zones; ++z) {
      const Point2 c{rng.uniform(0.0, extent), rng.uniform(0.0, extent)};
      auto poly = random_convex(rng, c, rng.uniform(4.0, 15.0), 3, 6);
      if (well_formed(poly)) city.no_fly_zones.push_back({"z" + std::to_string(z), poly});
    }
    CityModel copy = city;
    if (normalize_and_validate(copy).empty()) return copy;
  }
}

// Independent intersection predicate for cross-checking: distance between
// closed segments, winding-number containment, nothing shared with the library.
inline double point_segment_gap(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

inline double segment_gap(Point2 a, Point2 b, Point2 c, Point2 d) {
  auto cross = [](Point2 o, Point2 p, Point2 q) { return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x); };
  const double d1 = cross(a, b, c), d2 = cross(a, b, d), d3 = cross(c, d, a), d4 = cross(c, d, b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return 0.0;
  return std::min({point_segment_gap(a, c, d), point_segment_gap(b, c, d), point_segment_gap(c, a, b),
                   point_segment_gap(d, a, b)});
}

inline int winding(Point2 p, const Polygon2& poly) {
  int w = 0;
  const auto n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly.vertices[i], b = poly.vertices[(i + 1) % n];
    const double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++w;
    } else if (b.y <= p.y && side < 0) {
      --w;
    }
  }
  return w;
}

inline bool brute_intersects(const Polygon2& p, const Polygon2& q, double eps = 1e-9) {
  const auto n = p.vertices.size(), m = q.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (segment_gap(p.vertices[i], p.vertices[(i + 1) % n], q.vertices[j], q.vertices[(j + 1) % m]) <= eps) {
        return true;
      }
    }
  }
  return winding(p.vertices[0], q) != 0 || winding(q.vertices[0], p) != 0;
}

/// Rectangle of half-width w/2 around the xy segment a-b, built independently.
inline Polygon2 corridor_rect(Point2 a, Point2 b, double w) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  const Point2 off{-(b.y - a.y) / len * w / 2, (b.x - a.x) / len * w / 2};
  return Polygon2{{a - off, b - off, b + off, a + off}};
}

inline std::vector<std::string> brute_candidates(const SkywayNode& a, const SkywayNode& b, const CityModel& city,
                                                 const NetworkParams& params) {
  const Polygon2 rect = corridor_rect(a.position.xy(), b.position.xy(), params.corridor_width);
  std::vector<std::string> out;
  for (const auto& bld : city.buildings) {
    if (bld.id != a.id && bld.id != b.id && brute_intersects(bld.footprint, rect)) out.push_back(bld.id);
  }
  return out;
}

/// True when a sampling oracle with the given step cannot be expected to agree
/// with the exact test: the verdict flips inside a margin of one step in width
/// and one step of altitude change in clearance.
inline bool near_grazing(const SkywayNode& a, const SkywayNode& b, const CityModel& city,
                         const NetworkParams& params, double step) {
  const double run = distance(a.position.xy(), b.position.xy());
  const double slope = std::abs(b.position.z - a.position.z) / run;
  const double dz = step * (1.0 + slope);
  NetworkParams narrow{params.corridor_width - 2 * step, params.clearance - dz};
  NetworkParams wide{params.corridor_width + 2 * step, params.clearance + dz};
  return los_clear(a, b, city, narrow).clear != los_clear(a, b, city, wide).clear;
}

/// Random planner instance: up to `max_nodes` nodes scattered over `extent`,
/// each pair joined with probability `density`, some nodes recharge-capable.
inline SkywayNetwork random_network(Rng& rng, int max_nodes, double density = 0.35, double extent = 200.0) {
  SkywayNetwork net;
  const int n = rng.integer(2, max_nodes);
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) {
    const std::string id = "n" + std::to_string(i);
    ids.push_back(id);
    net.nodes.emplace(id, node_at(id, rng.uniform(0, extent), rng.uniform(0, extent), rng.uniform(15, 80),
                                  rng.chance(0.4)));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!rng.chance(density)) continue;
      const auto& a = net.nodes.at(ids[i]);
      const auto& b = net.nodes.at(ids[j]);
      if (distance(a.position.xy(), b.position.xy()) < 1.0) continue;
      net.edges.push_back({std::min(ids[i], ids[j]), std::max(ids[i], ids[j]), distance(a.position, b.position)});
    }
  }
  std::sort(net.edges.begin(), net.edges.end(),
            [](const auto& l, const auto& r) { return std::tie(l.from, l.to) < std::tie(r.from, r.to); });
  return net;
}

/// Drone whose battery binds on random_network distances.
inline DroneSpec tight_drone(Rng& rng) {
  DroneSpec d;
  d.cruise_speed = rng.uniform(3.0, 10.0);
  d.yaw_rate = rng.uniform(0.5, 3.0);
  d.cruise_power = rng.uniform(40.0, 120.0);
  d.hover_power = rng.uniform(10.0, d.cruise_power);
  d.capacity = rng.uniform(0.5, 4.0);
  d.recharge_rate = rng.uniform(0.005, 0.2);
  d.reserve_fraction = rng.chance(0.3) ? 0.0 : rng.uniform(0.0, 0.3);
  return d;
}

/// Like tight_drone, but the reserve covers a half-turn of hover drain on
/// every leg, so planned routes always complete in simulation.
inline DroneSpec sim_drone(Rng& rng) {
  DroneSpec d = tight_drone(rng);
  d.yaw_rate = rng.uniform(1.5, 3.0);
  d.hover_power = rng.uniform(10.0, 20.0);
  d.capacity = rng.uniform(1.0, 4.0);
  d.reserve_fraction = rng.uniform(0.25, 0.35);
  return d;
}

/// Node ids reached by the drone, read from positions in a telemetry log:
/// a node counts as reached when a cruise ends exactly on it.
inline std::vector<std::string> arrivals(const std::vector<TelemetryFrame>& frames, const SkywayNetwork& net,
                                         const std::string& source) {
  std::vector<std::string> seq{source};
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const auto& prev = frames[i - 1].phase;
    const auto& cur = frames[i].phase;
    if (prev.kind != PhaseKind::Cruising) continue;
    if (cur.kind == PhaseKind::Cruising && cur.target == prev.target) continue;
    std::string hit = "?";
    for (const auto& [id, n] : net.nodes) {
      if (n.position == frames[i].position) hit = id;
    }
    seq.push_back(hit);
  }
  return seq;
}

/// Replays battery from kinematics alone: hover drain for turning, cruise
/// drain for distance, recharge when the drone stands still. Returns the
/// largest deviation from the reported battery.
inline double battery_replay_error(const std::vector<TelemetryFrame>& frames, const DroneSpec& d) {
  if (frames.empty()) return 0.0;
  double b = frames.front().battery;
  double worst = 0.0;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const auto& p = frames[i - 1];
    const auto& c = frames[i];
    const double turn = std::abs(std::remainder(c.heading - p.heading, 2 * std::numbers::pi));
    const double moved = distance(p.position, c.position);
    if (turn > 0 || moved > 0) {
      b -= d.hover_power * (std::isinf(d.yaw_rate) ? 0.0 : turn / d.yaw_rate) / 3600.0;
      b -= d.cruise_power * (moved / d.cruise_speed) / 3600.0;
    } else {
      b += std::min(d.recharge_rate * (c.clock - p.clock), d.capacity - b);
    }
    worst = std::max(worst, std::abs(b - c.battery));
  }
  return worst;
}

}  // namespace skyway::test

#endif  // SKYWAY_TESTS_SUPPORT_HPP
