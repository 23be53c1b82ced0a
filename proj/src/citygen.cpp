#include "skyway/citygen.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace skyway {

namespace {

// std distributions differ between standard libraries; the engine does not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform(0.0, static_cast<double>(n))) % n; }

 private:
  std::mt19937_64 engine_;
};

double centi(double v) { return std::round(v * 100.0) / 100.0; }
double half_metre(double v) { return std::round(v * 2.0) / 2.0; }

Polygon2 place(const std::vector<Point2>& local, Point2 centre, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Polygon2 poly;
  for (const auto& p : local) {
    poly.vertices.push_back({centi(centre.x + c * p.x - s * p.y), centi(centre.y + s * p.x + c * p.y)});
  }
  return poly;
}

std::vector<Point2> footprint_shape(Rng& rng) {
  const double w = rng.uniform(22.0, 40.0);
  const double h = rng.uniform(22.0, 40.0);
  const double hw = w / 2;
  const double hh = h / 2;
  switch (rng.below(3)) {
    case 0:  // rectangle
      return {{-hw, -hh}, {hw, -hh}, {hw, hh}, {-hw, hh}};
    case 1: {  // L-shape, one corner notched out
      const double nx = rng.uniform(0.3, 0.45) * w;
      const double ny = rng.uniform(0.3, 0.45) * h;
      return {{-hw, -hh}, {hw, -hh}, {hw, hh - ny}, {hw - nx, hh - ny}, {hw - nx, hh}, {-hw, hh}};
    }
    default: {  // chamfered block
      const double k = rng.uniform(0.2, 0.35) * std::min(w, h);
      return {{-hw + k, -hh}, {hw, -hh}, {hw, hh - k}, {hw - k, hh}, {-hw, hh}, {-hw, -hh + k}};
    }
  }
}

std::string label(char prefix, std::size_t i) {
  std::ostringstream os;
  os << prefix << std::setw(2) << std::setfill('0') << i;
  return os.str();
}

}  // namespace

CityModel generate_city(std::uint64_t seed, const CityGenOptions& opt) {
  Rng rng(seed);
  CityModel city;
  city.node_offset = 1.0;

  const auto cells = static_cast<std::size_t>(opt.grid * opt.grid);
  for (std::size_t i = 0; i < cells; ++i) {
    const double row = static_cast<double>(i / opt.grid);
    const double col = static_cast<double>(i % opt.grid);
    const Point2 centre{(col + 0.5) * opt.block_pitch + rng.uniform(-4.0, 4.0),
                        (row + 0.5) * opt.block_pitch + rng.uniform(-4.0, 4.0)};
    const auto shape = footprint_shape(rng);
    const double angle = rng.uniform(-0.25, 0.25);
    Building b;
    b.id = label('B', i);
    b.footprint = place(shape, centre, angle);
    b.height = half_metre(rng.uniform(20.0, 150.0));
    b.has_station = true;
    b.is_recharge = rng.uniform(0.0, 1.0) < 1.0 / 3.0;
    city.buildings.push_back(std::move(b));
  }

  // Zones sit over distinct blocks; a zone hexagon stays well inside its block.
  std::vector<std::size_t> order(cells);
  for (std::size_t i = 0; i < cells; ++i) order[i] = i;
  for (std::size_t i = cells - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  for (int z = 0; z < opt.zone_count && z < static_cast<int>(cells); ++z) {
    const std::size_t cell = order[static_cast<std::size_t>(z)];
    const double row = static_cast<double>(cell / opt.grid);
    const double col = static_cast<double>(cell % opt.grid);
    const Point2 centre{(col + 0.5) * opt.block_pitch, (row + 0.5) * opt.block_pitch};
    const double radius = rng.uniform(0.3, 0.42) * opt.block_pitch;
    const double spin = rng.uniform(0.0, std::numbers::pi / 3);
    std::vector<Point2> hex;
    for (int k = 0; k < 6; ++k) {
      const double a = k * std::numbers::pi / 3;
      hex.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    city.no_fly_zones.push_back({label('Z', static_cast<std::size_t>(z)), place(hex, centre, spin)});
  }

  for (auto& b : city.buildings) {
    const Point2 p = station_point(b.footprint).xy;
    for (const auto& z : city.no_fly_zones) {
      if (inside_or_on(p, z.region)) b.has_station = b.is_recharge = false;
    }
  }

  if (auto errors = normalize_and_validate(city); !errors.empty()) throw ValidationError(std::move(errors));
  return city;
}

}  // namespace skyway
