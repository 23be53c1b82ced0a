#include "skyway/losnet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <thread>
#include <tuple>

#include "json_util.hpp"

namespace skyway {

namespace {

void check_pair(const SkywayNode& a, const SkywayNode& b) {
  if (a.id == b.id || distance(a.position.xy(), b.position.xy()) <= kEps) {
    throw GeometryError("degenerate node pair '" + a.id + "' / '" + b.id + "'");
  }
}

}  // namespace

const SkywayNode& SkywayNetwork::node(const std::string& id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw std::out_of_range("unknown node '" + id + "'");
  return it->second;
}

const SkywayEdge* SkywayNetwork::find_edge(const std::string& a, const std::string& b) const {
  const auto& lo = std::min(a, b);
  const auto& hi = std::max(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{lo, hi},
                             [](const SkywayEdge& e, const std::pair<std::string, std::string>& k) {
                               return std::tie(e.from, e.to) < std::tie(k.first, k.second);
                             });
  if (it != edges.end() && it->from == lo && it->to == hi) return &*it;
  return nullptr;
}

std::map<std::string, std::vector<std::size_t>> SkywayNetwork::adjacency() const {
  std::map<std::string, std::vector<std::size_t>> adj;
  for (const auto& [id, _] : nodes) adj[id];
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].from].push_back(i);
    adj[edges[i].to].push_back(i);
  }
  return adj;
}

std::vector<const Building*> candidate_obstacles(const SkywayNode& a, const SkywayNode& b,
                                                 const CityModel& city,
                                                 const NetworkParams& params) {
  check_pair(a, b);
  const Corridor c = corridor(a.position.xy(), b.position.xy(), params.corridor_width);
  std::vector<const Building*> out;
  for (const auto& bld : city.buildings) {
    if (bld.id == a.id || bld.id == b.id) continue;
    if (polygons_intersect(bld.footprint, c.quad)) out.push_back(&bld);
  }
  return out;
}

LosVerdict los_clear(const SkywayNode& a, const SkywayNode& b, const CityModel& city,
                     const NetworkParams& params) {
  LosVerdict v;
  for (const Building* c : candidate_obstacles(a, b, city, params)) {
    const auto lowest = min_los_height_over(c->footprint, a.position, b.position, params.corridor_width);
    if (lowest && c->height + params.clearance + kEps > *lowest) v.blockers.push_back(c->id);
  }
  const Corridor c = corridor(a.position.xy(), b.position.xy(), params.corridor_width);
  for (const auto& z : city.no_fly_zones) {
    if (polygons_intersect(c.quad, z.region)) v.nfz_violations.push_back(z.id);
  }
  v.clear = v.blockers.empty() && v.nfz_violations.empty();
  return v;
}

bool los_oracle(const SkywayNode& a, const SkywayNode& b, const CityModel& city,
                const NetworkParams& params, double step) {
  check_pair(a, b);
  if (!(step > 0.0)) throw std::invalid_argument("oracle step must be positive");
  const Point2 axis = b.position.xy() - a.position.xy();
  const double horiz = norm(axis);
  const Point2 half = (0.5 * params.corridor_width / horiz) * Point2{-axis.y, axis.x};
  const auto samples = static_cast<std::size_t>(std::ceil(distance(a.position, b.position) / step));

  // Bounding boxes only skip exact tests that cannot succeed.
  struct Box {
    double x0, y0, x1, y1;
  };
  auto box_of = [](const Polygon2& p) {
    Box bx{p[0].x, p[0].y, p[0].x, p[0].y};
    for (const auto& v : p.vertices) {
      bx = {std::min(bx.x0, v.x), std::min(bx.y0, v.y), std::max(bx.x1, v.x), std::max(bx.y1, v.y)};
    }
    return bx;
  };
  auto misses = [](const Box& bx, Point2 l, Point2 r) {
    const double pad = 2 * kEps;
    return std::max(l.x, r.x) < bx.x0 - pad || std::min(l.x, r.x) > bx.x1 + pad ||
           std::max(l.y, r.y) < bx.y0 - pad || std::min(l.y, r.y) > bx.y1 + pad;
  };
  std::vector<Box> building_boxes;
  for (const auto& bld : city.buildings) building_boxes.push_back(box_of(bld.footprint));
  std::vector<Box> zone_boxes;
  for (const auto& zone : city.no_fly_zones) zone_boxes.push_back(box_of(zone.region));

  for (std::size_t k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(samples);
    const Point2 s = a.position.xy() + t * axis;
    const double z = a.position.z + t * (b.position.z - a.position.z);
    const Point2 left = s + half;
    const Point2 right = s - half;
    for (std::size_t i = 0; i < city.buildings.size(); ++i) {
      const auto& bld = city.buildings[i];
      if (bld.id == a.id || bld.id == b.id || z > bld.height + params.clearance) continue;
      if (!misses(building_boxes[i], left, right) && segment_meets_polygon(left, right, bld.footprint)) {
        return false;
      }
    }
    for (std::size_t i = 0; i < city.no_fly_zones.size(); ++i) {
      if (!misses(zone_boxes[i], left, right) &&
          segment_meets_polygon(left, right, city.no_fly_zones[i].region)) {
        return false;
      }
    }
  }
  return true;
}

SkywayNetwork build_network(const CityModel& city, const NetworkParams& params, unsigned threads) {
  SkywayNetwork net;
  net.params = params;
  net.zones = city.no_fly_zones;

  std::vector<SkywayNode> nodes = station_nodes(city);
  std::sort(nodes.begin(), nodes.end(), [](const auto& l, const auto& r) { return l.id < r.id; });
  for (const auto& n : nodes) net.nodes.emplace(n.id, n);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) pairs.emplace_back(i, j);
  }

  std::vector<std::optional<SkywayEdge>> result(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < pairs.size(); k = next++) {
      const auto& a = nodes[pairs[k].first];
      const auto& b = nodes[pairs[k].second];
      const double len = distance(a.position, b.position);
      if (distance(a.position.xy(), b.position.xy()) <= kEps) continue;
      if (los_clear(a, b, city, params).clear) result[k] = SkywayEdge{a.id, b.id, len};
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, pairs.size() / 64)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  // Pairs are generated in (from, to) id order, so the edge list is canonical.
  for (auto& e : result) {
    if (e) net.edges.push_back(std::move(*e));
  }
  return net;
}

std::string save_network(const SkywayNetwork& net) {
  using detail::json;
  json nodes = json::array();
  for (const auto& [id, n] : net.nodes) {
    nodes.push_back({{"id", id}, {"position", detail::to_json(n.position)}, {"is_recharge", n.is_recharge}});
  }
  json edges = json::array();
  for (const auto& e : net.edges) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"length3d", e.length3d}});
  }
  json zones = json::array();
  for (const auto& z : net.zones) {
    zones.push_back({{"id", z.id}, {"region", detail::to_json(z.region)}});
  }
  json doc;
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["params"] = {{"corridor_width", net.params.corridor_width}, {"clearance", net.params.clearance}};
  doc["zones"] = std::move(zones);
  return doc.dump(2) + "\n";
}

SkywayNetwork load_network(std::string_view document) {
  using detail::json;
  SkywayNetwork net;
  std::vector<std::string> errors;
  try {
    const json doc = json::parse(document.begin(), document.end());
    if (!doc.is_object()) throw ParseError("network document must be a JSON object");
    for (const auto& jn : doc.at("nodes")) {
      SkywayNode n{jn.at("id").get<std::string>(), detail::point3_from(jn.at("position")),
                   jn.value("is_recharge", false)};
      if (!(n.position.z > 0.0)) errors.push_back("node '" + n.id + "': altitude must be positive");
      if (!net.nodes.emplace(n.id, n).second) errors.push_back("node '" + n.id + "': duplicate id");
    }
    for (const auto& je : doc.at("edges")) {
      SkywayEdge e{je.at("from").get<std::string>(), je.at("to").get<std::string>(),
                   detail::number(je.at("length3d"))};
      if (e.to < e.from) std::swap(e.from, e.to);
      net.edges.push_back(std::move(e));
    }
    if (doc.contains("params")) {
      const auto& p = doc.at("params");
      net.params.corridor_width = detail::number(p.at("corridor_width"));
      net.params.clearance = detail::number(p.at("clearance"));
    }
    if (doc.contains("zones")) {
      for (const auto& jz : doc.at("zones")) {
        net.zones.push_back({jz.at("id").get<std::string>(), detail::polygon_from(jz.at("region"))});
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed network document: ") + e.what());
  }

  std::sort(net.edges.begin(), net.edges.end(),
            [](const auto& l, const auto& r) { return std::tie(l.from, l.to) < std::tie(r.from, r.to); });
  for (std::size_t i = 0; i < net.edges.size(); ++i) {
    const auto& e = net.edges[i];
    const std::string who = "edge '" + e.from + "'-'" + e.to + "': ";
    if (e.from == e.to) errors.push_back(who + "self edge");
    if (!net.has_node(e.from) || !net.has_node(e.to)) errors.push_back(who + "unknown endpoint");
    if (!(e.length3d > 0.0) || !std::isfinite(e.length3d)) errors.push_back(who + "length must be positive");
    if (i > 0 && net.edges[i - 1].from == e.from && net.edges[i - 1].to == e.to) {
      errors.push_back(who + "duplicate edge");
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return net;
}

SkywayNetwork load_network_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open network document '" + path + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_network(text);
}

}  // namespace skyway
