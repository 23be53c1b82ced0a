#include "skyway/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <queue>

#include "json_util.hpp"

namespace skyway {

double DroneSpec::reserve() const {
  return std::isfinite(capacity) ? reserve_fraction * capacity : 0.0;
}

std::vector<std::string> DroneSpec::defects() const {
  std::vector<std::string> out;
  auto positive = [&](double v, const char* name, bool allow_inf) {
    if (!(v > 0.0) || std::isnan(v) || (!allow_inf && std::isinf(v))) {
      out.push_back(std::string(name) + " must be positive");
    }
  };
  positive(cruise_speed, "cruise_speed", false);
  positive(yaw_rate, "yaw_rate", true);
  positive(capacity, "capacity", true);
  positive(cruise_power, "cruise_power", false);
  positive(hover_power, "hover_power", false);
  positive(recharge_rate, "recharge_rate", false);
  if (!(reserve_fraction >= 0.0 && reserve_fraction < 1.0)) out.emplace_back("reserve_fraction must be in [0, 1)");
  if (hover_power > cruise_power) out.emplace_back("hover_power must not exceed cruise_power");
  return out;
}

std::vector<std::string> Route::node_sequence() const {
  std::vector<std::string> seq{source};
  for (const auto& leg : legs) {
    if (const auto* f = std::get_if<FlyLeg>(&leg)) {
      seq.push_back(f->to);
    } else {
      seq.push_back(std::get<RechargeLeg>(leg).at);
    }
  }
  return seq;
}

std::vector<std::string> Route::visited_nodes() const {
  std::vector<std::string> seq{source};
  for (const auto& leg : legs) {
    if (const auto* f = std::get_if<FlyLeg>(&leg)) seq.push_back(f->to);
  }
  return seq;
}

EdgeCost edge_cost(const SkywayEdge& edge, const DroneSpec& drone) {
  const double duration = edge.length3d / drone.cruise_speed;
  return {duration, drone.cruise_power * duration / 3600.0};
}

double heuristic(const SkywayNode& node, const SkywayNode& dest, const DroneSpec& drone) {
  return distance(node.position, dest.position) / drone.cruise_speed;
}

namespace {

// Quantized (node, battery) state graph shared by the A* search and the
// uniform-cost oracle.
class StateGraph {
 public:
  struct Move {
    int node = 0;
    int level = 0;
    double duration = 0.0;
    double energy = 0.0;  // consumed by a flight, gained by a recharge
    bool recharge = false;
  };

  StateGraph(const SkywayNetwork& net, const DroneSpec& drone, const PlannerOptions& opt)
      : net_(net), drone_(drone) {
    for (const auto& [id, n] : net.nodes) {
      index_.emplace(id, static_cast<int>(ids_.size()));
      ids_.push_back(id);
      recharge_.push_back(n.is_recharge);
    }
    adj_.resize(ids_.size());
    for (const auto& e : net.edges) {
      const int a = index_.at(e.from);
      const int b = index_.at(e.to);
      const EdgeCost c = edge_cost(e, drone);
      adj_[a].push_back({b, c});
      adj_[b].push_back({a, c});
    }
    for (auto& list : adj_) {
      std::sort(list.begin(), list.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    }
    finite_ = std::isfinite(drone.capacity);
    levels_ = finite_ ? opt.battery_quanta : 0;
    quantum_ = finite_ ? drone.capacity / levels_ : 0.0;
  }

  int node_count() const { return static_cast<int>(ids_.size()); }
  int levels() const { return levels_; }
  int index(const std::string& id) const { return index_.at(id); }
  const std::string& id(int i) const { return ids_[i]; }
  const SkywayNode& node(int i) const { return net_.node(ids_[i]); }

  double battery(int level) const { return finite_ ? level * quantum_ : std::numeric_limits<double>::infinity(); }

  int level_below(double wh) const {
    if (!finite_) return 0;
    const double raw = std::floor(wh / quantum_ + 1e-9);
    return static_cast<int>(std::clamp(raw, 0.0, static_cast<double>(levels_)));
  }

  int state(int node, int level) const { return node * (levels_ + 1) + level; }
  int state_count() const { return node_count() * (levels_ + 1); }

  std::vector<Move> moves(int node, int level) const {
    std::vector<Move> out;
    const double reserve = drone_.reserve();
    const double tol = 1e-9 * (finite_ ? drone_.capacity : 1.0);
    for (const auto& [to, cost] : adj_[node]) {
      if (!finite_) {
        out.push_back({to, 0, cost.duration, cost.energy, false});
        continue;
      }
      const double left = battery(level) - cost.energy;
      if (left < reserve - tol) continue;
      const int arrive = level_below(left);
      if (battery(arrive) < reserve - tol) continue;
      out.push_back({to, arrive, cost.duration, cost.energy, false});
    }
    if (finite_ && recharge_[node] && level < levels_) {
      const double gained = drone_.capacity - battery(level);
      out.push_back({node, levels_, gained / drone_.recharge_rate, gained, true});
    }
    return out;
  }

 private:
  const SkywayNetwork& net_;
  const DroneSpec& drone_;
  std::map<std::string, int> index_;
  std::vector<std::string> ids_;
  std::vector<bool> recharge_;
  std::vector<std::vector<std::pair<int, EdgeCost>>> adj_;
  bool finite_ = true;
  int levels_ = 0;
  double quantum_ = 0.0;
};

struct Label {
  int node = 0;
  int level = 0;
  double time = 0.0;
  int parent = -1;
  StateGraph::Move via;
  std::vector<int> seq;  // node per leg, for tie-breaking
};

// Minimum time, then fewer legs, then lexicographically smaller node sequence.
bool better(const Label& l, const Label& r) {
  if (l.time != r.time) return l.time < r.time;
  if (l.seq.size() != r.seq.size()) return l.seq.size() < r.seq.size();
  return l.seq < r.seq;
}

void check_request(const SkywayNetwork& net, const DroneSpec& drone, const std::string& src,
                   const std::string& dst, double initial_battery, const PlannerOptions& opt) {
  if (auto d = drone.defects(); !d.empty()) throw PlanError(PlanError::Kind::InvalidDrone, "invalid drone: " + d.front());
  if (opt.battery_quanta < 1) throw PlanError(PlanError::Kind::InvalidDrone, "battery_quanta must be at least 1");
  if (!net.has_node(src)) throw PlanError(PlanError::Kind::InvalidEndpoint, "unknown source '" + src + "'");
  if (!net.has_node(dst)) throw PlanError(PlanError::Kind::InvalidEndpoint, "unknown destination '" + dst + "'");
  if (std::isnan(initial_battery) || initial_battery < drone.reserve() - 1e-9) {
    throw PlanError(PlanError::Kind::BatteryBelowReserve, "initial battery below reserve");
  }
  if (initial_battery > drone.capacity * (1 + 1e-12)) {
    throw PlanError(PlanError::Kind::BatteryBelowReserve, "initial battery exceeds capacity");
  }
}

Route assemble(const StateGraph& g, const std::vector<Label>& labels, int goal, const std::string& src,
               double initial_battery) {
  std::vector<int> chain;
  for (int i = goal; labels[i].parent >= 0; i = labels[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());

  Route r;
  r.source = src;
  r.initial_battery = initial_battery;
  r.total_time = labels[goal].time;
  for (int i : chain) {
    const Label& l = labels[i];
    const Label& p = labels[l.parent];
    if (l.via.recharge) {
      r.legs.emplace_back(RechargeLeg{g.id(l.node), l.via.duration, l.via.energy});
    } else {
      r.legs.emplace_back(FlyLeg{g.id(p.node), g.id(l.node), l.via.duration, l.via.energy});
    }
    r.battery_trace.push_back(std::isfinite(g.battery(l.level)) ? g.battery(l.level) : initial_battery);
  }
  return r;
}

// Best-first label setting; `h` is zero for the oracle.
template <typename Heuristic>
Route search(const SkywayNetwork& net, const DroneSpec& drone, const std::string& src,
             const std::string& dst, double initial_battery, const PlannerOptions& opt, Heuristic h) {
  check_request(net, drone, src, dst, initial_battery, opt);
  if (src == dst) {
    Route r;
    r.source = src;
    r.initial_battery = initial_battery;
    return r;
  }

  const StateGraph g(net, drone, opt);
  const int goal_node = g.index(dst);
  std::vector<double> hv(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) hv[i] = h(g.node(i), net.node(dst));

  std::vector<Label> labels;
  std::vector<int> best(g.state_count(), -1);
  auto key_less = [&](int a, int b) {
    // Priority-queue "less": true when a should come out after b.
    const double fa = labels[a].time + hv[labels[a].node];
    const double fb = labels[b].time + hv[labels[b].node];
    if (fa != fb) return fa > fb;
    const Label& la = labels[a];
    const Label& lb = labels[b];
    if (la.seq.size() != lb.seq.size()) return la.seq.size() > lb.seq.size();
    return lb.seq < la.seq;
  };
  std::priority_queue<int, std::vector<int>, decltype(key_less)> open(key_less);

  Label start;
  start.node = g.index(src);
  start.level = g.level_below(initial_battery);
  labels.push_back(start);
  best[g.state(start.node, start.level)] = 0;
  open.push(0);

  while (!open.empty()) {
    const int cur = open.top();
    open.pop();
    const int node = labels[cur].node;
    const int level = labels[cur].level;
    if (best[g.state(node, level)] != cur) continue;
    if (node == goal_node) return assemble(g, labels, cur, src, initial_battery);

    for (const auto& m : g.moves(node, level)) {
      Label next;
      next.node = m.node;
      next.level = m.level;
      next.time = labels[cur].time + m.duration;
      next.parent = cur;
      next.via = m;
      next.seq = labels[cur].seq;
      next.seq.push_back(m.node);
      int& slot = best[g.state(m.node, m.level)];
      if (slot >= 0 && !better(next, labels[slot])) continue;
      labels.push_back(std::move(next));
      slot = static_cast<int>(labels.size()) - 1;
      open.push(slot);
    }
  }
  throw PlanError(PlanError::Kind::Unreachable, "no feasible route from '" + src + "' to '" + dst + "'");
}

}  // namespace

Route plan(const SkywayNetwork& network, const DroneSpec& drone, const std::string& src,
           const std::string& dst, double initial_battery, const PlannerOptions& options) {
  // Shaved so rounding in f = g + h never overtakes the true optimum.
  return search(network, drone, src, dst, initial_battery, options,
                [&](const SkywayNode& n, const SkywayNode& d) { return heuristic(n, d, drone) * (1.0 - 1e-9); });
}

Route plan_oracle(const SkywayNetwork& network, const DroneSpec& drone, const std::string& src,
                  const std::string& dst, double initial_battery, const PlannerOptions& options) {
  return search(network, drone, src, dst, initial_battery, options,
                [](const SkywayNode&, const SkywayNode&) { return 0.0; });
}

std::string save_route(const Route& route) {
  using detail::json;
  json legs = json::array();
  for (const auto& leg : route.legs) {
    if (const auto* f = std::get_if<FlyLeg>(&leg)) {
      legs.push_back({{"kind", "fly"}, {"from", f->from}, {"to", f->to}, {"duration_s", f->duration},
                      {"energy_wh", f->energy}});
    } else {
      const auto& r = std::get<RechargeLeg>(leg);
      legs.push_back({{"kind", "recharge"}, {"at", r.at}, {"duration_s", r.duration}, {"energy_wh", r.energy_gained}});
    }
  }
  json doc;
  doc["source"] = route.source;
  doc["initial_battery_wh"] = detail::quantity(route.initial_battery);
  doc["legs"] = std::move(legs);
  doc["total_time_s"] = route.total_time;
  json trace = json::array();
  for (double b : route.battery_trace) trace.push_back(detail::quantity(b));
  doc["battery_trace_wh"] = std::move(trace);
  return doc.dump(2) + "\n";
}

Route load_route(std::string_view document) {
  using detail::json;
  Route r;
  try {
    const json doc = json::parse(document.begin(), document.end());
    if (!doc.is_object()) throw ParseError("route document must be a JSON object");
    r.initial_battery = detail::number(doc.at("initial_battery_wh"));
    r.total_time = detail::number(doc.at("total_time_s"));
    for (const auto& jl : doc.at("legs")) {
      const auto kind = jl.at("kind").get<std::string>();
      const double duration = detail::number(jl.at("duration_s"));
      const double energy = detail::number(jl.at("energy_wh"));
      if (kind == "fly") {
        r.legs.emplace_back(FlyLeg{jl.at("from").get<std::string>(), jl.at("to").get<std::string>(), duration, energy});
      } else if (kind == "recharge") {
        r.legs.emplace_back(RechargeLeg{jl.at("at").get<std::string>(), duration, energy});
      } else {
        throw ParseError("unknown leg kind '" + kind + "'");
      }
    }
    for (const auto& b : doc.at("battery_trace_wh")) r.battery_trace.push_back(detail::number(b));
    if (doc.contains("source")) {
      r.source = doc.at("source").get<std::string>();
    } else if (!r.legs.empty()) {
      const auto& first = r.legs.front();
      r.source = std::holds_alternative<FlyLeg>(first) ? std::get<FlyLeg>(first).from : std::get<RechargeLeg>(first).at;
    } else {
      throw ParseError("empty route needs a source");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed route document: ") + e.what());
  }
  if (r.battery_trace.size() != r.legs.size()) throw ParseError("battery trace length differs from leg count");
  return r;
}

Route load_route_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open route document '" + path + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_route(text);
}

}  // namespace skyway
