#include "skyway/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json_util.hpp"

namespace skyway {

std::string_view to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::Idle: return "idle";
    case PhaseKind::Rotating: return "rotating";
    case PhaseKind::Cruising: return "cruising";
    case PhaseKind::Recharging: return "recharging";
    case PhaseKind::Delivered: return "delivered";
  }
  return "idle";
}

namespace {

PhaseKind phase_from_string(const std::string& s) {
  for (auto k : {PhaseKind::Idle, PhaseKind::Rotating, PhaseKind::Cruising, PhaseKind::Recharging,
                 PhaseKind::Delivered}) {
    if (to_string(k) == s) return k;
  }
  throw ParseError("unknown mission phase '" + s + "'");
}

double bearing(const Point3& from, const Point3& to) { return std::atan2(to.y - from.y, to.x - from.x); }

double wrap(double angle) {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

void transition(MissionState& s, PhaseKind to, std::string target = {}) {
  if (!legal_transition(s.phase.kind, to)) {
    throw std::logic_error(std::string("illegal phase change ") + std::string(to_string(s.phase.kind)) + " -> " +
                           std::string(to_string(to)));
  }
  s.phase = {to, std::move(target)};
}

// Enter whatever the current leg asks for; Delivered past the last leg.
void begin_leg(MissionState& s) {
  if (s.leg_index >= s.route.legs.size()) {
    transition(s, PhaseKind::Delivered);
    return;
  }
  const auto& leg = s.route.legs[s.leg_index];
  if (const auto* f = std::get_if<FlyLeg>(&leg)) {
    transition(s, PhaseKind::Rotating, f->to);
  } else {
    s.recharge_elapsed = 0.0;
    transition(s, PhaseKind::Recharging);
  }
}

const Point3& leg_target(const MissionState& s) { return s.waypoints[s.leg_index + 1]; }

double recharge_remaining(const MissionState& s) {
  const auto& leg = std::get<RechargeLeg>(s.route.legs[s.leg_index]);
  const double to_full = (s.drone.capacity - s.battery) / s.drone.recharge_rate;
  return std::max({0.0, leg.duration - s.recharge_elapsed, to_full});
}

// Activities that would finish within this much of the tick end finish in
// it, so accumulated rounding never leaves a sliver tick behind.
constexpr double kTimeSlack = 1e-9;

double step_time(double need, double dt) { return need <= dt + kTimeSlack ? need : dt; }

// Seconds of flight left at the given draw before the battery is empty.
double endurance(const MissionState& s, double power) { return s.battery * 3600.0 / power; }

}  // namespace

bool legal_transition(PhaseKind from, PhaseKind to) {
  switch (from) {
    case PhaseKind::Idle: return to == PhaseKind::Rotating || to == PhaseKind::Recharging;
    case PhaseKind::Rotating: return to == PhaseKind::Cruising;
    case PhaseKind::Cruising:
      return to == PhaseKind::Rotating || to == PhaseKind::Recharging || to == PhaseKind::Delivered;
    case PhaseKind::Recharging: return to == PhaseKind::Rotating;
    case PhaseKind::Delivered: return false;
  }
  return false;
}

MissionState new_mission(const Route& route, const DroneSpec& drone, const SkywayNetwork& network,
                         SimOptions options) {
  using Kind = SimulationError::Kind;
  if (auto d = drone.defects(); !d.empty()) throw SimulationError(Kind::InvalidRoute, "invalid drone: " + d.front());
  if (!network.has_node(route.source)) {
    throw SimulationError(Kind::InvalidRoute, "route source '" + route.source + "' is not a network node");
  }
  if (!(route.initial_battery >= 0.0) || route.initial_battery > drone.capacity) {
    throw SimulationError(Kind::InvalidRoute, "initial battery outside [0, capacity]");
  }

  MissionState s;
  s.route = route;
  s.drone = drone;
  s.options = options;
  s.waypoints.push_back(network.node(route.source).position);
  std::string at = route.source;
  for (std::size_t i = 0; i < route.legs.size(); ++i) {
    const auto& leg = route.legs[i];
    if (const auto* f = std::get_if<FlyLeg>(&leg)) {
      if (f->from != at) throw SimulationError(Kind::InvalidRoute, "fly leg from '" + f->from + "' does not chain");
      if (!network.has_node(f->to) || !network.find_edge(f->from, f->to)) {
        throw SimulationError(Kind::InvalidRoute, "no network edge '" + f->from + "'-'" + f->to + "'");
      }
      at = f->to;
    } else {
      const auto& r = std::get<RechargeLeg>(leg);
      if (r.at != at) throw SimulationError(Kind::InvalidRoute, "recharge at '" + r.at + "' does not chain");
      if (!network.node(r.at).is_recharge) {
        throw SimulationError(Kind::InvalidRoute, "node '" + r.at + "' cannot recharge");
      }
      // A recharge must be followed by a flight.
      if (i + 1 == route.legs.size() || !std::holds_alternative<FlyLeg>(route.legs[i + 1])) {
        throw SimulationError(Kind::InvalidRoute, "recharge at '" + r.at + "' is not followed by a flight");
      }
    }
    s.waypoints.push_back(network.node(at).position);
  }

  s.position = s.waypoints.front();
  s.origin = s.position;
  s.battery = route.initial_battery;
  if (route.legs.empty()) s.phase = {PhaseKind::Delivered, {}};
  return s;
}

TelemetryFrame snapshot(const MissionState& s) {
  TelemetryFrame f;
  f.clock = s.clock;
  f.position = s.position;
  if (s.options.local_frame) {
    f.position = {s.position.x - s.origin.x, s.position.y - s.origin.y, s.position.z - s.origin.z};
  }
  f.heading = s.heading;
  f.battery = s.battery;
  f.battery_fraction = std::isfinite(s.drone.capacity) ? s.battery / s.drone.capacity : 1.0;
  f.phase = s.phase;
  f.current_leg = s.leg_index;
  return f;
}

TelemetryFrame tick(MissionState& s, double dt) {
  using Kind = SimulationError::Kind;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw SimulationError(Kind::InvalidTick, "tick length must be positive");
  if (s.phase.kind == PhaseKind::Delivered) throw SimulationError(Kind::InvalidTick, "mission already delivered");
  if (s.exhausted) throw SimulationError(Kind::InvalidTick, "battery exhausted");

  // Zero-time transitions until an activity needs time.
  for (;;) {
    if (s.phase.kind == PhaseKind::Idle) {
      begin_leg(s);
    } else if (s.phase.kind == PhaseKind::Rotating) {
      const double target = bearing(s.position, leg_target(s));
      if (wrap(target - s.heading) == 0.0 || std::isinf(s.drone.yaw_rate)) {
        s.heading = wrap(target);
        transition(s, PhaseKind::Cruising, s.phase.target);
      } else {
        break;
      }
    } else if (s.phase.kind == PhaseKind::Recharging && recharge_remaining(s) == 0.0) {
      ++s.leg_index;
      begin_leg(s);
    } else {
      break;
    }
  }

  double used = 0.0;
  switch (s.phase.kind) {
    case PhaseKind::Rotating: {
      const double target = bearing(s.position, leg_target(s));
      const double err = wrap(target - s.heading);
      const double need = std::abs(err) / s.drone.yaw_rate;
      used = step_time(need, dt);
      if (used > endurance(s, s.drone.hover_power)) {
        used = endurance(s, s.drone.hover_power);
        s.exhausted = true;
      }
      if (used == need && !s.exhausted) {
        s.heading = wrap(target);
        transition(s, PhaseKind::Cruising, s.phase.target);
      } else {
        s.heading = wrap(s.heading + std::copysign(s.drone.yaw_rate * used, err));
      }
      s.battery = s.exhausted ? 0.0 : std::max(0.0, s.battery - s.drone.hover_power * used / 3600.0);
      break;
    }
    case PhaseKind::Cruising: {
      const Point3& goal = leg_target(s);
      const double remaining = distance(s.position, goal);
      const bool arrives = remaining <= s.drone.cruise_speed * (dt + kTimeSlack);
      used = arrives ? remaining / s.drone.cruise_speed : dt;
      bool arrived = arrives;
      if (used > endurance(s, s.drone.cruise_power)) {
        used = endurance(s, s.drone.cruise_power);
        s.exhausted = true;
        arrived = false;
      }
      if (arrived) {
        s.position = goal;
      } else {
        const double k = s.drone.cruise_speed * used / remaining;
        s.position = {s.position.x + k * (goal.x - s.position.x), s.position.y + k * (goal.y - s.position.y),
                      s.position.z + k * (goal.z - s.position.z)};
      }
      s.battery = s.exhausted ? 0.0 : std::max(0.0, s.battery - s.drone.cruise_power * used / 3600.0);
      if (arrived) {
        ++s.leg_index;
        if (s.leg_index < s.route.legs.size()) {
          if (const auto* f = std::get_if<FlyLeg>(&s.route.legs[s.leg_index])) {
            transition(s, PhaseKind::Rotating, f->to);
          } else {
            s.recharge_elapsed = 0.0;
            transition(s, PhaseKind::Recharging);
          }
        } else {
          transition(s, PhaseKind::Delivered);
        }
      }
      break;
    }
    case PhaseKind::Recharging: {
      const double need = recharge_remaining(s);
      used = step_time(need, dt);
      s.battery = std::min(s.drone.capacity, s.battery + s.drone.recharge_rate * used);
      s.recharge_elapsed += used;
      if (used == need) {
        ++s.leg_index;
        begin_leg(s);
      }
      break;
    }
    default:
      break;
  }
  s.clock += used;
  return snapshot(s);
}

MissionLog run_to_completion(MissionState state, double dt, std::size_t max_ticks) {
  MissionLog log;
  if (state.phase.kind != PhaseKind::Delivered) {
    log.frames.push_back(snapshot(state));
    const double reserve = state.drone.reserve();
    std::size_t ticks = 0;
    while (state.phase.kind != PhaseKind::Delivered && !state.exhausted) {
      if (ticks++ == max_ticks) {
        throw SimulationError(SimulationError::Kind::TickBudget,
                              "mission not delivered after " + std::to_string(max_ticks) + " ticks");
      }
      log.frames.push_back(tick(state, dt));
      if (state.battery < reserve) log.reserve_warnings.push_back({state.clock, state.battery});
    }
  }
  log.outcome = state.exhausted ? MissionOutcome::BatteryExhausted : MissionOutcome::Delivered;
  log.final_state = std::move(state);
  return log;
}

std::string frame_to_json(const TelemetryFrame& f) {
  using detail::json;
  json j;
  j["clock"] = f.clock;
  j["position"] = detail::to_json(f.position);
  j["heading"] = f.heading;
  j["battery"] = detail::quantity(f.battery);
  j["battery_fraction"] = f.battery_fraction;
  j["phase"] = to_string(f.phase.kind);
  if (!f.phase.target.empty()) j["target"] = f.phase.target;
  j["current_leg"] = f.current_leg;
  return j.dump();
}

TelemetryFrame frame_from_json(std::string_view line) {
  using detail::json;
  try {
    const json j = json::parse(line.begin(), line.end());
    TelemetryFrame f;
    f.clock = detail::number(j.at("clock"));
    f.position = detail::point3_from(j.at("position"));
    f.heading = detail::number(j.at("heading"));
    f.battery = detail::number(j.at("battery"));
    f.battery_fraction = detail::number(j.at("battery_fraction"));
    f.phase.kind = phase_from_string(j.at("phase").get<std::string>());
    f.phase.target = j.value("target", std::string{});
    f.current_leg = j.at("current_leg").get<std::size_t>();
    return f;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed telemetry frame: ") + e.what());
  }
}

std::string save_mission_log(const MissionLog& log) {
  std::string out;
  for (const auto& f : log.frames) {
    out += frame_to_json(f);
    out += '\n';
  }
  return out;
}

}  // namespace skyway
