#ifndef SKYWAY_PLANNER_HPP
#define SKYWAY_PLANNER_HPP

#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "skyway/losnet.hpp"

namespace skyway {

/// Kinematic and energy parameters. Defaults suit a small quadcopter.
struct DroneSpec {
  double cruise_speed = 5.0;                   // m/s
  double yaw_rate = std::numbers::pi / 2.0;    // rad/s, may be +inf
  double capacity = 16.0;                      // Wh, may be +inf
  double cruise_power = 72.0;                  // W
  double hover_power = 36.0;                   // W
  double recharge_rate = 0.5;                  // Wh/s
  double reserve_fraction = 0.1;

  double reserve() const;

  /// Empty when valid.
  std::vector<std::string> defects() const;
};

struct PlannerOptions {
  /// Battery levels are multiples of capacity / battery_quanta.
  int battery_quanta = 100;
};

struct FlyLeg {
  std::string from;
  std::string to;
  double duration = 0.0;  // s
  double energy = 0.0;    // Wh
  friend bool operator==(const FlyLeg&, const FlyLeg&) = default;
};

struct RechargeLeg {
  std::string at;
  double duration = 0.0;        // s
  double energy_gained = 0.0;   // Wh
  friend bool operator==(const RechargeLeg&, const RechargeLeg&) = default;
};

using RouteLeg = std::variant<FlyLeg, RechargeLeg>;

struct Route {
  std::string source;
  std::vector<RouteLeg> legs;
  double total_time = 0.0;               // s
  double initial_battery = 0.0;          // Wh, as requested
  std::vector<double> battery_trace;     // Wh after each leg

  /// Source followed by the node reached (or recharged at) by each leg.
  std::vector<std::string> node_sequence() const;
  /// Fly destinations only, starting with the source.
  std::vector<std::string> visited_nodes() const;

  friend bool operator==(const Route&, const Route&) = default;
};

class PlanError : public std::runtime_error {
 public:
  enum class Kind { Unreachable, InvalidEndpoint, BatteryBelowReserve, InvalidDrone };

  PlanError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct EdgeCost {
  double duration = 0.0;  // s
  double energy = 0.0;    // Wh
};

EdgeCost edge_cost(const SkywayEdge& edge, const DroneSpec& drone);

/// Straight-line flight time to the destination; admissible and consistent.
double heuristic(const SkywayNode& node, const SkywayNode& dest, const DroneSpec& drone);

/// Minimum-time route with recharge stops, by A* over (node, battery) states.
Route plan(const SkywayNetwork& network, const DroneSpec& drone, const std::string& src,
           const std::string& dst, double initial_battery, const PlannerOptions& options = {});

/// Uniform-cost search over the same state graph as plan. Verification only.
Route plan_oracle(const SkywayNetwork& network, const DroneSpec& drone, const std::string& src,
                  const std::string& dst, double initial_battery, const PlannerOptions& options = {});

std::string save_route(const Route& route);
Route load_route(std::string_view document);
Route load_route_file(const std::string& path);

}  // namespace skyway

#endif  // SKYWAY_PLANNER_HPP
