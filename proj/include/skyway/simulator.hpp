#ifndef SKYWAY_SIMULATOR_HPP
#define SKYWAY_SIMULATOR_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "skyway/planner.hpp"

namespace skyway {

enum class PhaseKind { Idle, Rotating, Cruising, Recharging, Delivered };

std::string_view to_string(PhaseKind k);

struct MissionPhase {
  PhaseKind kind = PhaseKind::Idle;
  std::string target;  // next node while Rotating or Cruising

  friend bool operator==(const MissionPhase&, const MissionPhase&) = default;
};

/// Allowed phase changes (Idle -> Recharging covers routes that start by
/// topping up at the source).
bool legal_transition(PhaseKind from, PhaseKind to);

class SimulationError : public std::runtime_error {
 public:
  enum class Kind { InvalidRoute, InvalidTick, TickBudget };
  SimulationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SimOptions {
  /// Report positions relative to the source node.
  bool local_frame = false;
};

struct MissionState {
  Route route;
  DroneSpec drone;
  std::vector<Point3> waypoints;  // position of each Route::node_sequence() entry
  std::size_t leg_index = 0;
  MissionPhase phase;
  Point3 position;
  double heading = 0.0;  // rad, counter-clockwise from +x, in (-pi, pi]
  double battery = 0.0;  // Wh
  double clock = 0.0;    // s
  double recharge_elapsed = 0.0;
  Point3 origin;  // source position, subtracted in local-frame telemetry
  SimOptions options;
  bool exhausted = false;  // battery ran dry; no further ticks
};

struct TelemetryFrame {
  double clock = 0.0;
  Point3 position;
  double heading = 0.0;
  double battery = 0.0;
  double battery_fraction = 0.0;
  MissionPhase phase;
  std::size_t current_leg = 0;

  friend bool operator==(const TelemetryFrame&, const TelemetryFrame&) = default;
};

struct ReserveWarning {
  double clock = 0.0;
  double battery = 0.0;
};

enum class MissionOutcome { Delivered, BatteryExhausted };

struct MissionLog {
  std::vector<TelemetryFrame> frames;
  MissionState final_state;
  MissionOutcome outcome = MissionOutcome::Delivered;
  std::vector<ReserveWarning> reserve_warnings;
};

MissionState new_mission(const Route& route, const DroneSpec& drone, const SkywayNetwork& network,
                         SimOptions options = {});

TelemetryFrame snapshot(const MissionState& state);

/// Advances one tick of at most dt seconds. Each tick performs a single
/// activity (rotate, cruise or recharge) after any zero-time transitions,
/// and ends early when that activity completes, so frame clocks need not be
/// multiples of dt.
TelemetryFrame tick(MissionState& state, double dt);

/// The log starts with the clock-0 snapshot for non-empty routes.
MissionLog run_to_completion(MissionState state, double dt, std::size_t max_ticks);

std::string frame_to_json(const TelemetryFrame& frame);
TelemetryFrame frame_from_json(std::string_view line);

std::string save_mission_log(const MissionLog& log);

}  // namespace skyway

#endif  // SKYWAY_SIMULATOR_HPP
