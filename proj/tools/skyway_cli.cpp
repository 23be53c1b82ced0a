// skyway: batch entry points for the delivery pipeline.
//
//   skyway gen-city --seed 42 --out city.json
//   skyway build-network --city city.json --out network.json
//   skyway plan --network network.json --from B00 --to B35 > route.json
//   skyway simulate --network network.json --route route.json --out mission.ndjson
//   skyway serve --city city.json --port 8080
//
// Exit codes: 0 success, 1 usage or validation, 2 unreachable, 3 simulation failure.

#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "skyway/citygen.hpp"
#include "skyway/service.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUnreachable = 2;
constexpr int kSimFailure = 3;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void add_drone_flags(CLI::App& cmd, skyway::DroneSpec& d) {
  cmd.add_option("--cruise-speed", d.cruise_speed, "m/s")->capture_default_str();
  cmd.add_option("--yaw-rate", d.yaw_rate, "rad/s, 'inf' for instant turns")->capture_default_str();
  cmd.add_option("--capacity", d.capacity, "Wh")->capture_default_str();
  cmd.add_option("--cruise-power", d.cruise_power, "W")->capture_default_str();
  cmd.add_option("--hover-power", d.hover_power, "W")->capture_default_str();
  cmd.add_option("--recharge-rate", d.recharge_rate, "Wh/s")->capture_default_str();
  cmd.add_option("--reserve", d.reserve_fraction, "reserve fraction of capacity")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skyway drone delivery: network construction, planning, simulation and dispatch"};
  app.set_version_flag("--version", std::string(SKYWAY_VERSION));
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  std::string out_path = "-";
  std::string city_path;
  std::string network_path;
  std::string route_path;
  skyway::NetworkParams params;
  unsigned threads = 0;
  std::string from;
  std::string to;
  double battery_fraction = 1.0;
  skyway::DroneSpec drone;
  skyway::PlannerOptions planner;
  int tick_ms = 100;
  std::size_t max_ticks = 10'000'000;
  bool local_frame = false;
  int port = 8080;
  std::string host = "0.0.0.0";
  double speedup = 10.0;
  std::string static_dir;

  auto* gen = app.add_subcommand("gen-city", "Write a deterministic fixture city");
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--out", out_path, "output path, '-' for stdout")->capture_default_str();

  auto* build = app.add_subcommand("build-network", "Compute line-of-sight edges for a city");
  build->add_option("--city", city_path)->required();
  build->add_option("--out", out_path)->capture_default_str();
  build->add_option("--width", params.corridor_width, "corridor width, m")->capture_default_str();
  build->add_option("--clearance", params.clearance, "vertical clearance, m")->capture_default_str();
  build->add_option("--threads", threads, "0 = hardware concurrency")->capture_default_str();

  auto* plan = app.add_subcommand("plan", "Print the minimum-time route between two nodes");
  plan->add_option("--network", network_path)->required();
  plan->add_option("--from", from)->required();
  plan->add_option("--to", to)->required();
  plan->add_option("--battery-fraction", battery_fraction)->capture_default_str();
  plan->add_option("--quanta", planner.battery_quanta, "battery levels per full charge")->capture_default_str();
  plan->add_option("--out", out_path)->capture_default_str();
  add_drone_flags(*plan, drone);

  auto* sim = app.add_subcommand("simulate", "Fly a route and write the telemetry log (NDJSON)");
  sim->add_option("--network", network_path)->required();
  sim->add_option("--route", route_path)->required();
  sim->add_option("--tick-ms", tick_ms)->capture_default_str();
  sim->add_option("--max-ticks", max_ticks)->capture_default_str();
  sim->add_option("--out", out_path)->capture_default_str();
  sim->add_flag("--local-frame", local_frame, "report positions relative to the source node");
  add_drone_flags(*sim, drone);

  auto* serve = app.add_subcommand("serve", "Run the dispatch and telemetry service");
  serve->add_option("--city", city_path)->required();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--speedup", speedup)->capture_default_str();
  serve->add_option("--tick-ms", tick_ms)->capture_default_str();
  serve->add_option("--width", params.corridor_width)->capture_default_str();
  serve->add_option("--clearance", params.clearance)->capture_default_str();
  serve->add_option("--static-dir", static_dir, "dashboard assets served under /");
  add_drone_flags(*serve, drone);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (gen->parsed()) {
      write_output(out_path, skyway::save_city(skyway::generate_city(seed)));
    } else if (build->parsed()) {
      const auto city = skyway::load_city_file(city_path);
      write_output(out_path, skyway::save_network(skyway::build_network(city, params, threads)));
    } else if (plan->parsed()) {
      const auto net = skyway::load_network_file(network_path);
      const double initial = drone.capacity * battery_fraction;
      write_output(out_path, skyway::save_route(skyway::plan(net, drone, from, to, initial, planner)));
    } else if (sim->parsed()) {
      if (tick_ms <= 0) throw std::invalid_argument("--tick-ms must be positive");
      const auto net = skyway::load_network_file(network_path);
      const auto route = skyway::load_route_file(route_path);
      auto state = skyway::new_mission(route, drone, net, {local_frame});
      const auto log = skyway::run_to_completion(std::move(state), tick_ms / 1000.0, max_ticks);
      write_output(out_path, skyway::save_mission_log(log));
      for (const auto& w : log.reserve_warnings) {
        std::cerr << "warning: battery " << w.battery << " Wh below reserve at t=" << w.clock << " s\n";
      }
      if (log.outcome != skyway::MissionOutcome::Delivered) {
        std::cerr << "error: battery exhausted at t=" << log.final_state.clock << " s\n";
        return kSimFailure;
      }
    } else if (serve->parsed()) {
      const auto city = skyway::load_city_file(city_path);
      skyway::ServiceConfig cfg;
      cfg.speedup = speedup;
      cfg.tick_ms = tick_ms;
      cfg.drone = drone;
      cfg.static_dir = static_dir;
      skyway::DeliveryService service(skyway::build_network(city, params), cfg);
      std::cerr << "serving on " << host << ":" << port << "\n";
      if (!service.listen(host, port)) {
        std::cerr << "error: cannot listen on port " << port << "\n";
        return kInvalid;
      }
    }
  } catch (const skyway::PlanError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == skyway::PlanError::Kind::Unreachable ? kUnreachable : kInvalid;
  } catch (const skyway::SimulationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == skyway::SimulationError::Kind::TickBudget ? kSimFailure : kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kOk;
}
