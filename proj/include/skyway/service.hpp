#ifndef SKYWAY_SERVICE_HPP
#define SKYWAY_SERVICE_HPP

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "skyway/simulator.hpp"

namespace httplib {
class Server;
}

namespace skyway {

struct DeliveryRequest {
  std::string src;
  std::string dst;
  double initial_battery_fraction = 1.0;
};

enum class DeliveryStatus { Planned, Flying, Delivered, Failed };

std::string_view to_string(DeliveryStatus s);

struct DeliveryRecord {
  std::string id;
  DeliveryRequest request;
  Route route;
  DeliveryStatus status = DeliveryStatus::Planned;
  std::string failure_reason;
  std::string created_at;  // ISO-8601 UTC
};

std::string record_to_json(const DeliveryRecord& r);

/// Rejected request; no record is created.
class RequestError : public std::runtime_error {
 public:
  RequestError(std::string code, const std::string& detail)
      : std::runtime_error(detail), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Ordered, append-only frame feed for one mission. Frames are retained for
/// the mission lifetime so an attached reader never misses one.
class TelemetryChannel {
 public:
  void publish(const TelemetryFrame& frame);
  void close(DeliveryStatus status, std::string reason = {});

  struct Batch {
    std::vector<std::string> frames;  // serialized frames
    std::size_t next = 0;
    bool closed = false;
    DeliveryStatus status = DeliveryStatus::Planned;
    std::string reason;
  };

  /// Frames from `from` on; blocks up to `timeout` when none are pending.
  Batch read(std::size_t from, std::chrono::milliseconds timeout) const;

  /// Index a late subscriber starts at: the latest frame.
  std::size_t latest_index() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<std::string> frames_;
  bool closed_ = false;
  DeliveryStatus status_ = DeliveryStatus::Planned;
  std::string reason_;
};

struct ServiceConfig {
  double speedup = 10.0;  // simulated seconds per wall second; <= 0 runs unpaced
  int tick_ms = 100;
  DroneSpec drone;
  PlannerOptions planner;
  std::string static_dir;  // dashboard assets served under "/", optional
};

class DeliveryService {
 public:
  DeliveryService(SkywayNetwork network, ServiceConfig config);
  ~DeliveryService();

  DeliveryService(const DeliveryService&) = delete;
  DeliveryService& operator=(const DeliveryService&) = delete;

  DeliveryRecord submit_delivery(const DeliveryRequest& req);
  std::optional<DeliveryRecord> get_delivery(const std::string& id) const;
  const std::string& network_document() const { return network_doc_; }
  std::shared_ptr<const TelemetryChannel> telemetry(const std::string& id) const;

  /// Binds to an ephemeral port and serves in a background thread.
  int start_background(const std::string& host = "127.0.0.1");
  /// Blocks serving on the given port.
  bool listen(const std::string& host, int port);
  void stop();

 private:
  struct Mission {
    DeliveryRecord record;
    std::shared_ptr<TelemetryChannel> channel = std::make_shared<TelemetryChannel>();
    std::jthread worker;
  };

  void run_mission(std::stop_token stop, const std::string& id, MissionState state,
                   std::shared_ptr<TelemetryChannel> channel);
  void set_status(const std::string& id, DeliveryStatus status, std::string reason = {});
  void install_routes();
  std::string new_id();

  SkywayNetwork network_;
  ServiceConfig config_;
  std::string network_doc_;

  mutable std::mutex registry_mu_;
  std::map<std::string, std::unique_ptr<Mission>> missions_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_ = 0;

  std::unique_ptr<httplib::Server> server_;
  std::jthread server_thread_;
};

}  // namespace skyway

#endif  // SKYWAY_SERVICE_HPP
