#include "skyway/service.hpp"

#include <cmath>
#include <ctime>
#include <iomanip>
#include <random>
#include <sstream>

#include "httplib.h"
#include "json_util.hpp"

namespace skyway {

using detail::json;

std::string_view to_string(DeliveryStatus s) {
  switch (s) {
    case DeliveryStatus::Planned: return "planned";
    case DeliveryStatus::Flying: return "flying";
    case DeliveryStatus::Delivered: return "delivered";
    case DeliveryStatus::Failed: return "failed";
  }
  return "planned";
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json status_json(DeliveryStatus status, const std::string& reason) {
  json j{{"status", to_string(status)}};
  if (!reason.empty()) j["reason"] = reason;
  return j;
}

void send_error(httplib::Response& res, int code, const std::string& error, const std::string& detail) {
  res.status = code;
  res.set_content(json{{"error", error}, {"detail", detail}}.dump(), "application/json");
}

}  // namespace

std::string record_to_json(const DeliveryRecord& r) {
  json j;
  j["id"] = r.id;
  j["request"] = {{"src", r.request.src},
                  {"dst", r.request.dst},
                  {"initial_battery_fraction", r.request.initial_battery_fraction}};
  j["route"] = json::parse(save_route(r.route));
  j["status"] = to_string(r.status);
  if (!r.failure_reason.empty()) j["reason"] = r.failure_reason;
  j["created_at"] = r.created_at;
  return j.dump();
}

// --- TelemetryChannel -------------------------------------------------------

void TelemetryChannel::publish(const TelemetryFrame& frame) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    frames_.push_back(frame_to_json(frame));
  }
  cv_.notify_all();
}

void TelemetryChannel::close(DeliveryStatus status, std::string reason) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    closed_ = true;
    status_ = status;
    reason_ = std::move(reason);
  }
  cv_.notify_all();
}

TelemetryChannel::Batch TelemetryChannel::read(std::size_t from, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || frames_.size() > from; });
  Batch b;
  for (std::size_t i = from; i < frames_.size(); ++i) b.frames.push_back(frames_[i]);
  b.next = std::max(from, frames_.size());
  b.closed = closed_;
  b.status = status_;
  b.reason = reason_;
  return b;
}

std::size_t TelemetryChannel::latest_index() const {
  std::lock_guard lock(mu_);
  return frames_.empty() ? 0 : frames_.size() - 1;
}

std::size_t TelemetryChannel::size() const {
  std::lock_guard lock(mu_);
  return frames_.size();
}

// --- DeliveryService --------------------------------------------------------

DeliveryService::DeliveryService(SkywayNetwork network, ServiceConfig config)
    : network_(std::move(network)), config_(std::move(config)), network_doc_(save_network(network_)) {
  if (config_.tick_ms <= 0) throw std::invalid_argument("tick_ms must be positive");
  if (auto d = config_.drone.defects(); !d.empty()) throw std::invalid_argument("invalid drone: " + d.front());
  salt_ = std::random_device{}();
  server_ = std::make_unique<httplib::Server>();
  install_routes();
}

DeliveryService::~DeliveryService() { stop(); }

std::string DeliveryService::new_id() {
  std::mt19937_64 mix(salt_ ^ (++counter_ * 0x9E3779B97F4A7C15ULL));
  std::ostringstream os;
  os << "d" << std::hex << std::setw(16) << std::setfill('0') << mix();
  return os.str();
}

DeliveryRecord DeliveryService::submit_delivery(const DeliveryRequest& req) {
  if (req.src.empty() || req.dst.empty()) throw RequestError("validation_error", "src and dst are required");
  if (req.src == req.dst) throw RequestError("validation_error", "src and dst must differ");
  if (!network_.has_node(req.src)) throw RequestError("validation_error", "unknown node '" + req.src + "'");
  if (!network_.has_node(req.dst)) throw RequestError("validation_error", "unknown node '" + req.dst + "'");
  if (!(req.initial_battery_fraction > 0.0 && req.initial_battery_fraction <= 1.0)) {
    throw RequestError("validation_error", "initial_battery_fraction must be in (0, 1]");
  }

  DeliveryRecord rec;
  rec.request = req;
  rec.created_at = utc_now();
  std::optional<MissionState> state;
  const double battery = config_.drone.capacity * req.initial_battery_fraction;
  try {
    rec.route = plan(network_, config_.drone, req.src, req.dst, battery, config_.planner);
    state = new_mission(rec.route, config_.drone, network_);
  } catch (const PlanError& e) {
    if (e.kind() != PlanError::Kind::Unreachable) throw RequestError("validation_error", e.what());
    rec.route.source = req.src;
    rec.route.initial_battery = battery;
    rec.status = DeliveryStatus::Failed;
    rec.failure_reason = "unreachable";
  }

  std::lock_guard lock(registry_mu_);
  rec.id = new_id();
  auto mission = std::make_unique<Mission>();
  mission->record = rec;
  if (state) {
    mission->channel->publish(snapshot(*state));
    mission->worker = std::jthread([this, id = rec.id, st = std::move(*state), ch = mission->channel](
                                       std::stop_token stop) mutable { run_mission(stop, id, std::move(st), ch); });
  } else {
    mission->channel->close(DeliveryStatus::Failed, rec.failure_reason);
  }
  missions_.emplace(rec.id, std::move(mission));
  return rec;
}

void DeliveryService::set_status(const std::string& id, DeliveryStatus status, std::string reason) {
  std::lock_guard lock(registry_mu_);
  auto it = missions_.find(id);
  if (it == missions_.end()) return;
  auto& rec = it->second->record;
  // Planned -> Flying -> terminal only.
  if (static_cast<int>(status) <= static_cast<int>(rec.status)) return;
  rec.status = status;
  rec.failure_reason = std::move(reason);
}

void DeliveryService::run_mission(std::stop_token stop, const std::string& id, MissionState state,
                                  std::shared_ptr<TelemetryChannel> channel) {
  set_status(id, DeliveryStatus::Flying);
  const double dt = config_.tick_ms / 1000.0;
  const bool paced = config_.speedup > 0.0 && std::isfinite(config_.speedup);
  const auto pause = std::chrono::duration<double>(paced ? dt / config_.speedup : 0.0);
  std::mutex m;
  std::condition_variable_any cv;

  while (state.phase.kind != PhaseKind::Delivered && !state.exhausted) {
    if (paced) {
      std::unique_lock lock(m);
      if (cv.wait_for(lock, stop, pause, [] { return false; })) break;
    }
    if (stop.stop_requested()) break;
    channel->publish(tick(state, dt));
  }

  if (state.phase.kind == PhaseKind::Delivered) {
    set_status(id, DeliveryStatus::Delivered);
    channel->close(DeliveryStatus::Delivered);
  } else if (state.exhausted) {
    set_status(id, DeliveryStatus::Failed, "battery_exhausted");
    channel->close(DeliveryStatus::Failed, "battery_exhausted");
  } else {
    set_status(id, DeliveryStatus::Failed, "service_stopped");
    channel->close(DeliveryStatus::Failed, "service_stopped");
  }
}

std::optional<DeliveryRecord> DeliveryService::get_delivery(const std::string& id) const {
  std::lock_guard lock(registry_mu_);
  auto it = missions_.find(id);
  if (it == missions_.end()) return std::nullopt;
  return it->second->record;
}

std::shared_ptr<const TelemetryChannel> DeliveryService::telemetry(const std::string& id) const {
  std::lock_guard lock(registry_mu_);
  auto it = missions_.find(id);
  if (it == missions_.end()) return nullptr;
  return it->second->channel;
}

void DeliveryService::install_routes() {
  auto& svr = *server_;

  svr.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });

  svr.Get("/api/network", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(network_doc_, "application/json");
  });

  svr.Post("/api/deliveries", [this](const httplib::Request& req, httplib::Response& res) {
    DeliveryRequest dr;
    try {
      const json body = json::parse(req.body);
      if (!body.is_object()) return send_error(res, 400, "invalid_request", "body must be a JSON object");
      dr.src = body.at("src").get<std::string>();
      dr.dst = body.at("dst").get<std::string>();
      if (body.contains("initial_battery_fraction")) {
        dr.initial_battery_fraction = detail::number(body.at("initial_battery_fraction"));
      }
    } catch (const json::exception& e) {
      return send_error(res, 400, "invalid_request", e.what());
    }
    try {
      const DeliveryRecord rec = submit_delivery(dr);
      res.status = 201;
      res.set_content(record_to_json(rec), "application/json");
    } catch (const RequestError& e) {
      send_error(res, 422, e.code(), e.what());
    }
  });

  svr.Get(R"(/api/deliveries/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto rec = get_delivery(req.matches[1]);
    if (!rec) return send_error(res, 404, "not_found", "unknown delivery '" + std::string(req.matches[1]) + "'");
    res.set_content(record_to_json(*rec), "application/json");
  });

  svr.Get(R"(/api/deliveries/([^/]+)/telemetry)", [this](const httplib::Request& req, httplib::Response& res) {
    auto channel = telemetry(req.matches[1]);
    if (!channel) return send_error(res, 404, "not_found", "unknown delivery '" + std::string(req.matches[1]) + "'");

    std::size_t start = channel->latest_index();
    if (req.has_param("from")) {
      try {
        start = std::stoul(req.get_param_value("from"));
      } catch (const std::exception&) {
        return send_error(res, 400, "invalid_request", "from must be a frame index");
      }
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [channel, next = start](std::size_t, httplib::DataSink& sink) mutable {
          const auto batch = channel->read(next, std::chrono::milliseconds(250));
          std::string out;
          for (const auto& f : batch.frames) {
            out += "event: frame\ndata: ";
            out += f;
            out += "\n\n";
          }
          next = batch.next;
          if (!out.empty() && !sink.write(out.data(), out.size())) return false;
          if (batch.closed && batch.frames.empty()) {
            const std::string end = "event: status\ndata: " + status_json(batch.status, batch.reason).dump() + "\n\n";
            sink.write(end.data(), end.size());
            sink.done();
          }
          return sink.is_writable();
        });
  });

  if (!config_.static_dir.empty()) svr.set_mount_point("/", config_.static_dir);
}

int DeliveryService::start_background(const std::string& host) {
  const int port = server_->bind_to_any_port(host);
  if (port < 0) throw std::runtime_error("cannot bind service socket");
  server_thread_ = std::jthread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

bool DeliveryService::listen(const std::string& host, int port) { return server_->listen(host, port); }

void DeliveryService::stop() {
  // Missions first: open event streams end once their channel closes.
  std::vector<std::jthread> workers;
  {
    std::lock_guard lock(registry_mu_);
    for (auto& [_, m] : missions_) {
      if (!m->worker.joinable()) continue;
      m->worker.request_stop();
      workers.push_back(std::move(m->worker));
    }
  }
  workers.clear();
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
}

}  // namespace skyway
