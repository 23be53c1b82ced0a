#ifndef SKYWAY_LOSNET_HPP
#define SKYWAY_LOSNET_HPP

#include <map>
#include <string>
#include <vector>

#include "skyway/city.hpp"

namespace skyway {

struct NetworkParams {
  double corridor_width = 1.2;  // drone width 0.2 m plus 0.5 m either side
  double clearance = 0.5;       // vertical margin above obstacles

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

struct LosVerdict {
  bool clear = true;
  std::vector<std::string> blockers;
  std::vector<std::string> nfz_violations;
};

struct SkywayEdge {
  std::string from;
  std::string to;
  double length3d = 0.0;

  friend bool operator==(const SkywayEdge&, const SkywayEdge&) = default;
};

struct SkywayNetwork {
  std::map<std::string, SkywayNode> nodes;
  std::vector<SkywayEdge> edges;  // from < to, sorted by (from, to)
  NetworkParams params;
  std::vector<NoFlyZone> zones;   // carried for display

  const SkywayNode& node(const std::string& id) const;
  bool has_node(const std::string& id) const { return nodes.count(id) != 0; }
  const SkywayEdge* find_edge(const std::string& a, const std::string& b) const;

  /// Neighbour lists with edge indices, built on demand.
  std::map<std::string, std::vector<std::size_t>> adjacency() const;

  friend bool operator==(const SkywayNetwork&, const SkywayNetwork&) = default;
};

/// Buildings other than the endpoints' own whose footprint meets the corridor
/// between the two nodes.
std::vector<const Building*> candidate_obstacles(const SkywayNode& a, const SkywayNode& b,
                                                 const CityModel& city,
                                                 const NetworkParams& params);

LosVerdict los_clear(const SkywayNode& a, const SkywayNode& b, const CityModel& city,
                     const NetworkParams& params);

/// Sampling cross-check for los_clear: walks the 3D segment in `step`
/// increments and tests the corridor cross-section at each sample against
/// every building and zone.
bool los_oracle(const SkywayNode& a, const SkywayNode& b, const CityModel& city,
                const NetworkParams& params, double step);

/// All-pairs LoS over every station. `threads` = 0 picks the hardware count.
SkywayNetwork build_network(const CityModel& city, const NetworkParams& params,
                            unsigned threads = 0);

std::string save_network(const SkywayNetwork& net);
SkywayNetwork load_network(std::string_view document);
SkywayNetwork load_network_file(const std::string& path);

}  // namespace skyway

#endif  // SKYWAY_LOSNET_HPP
