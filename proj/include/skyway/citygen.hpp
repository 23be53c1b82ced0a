#ifndef SKYWAY_CITYGEN_HPP
#define SKYWAY_CITYGEN_HPP

#include <cstdint>

#include "skyway/city.hpp"

namespace skyway {

struct CityGenOptions {
  int grid = 6;              // blocks per side
  double block_pitch = 60.0; // m
  int zone_count = 7;
};

/// Synthetic downtown: a grid of irregular towers, a third of the stations
/// able to recharge, and `zone_count` no-fly zones. Output depends only on
/// the seed and options (no platform-specific distributions).
CityModel generate_city(std::uint64_t seed, const CityGenOptions& options = {});

}  // namespace skyway

#endif  // SKYWAY_CITYGEN_HPP
