#include <algorithm>
#include <random>

#include "doctest.h"
#include "skyway/citygen.hpp"
#include "skyway/losnet.hpp"
#include "test_support.hpp"

using namespace skyway;

namespace {

// Two 50 m towers 100 m apart with a third tower of height h between them.
CityModel three_towers(double middle_height) {
  CityModel city;
  city.buildings.push_back(test::building("A", test::square(-5, -5, 5, 5), 50, true));
  city.buildings.push_back(test::building("B", test::square(95, -5, 105, 5), 50, true));
  city.buildings.push_back(test::building("M", test::square(45, -5, 55, 5), middle_height));
  REQUIRE(normalize_and_validate(city).empty());
  return city;
}

std::vector<std::string> ids(const std::vector<const Building*>& v) {
  std::vector<std::string> out;
  for (const auto* b : v) out.push_back(b->id);
  return out;
}

}  // namespace

TEST_CASE("los_clear: tower between two stations") {
  const NetworkParams params;
  SUBCASE("taller tower blocks") {
    const CityModel city = three_towers(60);
    const auto nodes = station_nodes(city);
    const auto v = los_clear(nodes[0], nodes[1], city, params);
    CHECK_FALSE(v.clear);
    CHECK(v.blockers == std::vector<std::string>{"M"});
    CHECK(v.nfz_violations.empty());
    CHECK_FALSE(los_oracle(nodes[0], nodes[1], city, params, 0.05));
  }
  SUBCASE("shorter tower does not") {
    const CityModel city = three_towers(40);
    const auto nodes = station_nodes(city);
    const auto v = los_clear(nodes[0], nodes[1], city, params);
    CHECK(v.clear);
    CHECK(v.blockers.empty());
    CHECK(los_oracle(nodes[0], nodes[1], city, params, 0.05));
    CHECK(ids(candidate_obstacles(nodes[0], nodes[1], city, params)) == std::vector<std::string>{"M"});
  }
  SUBCASE("clearance boundary counts as blocked") {
    // Segment at z = 51; roof + clearance reaching 51 touches it.
    CHECK_FALSE(los_clear(station_nodes(three_towers(50.5))[0], station_nodes(three_towers(50.5))[1],
                          three_towers(50.5), params)
                    .clear);
    const CityModel low = three_towers(50.49);
    const auto nodes = station_nodes(low);
    CHECK(los_clear(nodes[0], nodes[1], low, params).clear);
  }
}

TEST_CASE("los_clear: endpoint buildings never block their own corridor") {
  CityModel city;
  city.buildings.push_back(test::building("A", test::square(0, 0, 10, 10), 80, true));
  city.buildings.push_back(test::building("B", test::square(50, 0, 60, 10), 20, true));
  REQUIRE(normalize_and_validate(city).empty());
  const auto nodes = station_nodes(city);
  // The segment descends from 81 m over A's roof, which is not an obstacle.
  CHECK(los_clear(nodes[0], nodes[1], city, {}).clear);
  CHECK(candidate_obstacles(nodes[0], nodes[1], city, {}).empty());
}

TEST_CASE("los_clear: corridor width catches a tower beside the axis") {
  CityModel city;
  city.buildings.push_back(test::building("A", test::square(-5, -5, 5, 5), 50, true));
  city.buildings.push_back(test::building("B", test::square(95, -5, 105, 5), 50, true));
  city.buildings.push_back(test::building("S", test::square(45, 0.55, 55, 10), 90));
  REQUIRE(normalize_and_validate(city).empty());
  const auto nodes = station_nodes(city);
  CHECK_FALSE(los_clear(nodes[0], nodes[1], city, {1.2, 0.5}).clear);
  CHECK(los_clear(nodes[0], nodes[1], city, {1.0, 0.5}).clear);
}

TEST_CASE("los_clear: no-fly zone crossing excludes the pair") {
  CityModel city = three_towers(10);
  city.no_fly_zones.push_back({"Z", test::square(60, -30, 70, -0.6)});
  REQUIRE(normalize_and_validate(city).empty());
  const auto nodes = station_nodes(city);
  const auto v = los_clear(nodes[0], nodes[1], city, {});
  CHECK_FALSE(v.clear);
  CHECK(v.nfz_violations == std::vector<std::string>{"Z"});
  CHECK_FALSE(los_oracle(nodes[0], nodes[1], city, {}, 0.05));
  CHECK(los_clear(nodes[0], nodes[1], city, {1.0, 0.5}).clear);
}

TEST_CASE("los_clear rejects degenerate pairs") {
  const CityModel city = three_towers(10);
  const auto nodes = station_nodes(city);
  CHECK_THROWS_AS(los_clear(nodes[0], nodes[0], city, {}), GeometryError);
  SkywayNode stacked = nodes[0];
  stacked.id = "other";
  stacked.position.z += 10;
  CHECK_THROWS_AS(los_clear(nodes[0], stacked, city, {}), GeometryError);
  CHECK_THROWS_AS(los_oracle(nodes[0], nodes[0], city, {}, 0.05), GeometryError);
  CHECK_THROWS_AS(los_oracle(nodes[0], nodes[1], city, {}, 0.0), std::invalid_argument);
}

TEST_CASE("candidate_obstacles equals a brute-force filter") {
  test::Rng rng(17);
  int pairs = 0;
  for (int s = 0; s < 60; ++s) {
    const CityModel city = test::random_scene(rng, 20, 8);
    const auto nodes = station_nodes(city);
    const NetworkParams params{rng.uniform(0.3, 6.0), 0.5};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        CHECK(ids(candidate_obstacles(nodes[i], nodes[j], city, params)) ==
              test::brute_candidates(nodes[i], nodes[j], city, params));
        ++pairs;
      }
    }
  }
  CHECK(pairs > 300);
}

TEST_CASE("los_clear agrees with the sampling oracle away from grazing contact") {
  test::Rng rng(5);
  const double step = 0.05;
  int agreed = 0;
  int skipped = 0;
  for (int s = 0; s < 25; ++s) {
    const CityModel city = test::random_scene(rng, 14, 6, 80);
    const auto nodes = station_nodes(city);
    const NetworkParams params;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        if (test::near_grazing(nodes[i], nodes[j], city, params, step)) {
          ++skipped;
          continue;
        }
        const bool exact = los_clear(nodes[i], nodes[j], city, params).clear;
        CHECK(exact == los_oracle(nodes[i], nodes[j], city, params, step));
        ++agreed;
      }
    }
  }
  CHECK(agreed > 100);
  CHECK(skipped * 20 < agreed);
}

TEST_CASE("los_clear is symmetric and monotone") {
  test::Rng rng(8);
  for (int s = 0; s < 40; ++s) {
    const CityModel city = test::random_scene(rng, 16, 6);
    const auto nodes = station_nodes(city);
    const NetworkParams base;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        const auto ab = los_clear(nodes[i], nodes[j], city, base);
        const auto ba = los_clear(nodes[j], nodes[i], city, base);
        CHECK(ab.clear == ba.clear);
        CHECK(ab.blockers == ba.blockers);
        if (ab.clear) continue;
        // Blocked stays blocked under wider corridors and larger clearance.
        CHECK_FALSE(los_clear(nodes[i], nodes[j], city, {base.corridor_width * 2, base.clearance}).clear);
        CHECK_FALSE(los_clear(nodes[i], nodes[j], city, {base.corridor_width, base.clearance + 3}).clear);
      }
    }
  }
}

TEST_CASE("adding a building never creates an edge") {
  test::Rng rng(21);
  for (int s = 0; s < 30; ++s) {
    const CityModel city = test::random_scene(rng, 12, 6);
    const SkywayNetwork before = build_network(city, {});
    CityModel denser = city;
    const Point2 c{rng.uniform(0, 120), rng.uniform(0, 120)};
    denser.buildings.push_back(test::building("extra", test::square(c.x - 4, c.y - 4, c.x + 4, c.y + 4), 95));
    if (!normalize_and_validate(denser).empty()) continue;
    const SkywayNetwork after = build_network(denser, {});
    for (const auto& e : after.edges) CHECK(before.find_edge(e.from, e.to) != nullptr);
  }
}

TEST_CASE("build_network: two stations give one edge or none") {
  const auto clear_net = build_network(three_towers(40), {});
  REQUIRE(clear_net.nodes.size() == 2);
  REQUIRE(clear_net.edges.size() == 1);
  CHECK(clear_net.edges[0].from == "A");
  CHECK(clear_net.edges[0].to == "B");
  CHECK(clear_net.edges[0].length3d == doctest::Approx(100.0));
  CHECK(build_network(three_towers(60), {}).edges.empty());
}

TEST_CASE("build_network is invariant to building order and thread count") {
  test::Rng rng(13);
  std::mt19937 shuffle(4);
  for (int s = 0; s < 20; ++s) {
    const CityModel city = test::random_scene(rng, 20, 10);
    const SkywayNetwork reference = build_network(city, {}, 1);
    CityModel shuffled = city;
    std::shuffle(shuffled.buildings.begin(), shuffled.buildings.end(), shuffle);
    CHECK(build_network(shuffled, {}, 4) == reference);
    CHECK(save_network(build_network(city, {}, 3)) == save_network(reference));
  }
}

TEST_CASE("fixture network: edges are clear and avoid every zone") {
  const CityModel city = generate_city(42);
  const NetworkParams params;
  const SkywayNetwork net = build_network(city, params);
  CHECK(net.zones.size() == 7);
  CHECK(net.nodes.size() == city.station_count());
  CHECK_FALSE(net.edges.empty());
  for (const auto& e : net.edges) {
    CHECK(e.from < e.to);
    const auto& a = net.node(e.from);
    const auto& b = net.node(e.to);
    CHECK(e.length3d == doctest::Approx(distance(a.position, b.position)));
    const Polygon2 rect = test::corridor_rect(a.position.xy(), b.position.xy(), params.corridor_width);
    for (const auto& z : city.no_fly_zones) CHECK_FALSE(test::brute_intersects(rect, z.region));
  }
}

TEST_CASE("network document round-trips and is validated") {
  const SkywayNetwork net = build_network(generate_city(42), {});
  const std::string doc = save_network(net);
  CHECK(load_network(doc) == net);
  CHECK(save_network(load_network(doc)) == doc);

  CHECK_THROWS_AS(load_network("{"), ParseError);
  CHECK_THROWS_AS(load_network(R"({"nodes": []})"), ParseError);
  CHECK_THROWS_AS(load_network(R"({"nodes":[{"id":"a","position":[0,0,5]}],
    "edges":[{"from":"a","to":"b","length3d":3}]})"),
                  ValidationError);
  CHECK_THROWS_AS(load_network(R"({"nodes":[{"id":"a","position":[0,0,5]},{"id":"b","position":[1,0,5]}],
    "edges":[{"from":"a","to":"b","length3d":1},{"from":"b","to":"a","length3d":1}]})"),
                  ValidationError);
  const auto swapped = load_network(R"({"nodes":[{"id":"a","position":[0,0,5]},{"id":"b","position":[1,0,5]}],
    "edges":[{"from":"b","to":"a","length3d":1}]})");
  CHECK(swapped.edges[0].from == "a");
  CHECK(swapped.find_edge("b", "a") != nullptr);
  CHECK(swapped.adjacency().at("a").size() == 1);
}
