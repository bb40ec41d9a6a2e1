#include <algorithm>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qqmr/net_model.hpp"

using namespace qqmr;

namespace {

SimConfig small_config(std::uint32_t n, double area, double range, std::uint64_t seed) {
  SimConfig c;
  c.node_count = n;
  c.area_side = area;
  c.comm_range = range;
  c.rng_seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("net_model") {

TEST_CASE("euclidean distance") {
  CHECK(euclidean_distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
  CHECK(euclidean_distance({7.5, -2}, {7.5, -2}) == 0.0);
  CHECK(euclidean_distance({1.5, 2.5}, {4.5, 6.5}) == doctest::Approx(5.0));
  CHECK(euclidean_distance({1, 9}, {4, 2}) == euclidean_distance({4, 2}, {1, 9}));
}

TEST_CASE("topology of 200 users has a centered sink and initialized nodes") {
  const NetworkGraph g = build_topology(small_config(200, 500, 50, 42));
  REQUIRE(g.size() == 201);
  CHECK(g.sink_id() == 0);
  const NodeState& sink = g.node(0);
  CHECK(sink.is_sink);
  CHECK(sink.position == Position{250, 250});
  for (const NodeState& n : g.nodes()) {
    CHECK(n.position.x >= 0.0);
    CHECK(n.position.x <= 500.0);
    CHECK(n.position.y >= 0.0);
    CHECK(n.position.y <= 500.0);
    CHECK(n.neighbors.empty());
    CHECK(n.memberships == kUniformMemberships);
    for (const auto& t : n.q_tables) CHECK(t.empty());
    if (!n.is_sink) CHECK(n.residual_energy == 100.0);
  }
}

TEST_CASE("range larger than the diagonal connects everything") {
  const NetworkGraph g = build_topology(small_config(2, 10, 20, 0));
  CHECK(g.edges().size() == 3);
  for (NodeId i = 0; i < 3; ++i) {
    for (NodeId j = 0; j < 3; ++j) CHECK(link_exists(g, i, j) == (i != j));
  }
}

TEST_CASE("edge set equals the all-pairs distance oracle") {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const NetworkGraph g = build_topology(small_config(50, 500, 50, seed));
    std::vector<oracle::Point> pts;
    for (const NodeState& n : g.nodes()) pts.push_back({n.position.x, n.position.y});
    CHECK(g.edges() == oracle::all_pairs_edges(pts, 50.0));
  }
}

TEST_CASE("link predicate boundary") {
  SimConfig c = small_config(3, 100, 10, 1);
  const std::vector<Position> users{{10, 0}, {10 + 1e-9, 0}, {0, 0}};
  const NetworkGraph g = graph_from_positions(c, {0, 0}, users);
  CHECK(link_exists(g, 0, 1));   // exactly R
  CHECK_FALSE(link_exists(g, 0, 2));  // R + 1e-9
  CHECK_FALSE(link_exists(g, 1, 1));
  CHECK_THROWS_AS(link_exists(g, 0, 99), std::out_of_range);
}

TEST_CASE("link predicate is symmetric and excludes dead nodes") {
  NetworkGraph g = build_topology(small_config(60, 200, 40, 3));
  g.node(5).alive = false;
  for (NodeId i = 0; i < g.size(); ++i) {
    for (NodeId j = 0; j < g.size(); ++j) {
      CHECK(link_exists(g, i, j) == link_exists(g, j, i));
      if (i == 5 || j == 5) CHECK_FALSE(link_exists(g, i, j));
    }
  }
}

TEST_CASE("same seed gives the same topology, another seed does not") {
  const NetworkGraph a = build_topology(small_config(100, 300, 50, 11));
  const NetworkGraph b = build_topology(small_config(100, 300, 50, 11));
  const NetworkGraph c = build_topology(small_config(100, 300, 50, 12));
  bool all_same = true;
  bool any_diff = false;
  for (NodeId i = 0; i < a.size(); ++i) {
    all_same = all_same && a.node(i).position == b.node(i).position;
    any_diff = any_diff || !(a.node(i).position == c.node(i).position);
  }
  CHECK(all_same);
  CHECK(any_diff);
}

TEST_CASE("invalid topology parameters are rejected") {
  CHECK_THROWS_AS(build_topology(small_config(1, 100, 50, 1)), ConfigError);
  CHECK_THROWS_AS(build_topology(small_config(10, 100, 0, 1)), ConfigError);
  CHECK_THROWS_AS(build_topology(small_config(10, 100, -5, 1)), ConfigError);
}

}
