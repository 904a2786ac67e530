#include <doctest.h>

#include <vector>

#include "metapop/graph_metrics.hpp"

using metapop::graph_metrics;

TEST_CASE("path graph on three nodes") {
  const std::vector<std::pair<int, int>> links{{0, 1}, {1, 2}};
  const auto m = graph_metrics(links, 3);
  CHECK(m.node_count == 3);
  CHECK(m.link_count == 2);
  CHECK(m.average_degree == doctest::Approx(4.0 / 3.0));
  CHECK(m.connected_component_count == 1);
  REQUIRE(m.diameter.has_value());
  CHECK(*m.diameter == 2);
}

TEST_CASE("two disjoint edges") {
  const std::vector<std::pair<int, int>> links{{0, 1}, {2, 3}};
  const auto m = graph_metrics(links, 4);
  CHECK(m.connected_component_count == 2);
  CHECK(m.link_count == 2);
  REQUIRE(m.diameter.has_value());
  CHECK(*m.diameter == 1);
}

TEST_CASE("empty graph reports zeroed metrics without a diameter") {
  const auto m = graph_metrics({}, 0);
  CHECK(m.node_count == 0);
  CHECK(m.link_count == 0);
  CHECK(m.average_degree == 0.0);
  CHECK(m.connected_component_count == 0);
  CHECK_FALSE(m.diameter.has_value());
}

TEST_CASE("isolated nodes count as components; duplicates and loops collapse") {
  const std::vector<std::pair<int, int>> links{{0, 1}, {1, 0}, {1, 1}, {0, 1}};
  const auto m = graph_metrics(links, 4);
  CHECK(m.link_count == 1);
  CHECK(m.connected_component_count == 3);  // {0,1}, {2}, {3}
  CHECK(m.average_degree == doctest::Approx(0.5));
}

TEST_CASE("average degree identity holds") {
  const std::vector<std::pair<int, int>> links{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}};
  const auto m = graph_metrics(links, 4);
  CHECK(m.average_degree * double(m.node_count) == doctest::Approx(2.0 * double(m.link_count)));
}

TEST_CASE("cycle diameter is exact") {
  std::vector<std::pair<int, int>> ring;
  const int n = 9;
  for (int i = 0; i < n; ++i) ring.push_back({i, (i + 1) % n});
  const auto m = graph_metrics(ring, n);
  REQUIRE(m.diameter.has_value());
  CHECK(*m.diameter == n / 2);
}

TEST_CASE("diameter is skipped above the node limit unless forced") {
  std::vector<std::pair<int, int>> chain;
  const int n = 50;
  for (int i = 0; i + 1 < n; ++i) chain.push_back({i, i + 1});
  metapop::GraphMetricsOptions opts;
  opts.diameter_node_limit = 10;
  const auto skipped = graph_metrics(chain, n, opts);
  CHECK_FALSE(skipped.diameter.has_value());
  opts.force_diameter = true;
  const auto forced = graph_metrics(chain, n, opts);
  REQUIRE(forced.diameter.has_value());
  CHECK(*forced.diameter == n - 1);
}
