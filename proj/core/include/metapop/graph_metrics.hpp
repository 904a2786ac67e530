#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace metapop {

struct GraphMetrics {
  std::size_t node_count = 0;
  std::size_t link_count = 0;  // undirected links
  double average_degree = 0;   // 2 * link_count / node_count
  std::size_t connected_component_count = 0;
  std::optional<int> diameter;  // of the largest component; absent when
                                // undefined or skipped at scale
};

struct GraphMetricsOptions {
  // Exact diameter runs a BFS from every node of the largest component,
  // which is the expensive metric; above this size it must be forced.
  std::size_t diameter_node_limit = 20000;
  bool force_diameter = false;
};

// Metrics of an undirected graph given as unordered node-index pairs.
// Duplicate pairs and both orientations count once.
GraphMetrics graph_metrics(std::span<const std::pair<int, int>> links,
                           std::size_t node_count,
                           const GraphMetricsOptions& opts = {});

}  // namespace metapop
