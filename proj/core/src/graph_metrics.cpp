#include "metapop/graph_metrics.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace metapop {

namespace {

int bfs_eccentricity(int start, const std::vector<int>& adj_ptr,
                     const std::vector<int>& adj, std::vector<int>& dist,
                     int* farthest = nullptr) {
  std::fill(dist.begin(), dist.end(), -1);
  std::queue<int> q;
  dist[start] = 0;
  q.push(start);
  int ecc = 0;
  int far = start;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int k = adj_ptr[u]; k < adj_ptr[u + 1]; ++k) {
      const int v = adj[k];
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        if (dist[v] > ecc) {
          ecc = dist[v];
          far = v;
        }
        q.push(v);
      }
    }
  }
  if (farthest) *farthest = far;
  return ecc;
}

}  // namespace

GraphMetrics graph_metrics(std::span<const std::pair<int, int>> links,
                           std::size_t node_count,
                           const GraphMetricsOptions& opts) {
  GraphMetrics m;
  m.node_count = node_count;
  if (node_count == 0) {
    return m;  // zeroed metrics, diameter absent
  }
  const int n = static_cast<int>(node_count);

  // dedupe to canonical undirected pairs
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(links.size());
  for (const auto& [a, b] : links) {
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw std::invalid_argument("graph_metrics: link index out of range");
    }
    if (a == b) continue;
    pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  m.link_count = pairs.size();
  m.average_degree = node_count ? 2.0 * double(m.link_count) / double(node_count) : 0.0;

  // adjacency CSR
  std::vector<int> adj_ptr(node_count + 1, 0);
  for (const auto& [a, b] : pairs) {
    adj_ptr[a + 1]++;
    adj_ptr[b + 1]++;
  }
  for (std::size_t i = 1; i < adj_ptr.size(); ++i) adj_ptr[i] += adj_ptr[i - 1];
  std::vector<int> adj(2 * pairs.size());
  {
    std::vector<int> cur(adj_ptr.begin(), adj_ptr.end() - 1);
    for (const auto& [a, b] : pairs) {
      adj[cur[a]++] = b;
      adj[cur[b]++] = a;
    }
  }

  // components via BFS labelling
  std::vector<int> comp(node_count, -1);
  std::vector<int> comp_size;
  for (int v = 0; v < n; ++v) {
    if (comp[v] >= 0) continue;
    const int c = static_cast<int>(comp_size.size());
    comp_size.push_back(0);
    std::queue<int> q;
    comp[v] = c;
    q.push(v);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      comp_size[c]++;
      for (int k = adj_ptr[u]; k < adj_ptr[u + 1]; ++k) {
        if (comp[adj[k]] < 0) {
          comp[adj[k]] = c;
          q.push(adj[k]);
        }
      }
    }
  }
  m.connected_component_count = comp_size.size();

  // exact diameter of the largest component, BFS from each of its nodes,
  // cross-checked against the double-sweep lower bound
  const int big = static_cast<int>(
      std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());
  const std::size_t big_size = static_cast<std::size_t>(comp_size[big]);
  if (big_size < 2) {
    if (m.link_count == 0) return m;  // no links anywhere: diameter undefined
  }
  if (big_size > opts.diameter_node_limit && !opts.force_diameter) {
    return m;  // reported as absent; enable force_diameter to compute
  }
  std::vector<int> dist(node_count);
  int seed = -1;
  for (int v = 0; v < n; ++v) {
    if (comp[v] == big) {
      seed = v;
      break;
    }
  }
  int far = seed;
  bfs_eccentricity(seed, adj_ptr, adj, dist, &far);
  int sweep2_far = far;
  const int lower_bound = bfs_eccentricity(far, adj_ptr, adj, dist, &sweep2_far);
  int diam = lower_bound;
  for (int v = 0; v < n; ++v) {
    if (comp[v] != big) continue;
    diam = std::max(diam, bfs_eccentricity(v, adj_ptr, adj, dist));
  }
  if (diam < lower_bound) {
    throw std::logic_error("graph_metrics: diameter below double-sweep bound");
  }
  m.diameter = diam;
  return m;
}

}  // namespace metapop
