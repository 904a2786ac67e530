#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metapop/geometry.hpp"
#include "metapop/params.hpp"

namespace metapop {

struct PatchNode {
  int id = 0;
  double x = 0, y = 0;     // projected planar coordinates, meters
  double population = 0;   // resident humans
  double area_m2 = 0;      // Voronoi surface
  double k_e = 0, k_l = 0; // node carrying capacities
};

// Undirected mosquito-interaction edge, stored once with i < j.
struct KernelEdge {
  int i = 0, j = 0;
  double distance_m = 0;
  double weight = 0;  // (d_max - d) / d_max, in (0, 1]
};

struct PatchNetwork {
  std::vector<PatchNode> nodes;
  std::vector<KernelEdge> edges;  // mosquito kernel graph
  double d_max_m = 200.0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  std::vector<Point> coordinates() const;
  double total_population() const;
};

// Linearly decreasing interaction weight, zero at and beyond d_max.
inline double kernel(double distance_m, double d_max_m) {
  return distance_m < d_max_m ? (d_max_m - distance_m) / d_max_m : 0.0;
}

// All unordered pairs with 0 < d < d_max, found with a uniform grid index.
std::vector<KernelEdge> mosquito_edges(std::span<const Point> points,
                                       double d_max_m);

struct NodeCapacities {
  std::vector<double> k_e, k_l;
};

// Per-node capacities K_E * phi(S_i), K_L * phi(S_i) with
// phi(S) = min(S / S_max, 1) and S_max = pi * d_max^2.
NodeCapacities carrying_capacities(std::span<const double> areas_m2,
                                   const ModelParams& p, double d_max_m);

// Fills in missing areas (bounded Voronoi over `bounds`, or the bounding box
// when none is given), then capacities and kernel edges.
void finalize_network(PatchNetwork& net, const ModelParams& p,
                      const Polygon* bounds = nullptr);

// nodes.csv: header id,x_m,y_m,population[,area_m2]. Areas left at zero when
// the column is absent (computed by finalize_network).
PatchNetwork load_nodes_csv(const std::string& path, double d_max_m = 200.0);
void save_nodes_csv(const PatchNetwork& net, const std::string& path);

// mosq_edges.csv: header i,j,distance_m,weight.
std::vector<KernelEdge> load_edges_csv(const std::string& path);
void save_edges_csv(std::span<const KernelEdge> edges, const std::string& path);

}  // namespace metapop
