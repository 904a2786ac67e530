#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metapop/geometry.hpp"
#include "metapop/network.hpp"

namespace metapop {

// One square of the population grid; half-open extent
// [x0, x0+size) x [y0, y0+size).
struct GridCell {
  double x0 = 0, y0 = 0;
  double size = 1000;
  long long population = 0;
};

// intersections.csv: header x_m,y_m, pre-projected planar meters. Exact
// duplicate coordinates are collapsed with a count warning.
std::vector<Point> load_intersections(const std::string& path,
                                      std::vector<std::string>* warnings = nullptr);

// cells.csv: header x0_m,y0_m,size_m,population.
std::vector<GridCell> load_cells_csv(const std::string& path);
void save_cells_csv(std::span<const GridCell> cells, const std::string& path);

struct PopulationAssignment {
  std::vector<long long> node_population;  // aligned with the input nodes
  std::vector<Point> created_nodes;        // one per populated empty cell
  std::vector<long long> created_population;
};

// Splits each cell's population evenly among the nodes it contains, integer
// remainders going to the lowest node ids. Populated cells without any node
// spawn one node at the cell center. Total population is conserved exactly.
PopulationAssignment distribute_population(std::span<const GridCell> cells,
                                           std::span<const Point> nodes,
                                           std::vector<std::string>* warnings = nullptr);

struct SynthIslandConfig {
  int node_count = 100;
  double width_m = 10000;
  double height_m = 10000;
  long long population_total = 50000;
  int cluster_count = 5;
  std::uint64_t seed = 0;
  double d_max_m = 200.0;

  void validate() const;
};

// Desk-scale stand-in for real road/population data: clustered node
// placement, density-proportional population on a synthetic grid, Voronoi
// areas, capacities and kernel edges. Deterministic for a given seed.
PatchNetwork synthesize_island(const SynthIslandConfig& cfg,
                               const ModelParams& params);

// Equirectangular projection about the centroid, degrees -> meters. Adequate
// at island scale; inputs are (lon, lat) pairs in degrees.
std::vector<Point> project_equirectangular(std::span<const Point> lonlat_deg);

}  // namespace metapop
