#include "metapop/geo_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "metapop/csv.hpp"
#include "metapop/rng.hpp"
#include "metapop/voronoi.hpp"

namespace metapop {

std::vector<Point> load_intersections(const std::string& path,
                                      std::vector<std::string>* warnings) {
  const CsvTable t = read_csv(path);
  const int c_x = t.require_column("x_m");
  const int c_y = t.require_column("y_m");
  std::vector<Point> pts;
  pts.reserve(t.rows.size());
  std::map<std::pair<double, double>, int> seen;
  std::size_t duplicates = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Point p;
    p.x = parse_double_field(t.rows[r][c_x], t, r, c_x);
    p.y = parse_double_field(t.rows[r][c_y], t, r, c_y);
    auto [it, inserted] = seen.emplace(std::make_pair(p.x, p.y), 1);
    if (!inserted) {
      ++duplicates;
      ++it->second;
      continue;
    }
    pts.push_back(p);
  }
  if (pts.empty()) throw std::invalid_argument(path + ": no nodes");
  if (duplicates > 0 && warnings) {
    warnings->push_back(path + ": collapsed " + std::to_string(duplicates) +
                        " duplicate coordinate row(s)");
  }
  return pts;
}

std::vector<GridCell> load_cells_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int c_x = t.require_column("x0_m");
  const int c_y = t.require_column("y0_m");
  const int c_s = t.require_column("size_m");
  const int c_p = t.require_column("population");
  std::vector<GridCell> cells;
  cells.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    GridCell c;
    c.x0 = parse_double_field(t.rows[r][c_x], t, r, c_x);
    c.y0 = parse_double_field(t.rows[r][c_y], t, r, c_y);
    c.size = parse_double_field(t.rows[r][c_s], t, r, c_s);
    c.population = parse_int_field(t.rows[r][c_p], t, r, c_p);
    if (!(c.size > 0)) {
      throw std::invalid_argument(path + ":" + std::to_string(t.line_numbers[r]) +
                                  ": size_m must be > 0");
    }
    if (c.population < 0) {
      throw std::invalid_argument(path + ":" + std::to_string(t.line_numbers[r]) +
                                  ": population must be >= 0");
    }
    cells.push_back(c);
  }
  return cells;
}

void save_cells_csv(std::span<const GridCell> cells, const std::string& path) {
  CsvWriter w(path, {"x0_m", "y0_m", "size_m", "population"});
  for (const auto& c : cells) {
    w.begin_row();
    w.field(c.x0);
    w.field(c.y0);
    w.field(c.size);
    w.field(c.population);
    w.end_row();
  }
}

PopulationAssignment distribute_population(std::span<const GridCell> cells,
                                           std::span<const Point> nodes,
                                           std::vector<std::string>* warnings) {
  PopulationAssignment out;
  out.node_population.assign(nodes.size(), 0);
  std::vector<bool> assigned(nodes.size(), false);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const GridCell& cell = cells[c];
    // half-open cell: nodes exactly on the upper/right boundary belong to
    // the next cell
    std::vector<int> inside;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (assigned[i]) continue;
      if (nodes[i].x >= cell.x0 && nodes[i].x < cell.x0 + cell.size &&
          nodes[i].y >= cell.y0 && nodes[i].y < cell.y0 + cell.size) {
        inside.push_back(static_cast<int>(i));
      }
    }
    for (int i : inside) assigned[i] = true;
    if (inside.empty()) {
      if (cell.population > 0) {
        out.created_nodes.push_back(
            {cell.x0 + cell.size / 2, cell.y0 + cell.size / 2});
        out.created_population.push_back(cell.population);
      }
      continue;
    }
    const long long base = cell.population / static_cast<long long>(inside.size());
    long long rem = cell.population % static_cast<long long>(inside.size());
    // inside is ascending, so remainders land on the lowest node ids
    for (int i : inside) {
      out.node_population[i] = base + (rem > 0 ? 1 : 0);
      if (rem > 0) --rem;
    }
  }
  if (warnings) {
    std::size_t orphans = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!assigned[i]) ++orphans;
    }
    if (orphans > 0) {
      warnings->push_back(std::to_string(orphans) +
                          " node(s) outside every cell were assigned population 0");
    }
  }
  return out;
}

void SynthIslandConfig::validate() const {
  if (node_count < 1) throw std::invalid_argument("synth island: node_count must be >= 1");
  if (!(width_m > 0) || !(height_m > 0)) {
    throw std::invalid_argument("synth island: extent must be positive");
  }
  if (population_total < 0) {
    throw std::invalid_argument("synth island: population_total must be >= 0");
  }
  if (cluster_count < 1) throw std::invalid_argument("synth island: cluster_count must be >= 1");
  if (!(d_max_m > 0)) throw std::invalid_argument("synth island: d_max_m must be > 0");
}

PatchNetwork synthesize_island(const SynthIslandConfig& cfg,
                               const ModelParams& params) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, 0));

  // town centers, plus per-cluster spread for density contrast
  struct Cluster {
    Point center;
    double sigma;
  };
  std::vector<Cluster> clusters(cfg.cluster_count);
  const double margin = 0.08;
  for (auto& c : clusters) {
    c.center.x = uniform_range(rng, margin * cfg.width_m, (1 - margin) * cfg.width_m);
    c.center.y = uniform_range(rng, margin * cfg.height_m, (1 - margin) * cfg.height_m);
    c.sigma = std::min(cfg.width_m, cfg.height_m) * (0.02 + 0.06 * uniform01(rng));
  }

  std::vector<Point> pts;
  pts.reserve(cfg.node_count);
  std::map<std::pair<double, double>, bool> used;
  for (int k = 0; k < cfg.node_count; ++k) {
    Point p;
    // one node in five is scattered background (isolated road crossings)
    const bool background = (k % 5 == 4);
    for (int attempt = 0; attempt < 200; ++attempt) {
      if (background) {
        p.x = uniform_range(rng, 0, cfg.width_m);
        p.y = uniform_range(rng, 0, cfg.height_m);
      } else {
        const Cluster& c = clusters[k % clusters.size()];
        p.x = c.center.x + c.sigma * normal01(rng);
        p.y = c.center.y + c.sigma * normal01(rng);
      }
      if (p.x > 0 && p.x < cfg.width_m && p.y > 0 && p.y < cfg.height_m &&
          !used.count({p.x, p.y})) {
        break;
      }
      p = {std::clamp(p.x, cfg.width_m * 1e-6, cfg.width_m * (1 - 1e-6)),
           std::clamp(p.y, cfg.height_m * 1e-6, cfg.height_m * (1 - 1e-6))};
    }
    used[{p.x, p.y}] = true;
    pts.push_back(p);
  }

  // synthetic population grid: cell population grows superlinearly with node
  // count so towns are both denser and more populated per node
  const int grid_n = 16;
  const double gx = cfg.width_m / grid_n;
  const double gy = cfg.height_m / grid_n;
  std::vector<double> weight(grid_n * grid_n, 0.0);
  for (const auto& p : pts) {
    const int cx = std::min(static_cast<int>(p.x / gx), grid_n - 1);
    const int cy = std::min(static_cast<int>(p.y / gy), grid_n - 1);
    weight[cy * grid_n + cx] += 1.0;
  }
  double weight_sum = 0;
  for (auto& w : weight) {
    if (w > 0) w = std::pow(w, 1.3);
    weight_sum += w;
  }
  // largest-remainder apportionment of the total population over cells
  std::vector<GridCell> cells;
  std::vector<std::pair<double, int>> remainders;
  long long assigned = 0;
  for (int ci = 0; ci < grid_n * grid_n; ++ci) {
    GridCell cell;
    cell.x0 = (ci % grid_n) * gx;
    cell.y0 = (ci / grid_n) * gy;
    cell.size = gx;  // matched below by half-open membership in both axes
    if (weight[ci] > 0 && weight_sum > 0) {
      const double share = double(cfg.population_total) * weight[ci] / weight_sum;
      cell.population = static_cast<long long>(share);
      assigned += cell.population;
      remainders.emplace_back(-(share - double(cell.population)), ci);
    }
    cells.push_back(cell);
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t k = 0; k < remainders.size() && assigned < cfg.population_total; ++k) {
    cells[remainders[k].second].population += 1;
    ++assigned;
  }
  if (!remainders.empty() && assigned < cfg.population_total) {
    cells[remainders[0].second].population += cfg.population_total - assigned;
  }

  // grid cells are square only when width == height; use per-axis membership
  for (auto& cell : cells) cell.size = gx;
  PopulationAssignment pa;
  pa.node_population.assign(pts.size(), 0);
  {
    // same even-split rule as distribute_population, with per-axis extents
    std::vector<std::vector<int>> members(cells.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      int cx = std::min(static_cast<int>(pts[i].x / gx), grid_n - 1);
      int cy = std::min(static_cast<int>(pts[i].y / gy), grid_n - 1);
      members[cy * grid_n + cx].push_back(static_cast<int>(i));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (members[c].empty() || cells[c].population == 0) continue;
      const long long base =
          cells[c].population / static_cast<long long>(members[c].size());
      long long rem = cells[c].population % static_cast<long long>(members[c].size());
      for (int i : members[c]) {
        pa.node_population[i] = base + (rem > 0 ? 1 : 0);
        if (rem > 0) --rem;
      }
    }
  }

  PatchNetwork net;
  net.d_max_m = cfg.d_max_m;
  net.nodes.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    net.nodes[i].id = static_cast<int>(i);
    net.nodes[i].x = pts[i].x;
    net.nodes[i].y = pts[i].y;
    net.nodes[i].population = double(pa.node_population[i]);
  }
  const Polygon bounds = make_rect(0, 0, cfg.width_m, cfg.height_m);
  finalize_network(net, params, &bounds);
  return net;
}

std::vector<Point> project_equirectangular(std::span<const Point> lonlat_deg) {
  if (lonlat_deg.empty()) return {};
  constexpr double earth_radius_m = 6371000.0;
  constexpr double deg = std::numbers::pi / 180.0;
  double lon0 = 0, lat0 = 0;
  for (const auto& p : lonlat_deg) {
    lon0 += p.x;
    lat0 += p.y;
  }
  lon0 /= double(lonlat_deg.size());
  lat0 /= double(lonlat_deg.size());
  const double cos_lat0 = std::cos(lat0 * deg);
  std::vector<Point> out;
  out.reserve(lonlat_deg.size());
  for (const auto& p : lonlat_deg) {
    out.push_back({earth_radius_m * (p.x - lon0) * deg * cos_lat0,
                   earth_radius_m * (p.y - lat0) * deg});
  }
  return out;
}

}  // namespace metapop
