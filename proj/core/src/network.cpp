#include "metapop/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "metapop/csv.hpp"
#include "metapop/voronoi.hpp"

namespace metapop {

std::vector<Point> PatchNetwork::coordinates() const {
  std::vector<Point> pts(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) pts[i] = {nodes[i].x, nodes[i].y};
  return pts;
}

double PatchNetwork::total_population() const {
  double total = 0;
  for (const auto& n : nodes) total += n.population;
  return total;
}

std::vector<KernelEdge> mosquito_edges(std::span<const Point> points,
                                       double d_max_m) {
  if (!(d_max_m > 0)) throw std::invalid_argument("mosquito_edges: d_max must be > 0");
  std::vector<KernelEdge> edges;
  if (points.size() < 2) return edges;
  SpatialGrid grid(points, d_max_m);
  std::vector<int> hits;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    grid.radius_query(points[i], d_max_m, hits);
    for (int j : hits) {
      if (j <= i) continue;  // store undirected pairs once
      const double d = dist(points[i], points[j]);
      if (d > 0 && d < d_max_m) {
        edges.push_back({i, j, d, kernel(d, d_max_m)});
      }
    }
  }
  return edges;
}

NodeCapacities carrying_capacities(std::span<const double> areas_m2,
                                   const ModelParams& p, double d_max_m) {
  const double s_max = std::numbers::pi * d_max_m * d_max_m;
  NodeCapacities out;
  out.k_e.reserve(areas_m2.size());
  out.k_l.reserve(areas_m2.size());
  for (double s : areas_m2) {
    const double phi = std::min(std::max(s, 0.0) / s_max, 1.0);
    out.k_e.push_back(p.k_e * phi);
    out.k_l.push_back(p.k_l * phi);
  }
  return out;
}

void finalize_network(PatchNetwork& net, const ModelParams& p,
                      const Polygon* bounds) {
  const auto pts = net.coordinates();
  bool need_areas = false;
  for (const auto& n : net.nodes) {
    if (!(n.area_m2 > 0)) need_areas = true;
  }
  if (need_areas && !net.nodes.empty()) {
    Polygon box;
    if (!bounds) {
      double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
      for (const auto& q : pts) {
        x0 = std::min(x0, q.x);
        x1 = std::max(x1, q.x);
        y0 = std::min(y0, q.y);
        y1 = std::max(y1, q.y);
      }
      // pad degenerate extents so single nodes get a positive cell
      const double pad = std::max({(x1 - x0) * 0.05, (y1 - y0) * 0.05, 1.0});
      box = make_rect(x0 - pad, y0 - pad, x1 + pad, y1 + pad);
    }
    const auto areas = voronoi_areas(pts, bounds ? *bounds : box);
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
      net.nodes[i].area_m2 = areas[i];
    }
  }
  std::vector<double> areas(net.nodes.size());
  for (std::size_t i = 0; i < net.nodes.size(); ++i) areas[i] = net.nodes[i].area_m2;
  const auto caps = carrying_capacities(areas, p, net.d_max_m);
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    net.nodes[i].k_e = caps.k_e[i];
    net.nodes[i].k_l = caps.k_l[i];
  }
  net.edges = mosquito_edges(pts, net.d_max_m);
}

PatchNetwork load_nodes_csv(const std::string& path, double d_max_m) {
  const CsvTable t = read_csv(path);
  const int c_id = t.require_column("id");
  const int c_x = t.require_column("x_m");
  const int c_y = t.require_column("y_m");
  const int c_pop = t.require_column("population");
  const int c_area = t.column("area_m2");
  PatchNetwork net;
  net.d_max_m = d_max_m;
  net.nodes.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    PatchNode n;
    n.id = static_cast<int>(parse_int_field(t.rows[r][c_id], t, r, c_id));
    n.x = parse_double_field(t.rows[r][c_x], t, r, c_x);
    n.y = parse_double_field(t.rows[r][c_y], t, r, c_y);
    n.population = parse_double_field(t.rows[r][c_pop], t, r, c_pop);
    if (c_area >= 0) n.area_m2 = parse_double_field(t.rows[r][c_area], t, r, c_area);
    net.nodes.push_back(n);
  }
  if (net.nodes.empty()) throw std::invalid_argument(path + ": no nodes");
  // ids must be the dense range 0..n-1 in row order
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    if (net.nodes[i].id != static_cast<int>(i)) {
      throw std::invalid_argument(path + ": node ids must be 0..n-1 in order (row " +
                                  std::to_string(i) + " has id " +
                                  std::to_string(net.nodes[i].id) + ")");
    }
  }
  return net;
}

void save_nodes_csv(const PatchNetwork& net, const std::string& path) {
  CsvWriter w(path, {"id", "x_m", "y_m", "population", "area_m2"});
  for (const auto& n : net.nodes) {
    w.begin_row();
    w.field(n.id);
    w.field(n.x);
    w.field(n.y);
    w.field(n.population);
    w.field(n.area_m2);
    w.end_row();
  }
}

std::vector<KernelEdge> load_edges_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int c_i = t.require_column("i");
  const int c_j = t.require_column("j");
  const int c_d = t.require_column("distance_m");
  const int c_w = t.require_column("weight");
  std::vector<KernelEdge> edges;
  edges.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    KernelEdge e;
    e.i = static_cast<int>(parse_int_field(t.rows[r][c_i], t, r, c_i));
    e.j = static_cast<int>(parse_int_field(t.rows[r][c_j], t, r, c_j));
    e.distance_m = parse_double_field(t.rows[r][c_d], t, r, c_d);
    e.weight = parse_double_field(t.rows[r][c_w], t, r, c_w);
    edges.push_back(e);
  }
  return edges;
}

void save_edges_csv(std::span<const KernelEdge> edges, const std::string& path) {
  CsvWriter w(path, {"i", "j", "distance_m", "weight"});
  for (const auto& e : edges) {
    w.begin_row();
    w.field(e.i);
    w.field(e.j);
    w.field(e.distance_m);
    w.field(e.weight);
    w.end_row();
  }
}

}  // namespace metapop
