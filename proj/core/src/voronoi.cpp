#include "metapop/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace metapop {

namespace {

// Keep the part of `poly` with (p - mid) . n <= 0 (closer to the owning site
// than to its rival). Sutherland-Hodgman against a single half-plane.
void clip_halfplane(std::vector<Point>& poly, const Point& mid, double nx,
                    double ny, std::vector<Point>& tmp) {
  tmp.clear();
  const std::size_t n = poly.size();
  if (n == 0) return;
  auto side = [&](const Point& p) {
    return (p.x - mid.x) * nx + (p.y - mid.y) * ny;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    const double sa = side(a);
    const double sb = side(b);
    if (sa <= 0) tmp.push_back(a);
    if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) {
      const double t = sa / (sa - sb);
      tmp.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  poly.swap(tmp);
}

double max_vertex_dist(const std::vector<Point>& poly, const Point& site) {
  double m = 0;
  for (const auto& v : poly) m = std::max(m, dist(v, site));
  return m;
}

}  // namespace

std::vector<double> voronoi_areas(std::span<const Point> sites,
                                  const Polygon& bounds) {
  const int n = static_cast<int>(sites.size());
  if (n < 1) throw std::invalid_argument("voronoi_areas: need at least one site");
  if (bounds.size() < 3) {
    throw std::invalid_argument("voronoi_areas: bounds polygon needs >= 3 vertices");
  }

  // duplicate detection by exact coordinate match
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (sites[a].x != sites[b].x) return sites[a].x < sites[b].x;
      return sites[a].y < sites[b].y;
    });
    for (int k = 1; k < n; ++k) {
      const int a = order[k - 1], b = order[k];
      if (sites[a].x == sites[b].x && sites[a].y == sites[b].y) {
        throw std::invalid_argument(
            "voronoi_areas: duplicate coordinates at sites " +
            std::to_string(std::min(a, b)) + " and " +
            std::to_string(std::max(a, b)));
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!point_in_polygon(sites[i], bounds)) {
      throw std::invalid_argument("voronoi_areas: site " + std::to_string(i) +
                                  " lies outside the bounds polygon");
    }
  }

  // grid sized for roughly a handful of sites per cell
  double min_x = sites[0].x, max_x = sites[0].x;
  double min_y = sites[0].y, max_y = sites[0].y;
  for (const auto& p : sites) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-12});
  const double cell = std::max(span / std::max(1.0, std::sqrt(double(n))), 1e-12);
  SpatialGrid grid(sites, cell);

  std::vector<double> areas(n, 0.0);
  std::vector<Point> poly, tmp;
  std::vector<int> cand;

#pragma omp parallel for schedule(dynamic, 16) private(poly, tmp, cand)
  for (int i = 0; i < n; ++i) {
    poly.assign(bounds.begin(), bounds.end());
    const Point site = sites[i];
    double radius = 2 * cell;
    double processed_radius = 0;
    while (true) {
      double maxd = max_vertex_dist(poly, site);
      if (2 * maxd <= processed_radius || poly.empty()) break;
      radius = std::max(radius, 2 * cell);
      grid.radius_query(site, radius, cand);
      // rivals in (processed_radius, radius), nearest first
      std::vector<std::pair<double, int>> batch;
      for (int j : cand) {
        if (j == i) continue;
        const double d = dist(site, sites[j]);
        if (d > processed_radius && d <= radius) batch.emplace_back(d, j);
      }
      std::sort(batch.begin(), batch.end());
      for (const auto& [d, j] : batch) {
        if (d / 2 > maxd) break;  // nothing farther can cut the cell
        const Point mid{(site.x + sites[j].x) / 2, (site.y + sites[j].y) / 2};
        clip_halfplane(poly, mid, sites[j].x - site.x, sites[j].y - site.y, tmp);
        if (poly.empty()) break;
        maxd = max_vertex_dist(poly, site);
      }
      processed_radius = radius;
      radius *= 2;
    }
    areas[i] = polygon_area(poly);
  }
  return areas;
}

}  // namespace metapop
