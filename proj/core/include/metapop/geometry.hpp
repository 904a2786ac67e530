#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace metapop {

struct Point {
  double x = 0;
  double y = 0;
};

inline double dist(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Simple polygon as an ordered vertex list (implicitly closed).
using Polygon = std::vector<Point>;

double polygon_area(const Polygon& poly);
Polygon make_rect(double x0, double y0, double x1, double y1);
bool point_in_polygon(const Point& p, const Polygon& poly);

// Uniform-grid index over a fixed point set, for radius queries with
// expected O(k) cost per query.
class SpatialGrid {
 public:
  SpatialGrid(std::span<const Point> points, double cell_size);

  // Indices of points with dist(points[i], center) < radius, ascending.
  std::vector<int> radius_query(const Point& center, double radius) const;
  void radius_query(const Point& center, double radius,
                    std::vector<int>& out) const;

  double cell_size() const { return cell_; }

 private:
  std::vector<Point> points_;
  double cell_ = 1;
  double min_x_ = 0, min_y_ = 0;
  int nx_ = 1, ny_ = 1;
  std::vector<int> bucket_start_;  // nx*ny + 1
  std::vector<int> items_;         // point indices grouped by bucket

  int bucket_of(double x, double y) const;
};

}  // namespace metapop
