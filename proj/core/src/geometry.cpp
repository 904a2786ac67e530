#include "metapop/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace metapop {

double polygon_area(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) * 0.5;
}

Polygon make_rect(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

bool point_in_polygon(const Point& p, const Polygon& poly) {
  // Ray casting; points within a small tolerance of an edge count as inside.
  const std::size_t n = poly.size();
  if (n < 3) return false;
  double span = 0;
  for (const auto& v : poly) span = std::max({span, std::abs(v.x), std::abs(v.y)});
  const double eps = 1e-9 * std::max(span, 1.0);
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = poly[j];
    const Point& b = poly[i];
    // distance to segment
    const double ux = b.x - a.x, uy = b.y - a.y;
    const double len2 = ux * ux + uy * uy;
    double t = len2 > 0 ? ((p.x - a.x) * ux + (p.y - a.y) * uy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.x - (a.x + t * ux), dy = p.y - (a.y + t * uy);
    if (dx * dx + dy * dy <= eps * eps) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

SpatialGrid::SpatialGrid(std::span<const Point> points, double cell_size)
    : points_(points.begin(), points.end()), cell_(cell_size) {
  if (cell_ <= 0) throw std::invalid_argument("SpatialGrid: cell_size must be > 0");
  if (points_.empty()) {
    bucket_start_ = {0};
    return;
  }
  double max_x = points_[0].x, max_y = points_[0].y;
  min_x_ = points_[0].x;
  min_y_ = points_[0].y;
  for (const auto& p : points_) {
    min_x_ = std::min(min_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  nx_ = std::max(1, static_cast<int>((max_x - min_x_) / cell_) + 1);
  ny_ = std::max(1, static_cast<int>((max_y - min_y_) / cell_) + 1);
  // counting sort into buckets
  bucket_start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  for (const auto& p : points_) bucket_start_[bucket_of(p.x, p.y) + 1]++;
  for (std::size_t b = 1; b < bucket_start_.size(); ++b) {
    bucket_start_[b] += bucket_start_[b - 1];
  }
  items_.resize(points_.size());
  std::vector<int> cursor(bucket_start_.begin(), bucket_start_.end() - 1);
  for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
    items_[cursor[bucket_of(points_[i].x, points_[i].y)]++] = i;
  }
}

int SpatialGrid::bucket_of(double x, double y) const {
  int cx = static_cast<int>((x - min_x_) / cell_);
  int cy = static_cast<int>((y - min_y_) / cell_);
  cx = std::clamp(cx, 0, nx_ - 1);
  cy = std::clamp(cy, 0, ny_ - 1);
  return cy * nx_ + cx;
}

void SpatialGrid::radius_query(const Point& center, double radius,
                               std::vector<int>& out) const {
  out.clear();
  if (points_.empty() || radius <= 0) return;
  const int cx0 = std::clamp(
      static_cast<int>((center.x - radius - min_x_) / cell_), 0, nx_ - 1);
  const int cx1 = std::clamp(
      static_cast<int>((center.x + radius - min_x_) / cell_), 0, nx_ - 1);
  const int cy0 = std::clamp(
      static_cast<int>((center.y - radius - min_y_) / cell_), 0, ny_ - 1);
  const int cy1 = std::clamp(
      static_cast<int>((center.y + radius - min_y_) / cell_), 0, ny_ - 1);
  const double r2 = radius * radius;
  for (int cy = cy0; cy <= cy1; ++cy) {
    for (int cx = cx0; cx <= cx1; ++cx) {
      const int b = cy * nx_ + cx;
      for (int k = bucket_start_[b]; k < bucket_start_[b + 1]; ++k) {
        const int i = items_[k];
        const double dx = points_[i].x - center.x;
        const double dy = points_[i].y - center.y;
        if (dx * dx + dy * dy < r2) out.push_back(i);
      }
    }
  }
  std::sort(out.begin(), out.end());
}

std::vector<int> SpatialGrid::radius_query(const Point& center,
                                           double radius) const {
  std::vector<int> out;
  radius_query(center, radius, out);
  return out;
}

}  // namespace metapop
