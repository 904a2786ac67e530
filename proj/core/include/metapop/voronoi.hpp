#pragma once

#include <span>
#include <vector>

#include "metapop/geometry.hpp"

namespace metapop {

// Areas of the Voronoi cells of `sites` clipped to `bounds`. Sites must be
// pairwise distinct and inside the bounds; duplicate coordinates raise an
// error naming the offending pair. The returned areas partition the bounds:
// their sum equals the polygon area up to rounding.
std::vector<double> voronoi_areas(std::span<const Point> sites,
                                  const Polygon& bounds);

}  // namespace metapop
