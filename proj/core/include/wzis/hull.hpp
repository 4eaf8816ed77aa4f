#pragma once

#include <vector>

namespace wzis {

struct XY {
  double x = 0.0;
  double y = 0.0;
};

// Indices of the vertices of the lower convex hull of `points`, restricted
// to the nonincreasing frontier: sorted by x, convex, y nonincreasing, and
// truncated after the minimum-y vertex. Duplicate x keeps the smallest y.
std::vector<int> lower_hull_frontier(const std::vector<XY>& points);

// Piecewise-linear interpolation along the frontier. Left of the first
// vertex returns its y; right of the last returns the minimum y.
double frontier_query(const std::vector<XY>& points, const std::vector<int>& hull, double x);

}  // namespace wzis
