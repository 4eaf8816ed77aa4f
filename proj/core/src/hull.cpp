#include "wzis/hull.hpp"

#include <algorithm>

#include "wzis/error.hpp"

namespace wzis {

std::vector<int> lower_hull_frontier(const std::vector<XY>& points) {
  require(!points.empty(), ErrorCode::kEmptyGrid, "hull of empty point set");
  std::vector<int> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& pa = points[static_cast<std::size_t>(a)];
    const auto& pb = points[static_cast<std::size_t>(b)];
    if (pa.x != pb.x) return pa.x < pb.x;
    if (pa.y != pb.y) return pa.y < pb.y;
    return a < b;
  });
  // Keep only the lowest point at each x.
  std::vector<int> uniq;
  for (int idx : order) {
    if (!uniq.empty() &&
        points[static_cast<std::size_t>(uniq.back())].x == points[static_cast<std::size_t>(idx)].x)
      continue;
    uniq.push_back(idx);
  }
  // Monotone-chain lower hull.
  std::vector<int> hull;
  auto cross = [&](int o, int a, int b) {
    const auto& po = points[static_cast<std::size_t>(o)];
    const auto& pa = points[static_cast<std::size_t>(a)];
    const auto& pb = points[static_cast<std::size_t>(b)];
    return (pa.x - po.x) * (pb.y - po.y) - (pa.y - po.y) * (pb.x - po.x);
  };
  for (int idx : uniq) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), idx) <= 0.0)
      hull.pop_back();
    hull.push_back(idx);
  }
  // Truncate the ascending tail after the global minimum-y vertex.
  std::size_t best = 0;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    if (points[static_cast<std::size_t>(hull[i])].y <
        points[static_cast<std::size_t>(hull[best])].y)
      best = i;
  }
  hull.resize(best + 1);
  return hull;
}

double frontier_query(const std::vector<XY>& points, const std::vector<int>& hull, double x) {
  require(!hull.empty(), ErrorCode::kEmptyGrid, "query on empty hull");
  const auto& first = points[static_cast<std::size_t>(hull.front())];
  if (x <= first.x) return first.y;
  const auto& last = points[static_cast<std::size_t>(hull.back())];
  if (x >= last.x) return last.y;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const auto& a = points[static_cast<std::size_t>(hull[i - 1])];
    const auto& b = points[static_cast<std::size_t>(hull[i])];
    if (x <= b.x) {
      const double t = (x - a.x) / (b.x - a.x);
      return a.y + t * (b.y - a.y);
    }
  }
  return last.y;
}

}  // namespace wzis
