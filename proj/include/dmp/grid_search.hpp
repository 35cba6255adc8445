#pragma once

#include <queue>

#include "dmp/grid.hpp"

namespace dmp {

struct GridPath {
  bool found = false;
  std::vector<Vec> points;  // cell centers, start first
  double cost = 0.0;        // metres
};

// Octile-optimal 8-connected shortest path on a 2D grid; the global planner.
// Diagonal steps are blocked when either orthogonal neighbor is occupied, so
// paths never cut corners.
inline GridPath global_plan(const OccupancyGrid& grid, const Vec& start_pos, const Vec& goal_pos) {
  if (grid.dim != 2) throw std::invalid_argument("global_plan: 2D grids only");
  GridPath result;
  const auto s = grid.cell_of(start_pos);
  const auto g = grid.cell_of(goal_pos);
  if (!grid.in_bounds(s[0], s[1]) || grid.occupied_cell(s[0], s[1])) return result;
  if (!grid.in_bounds(g[0], g[1]) || grid.occupied_cell(g[0], g[1])) return result;

  const double res = grid.resolution;
  const double kDiag = std::sqrt(2.0);
  const auto h = [&](int ix, int iy) {
    const double dx = std::abs(ix - g[0]);
    const double dy = std::abs(iy - g[1]);
    return res * (std::max(dx, dy) - std::min(dx, dy) + kDiag * std::min(dx, dy));
  };

  const int nx = grid.dims[0], ny = grid.dims[1];
  const auto id = [&](int ix, int iy) { return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix); };
  std::vector<double> best(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny),
                           std::numeric_limits<double>::infinity());
  std::vector<int> parent(best.size(), -1);
  std::vector<char> closed(best.size(), 0);

  struct Entry {
    double f;
    double g;
    std::uint64_t seq;
    int ix, iy;
  };
  struct Order {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.f != b.f) return a.f > b.f;
      if (a.g != b.g) return a.g < b.g;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Order> open;
  std::uint64_t seq = 0;

  best[id(s[0], s[1])] = 0.0;
  open.push({h(s[0], s[1]), 0.0, seq++, s[0], s[1]});
  static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};

  while (!open.empty()) {
    const auto e = open.top();
    open.pop();
    const std::size_t eid = id(e.ix, e.iy);
    if (closed[eid]) continue;
    closed[eid] = 1;
    if (e.ix == g[0] && e.iy == g[1]) {
      result.found = true;
      result.cost = e.g;
      std::vector<std::array<int, 2>> cells;
      int cx = e.ix, cy = e.iy;
      while (true) {
        cells.push_back({cx, cy});
        const int p = parent[id(cx, cy)];
        if (p < 0) break;
        cx = p % nx;
        cy = p / nx;
      }
      std::reverse(cells.begin(), cells.end());
      for (const auto& c : cells) result.points.push_back(grid.center_of({c[0], c[1], 0}));
      return result;
    }
    for (int k = 0; k < 8; ++k) {
      const int ix = e.ix + dx8[k], iy = e.iy + dy8[k];
      if (!grid.in_bounds(ix, iy) || grid.occupied_cell(ix, iy)) continue;
      if (k >= 4 && (grid.occupied_cell(e.ix, iy) || grid.occupied_cell(ix, e.iy))) continue;
      const double step = res * (k >= 4 ? kDiag : 1.0);
      const double g2 = e.g + step;
      const std::size_t nid = id(ix, iy);
      if (closed[nid] || g2 >= best[nid]) continue;
      best[nid] = g2;
      parent[nid] = static_cast<int>(eid);
      open.push({g2 + h(ix, iy), g2, seq++, ix, iy});
    }
  }
  return result;
}

}  // namespace dmp
