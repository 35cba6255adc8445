#pragma once

#include "dmp/common.hpp"
#include "dmp/grid.hpp"

namespace dmp {

// Procedural forest: circular trunks (infinite-height cylinders in 2D),
// placed by rejection sampling under a center-to-center spacing constraint.
struct ForestSpec {
  double extent_x = 40.0;  // m
  double extent_y = 40.0;
  int tree_count = 0;
  double radius_min = 0.15;  // m
  double radius_max = 0.35;
  double min_spacing = 1.0;  // m, center to center
  std::uint64_t seed = 0;
  double resolution = 0.25;  // m / voxel

  void validate() const {
    if (!(extent_x > 0.0) || !(extent_y > 0.0) || !(resolution > 0.0))
      throw std::invalid_argument("ForestSpec: extents and resolution must be > 0");
    if (tree_count < 0 || radius_min < 0.0 || radius_max < radius_min || min_spacing < 0.0)
      throw std::invalid_argument("ForestSpec: invalid obstacle parameters");
  }
};

struct Tree {
  double x, y, radius;
};

struct Forest {
  OccupancyGrid grid;
  std::vector<Tree> trees;
  double mean_corridor = 0.0;  // mean nearest-neighbor gap between trunk surfaces, m
};

inline double forest_mean_corridor(const std::vector<Tree>& trees) {
  if (trees.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < trees.size(); ++j) {
      if (i == j) continue;
      const double dx = trees[i].x - trees[j].x;
      const double dy = trees[i].y - trees[j].y;
      const double gap = std::sqrt(dx * dx + dy * dy) - trees[i].radius - trees[j].radius;
      nearest = std::min(nearest, gap);
    }
    total += nearest;
  }
  return total / static_cast<double>(trees.size());
}

inline Forest make_forest(const ForestSpec& spec) {
  spec.validate();
  Forest out;
  Vec origin = Vec::Zero(2);
  out.grid = OccupancyGrid::make(
      2, origin, spec.resolution,
      {static_cast<int>(std::ceil(spec.extent_x / spec.resolution)),
       static_cast<int>(std::ceil(spec.extent_y / spec.resolution)), 1});

  Rng rng(spec.seed);
  const long budget = 100l * std::max(1, spec.tree_count);
  long attempts = 0;
  while (static_cast<int>(out.trees.size()) < spec.tree_count) {
    if (attempts++ >= budget)
      throw PlacementError("make_forest: could not place " + std::to_string(spec.tree_count) +
                           " trees under the spacing constraint");
    Tree t;
    t.radius = rng.uniform(spec.radius_min, spec.radius_max);
    t.x = rng.uniform(t.radius, spec.extent_x - t.radius);
    t.y = rng.uniform(t.radius, spec.extent_y - t.radius);
    bool ok = true;
    for (const auto& other : out.trees) {
      const double dx = t.x - other.x, dy = t.y - other.y;
      if (dx * dx + dy * dy < spec.min_spacing * spec.min_spacing) {
        ok = false;
        break;
      }
    }
    if (ok) out.trees.push_back(t);
  }

  for (const auto& t : out.trees) {
    const int reach = static_cast<int>(std::ceil(t.radius / spec.resolution)) + 1;
    const auto c = out.grid.cell_of((Vec(2) << t.x, t.y).finished());
    if (out.grid.in_bounds(c[0], c[1])) out.grid.set_cell(c[0], c[1], 0, true);
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx) {
        const int ix = c[0] + dx, iy = c[1] + dy;
        if (!out.grid.in_bounds(ix, iy)) continue;
        const Vec center = out.grid.center_of({ix, iy, 0});
        const double ddx = center[0] - t.x, ddy = center[1] - t.y;
        if (ddx * ddx + ddy * ddy <= t.radius * t.radius) out.grid.set_cell(ix, iy, 0, true);
      }
  }
  out.mean_corridor = forest_mean_corridor(out.trees);
  return out;
}

// Two parallel walls open at both ends; the free channel of the given width
// runs along the chosen axis through the middle of the map.
struct CorridorSpec {
  double width = 1.0;           // m, free channel
  double wall_thickness = 1.0;  // m
  int axis = 0;                 // 0: corridor along x, 1: along y

  void validate() const {
    if (!(width > 0.0) || !(wall_thickness > 0.0) || (axis != 0 && axis != 1))
      throw std::invalid_argument("CorridorSpec: invalid");
  }
};

inline OccupancyGrid make_corridor(const CorridorSpec& spec, double extent_x, double extent_y,
                                   double resolution) {
  spec.validate();
  auto g = OccupancyGrid::make(2, Vec::Zero(2), resolution,
                               {static_cast<int>(std::ceil(extent_x / resolution)),
                                static_cast<int>(std::ceil(extent_y / resolution)), 1});
  const int cross_axis = 1 - spec.axis;
  const double mid =
      0.5 * g.dims[static_cast<std::size_t>(cross_axis)] * resolution;  // channel centerline
  for (int iy = 0; iy < g.dims[1]; ++iy)
    for (int ix = 0; ix < g.dims[0]; ++ix) {
      const Vec c = g.center_of({ix, iy, 0});
      const double off = std::abs(c[cross_axis] - mid);
      if (off > spec.width / 2.0 && off <= spec.width / 2.0 + spec.wall_thickness)
        g.set_cell(ix, iy, 0, true);
    }
  return g;
}

}  // namespace dmp
