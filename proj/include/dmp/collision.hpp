#pragma once

#include <optional>

#include "dmp/grid.hpp"
#include "dmp/trajectory.hpp"

namespace dmp {

struct CollisionCheck {
  bool free = true;
  double first_collision_time = 0.0;  // valid when !free
};

// Samples the position at steps of dt_check plus both endpoints; free iff
// every sample lands in a free in-bounds voxel. Halving dt_check only adds
// sample times, so a collision found at dt_check persists at dt_check / 2.
inline CollisionCheck is_trajectory_free(const OccupancyGrid& grid, const Trajectory& traj,
                                         double dt_check) {
  if (!(dt_check > 0.0)) throw std::invalid_argument("is_trajectory_free: dt_check must be > 0");
  if (traj.empty()) return {true, 0.0};
  const double T = traj.total_duration();
  const int dim = traj.dim();

  const auto& segments = traj.segments();
  std::size_t seg = 0;
  double seg_start = 0.0;

  double pos[3] = {0.0, 0.0, 0.0};
  Vec p(dim);
  const auto sample_occupied = [&](double t) {
    while (seg + 1 < segments.size() && t > seg_start + segments[seg].duration) {
      seg_start += segments[seg].duration;
      ++seg;
    }
    const double local = std::clamp(t - seg_start, 0.0, segments[seg].duration);
    const auto& coeffs = segments[seg].coeffs;
    for (int axis = 0; axis < dim; ++axis) {
      double v = coeffs(axis, 5);
      for (int k = 4; k >= 0; --k) v = v * local + coeffs(axis, k);
      pos[axis] = v;
    }
    for (int axis = 0; axis < dim; ++axis) p[axis] = pos[axis];
    return grid.occupied_world(p);
  };

  double t = 0.0;
  while (t < T) {
    if (sample_occupied(t)) return {false, t};
    t += dt_check;
  }
  if (sample_occupied(T)) return {false, T};
  return {true, 0.0};
}

}  // namespace dmp
