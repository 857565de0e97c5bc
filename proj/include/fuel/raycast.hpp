#pragma once

#include "fuel/grid.hpp"

#include <vector>

namespace fuel {

// Exact voxel traversal of the segment [start, end] (Amanatides & Woo stepping).
// Emits every voxel the segment passes through, in order, truncated at the grid
// boundary. A zero-length segment yields the single containing voxel.
// Precondition: start is in bounds.
std::vector<Eigen::Vector3i> raycast(const GridConfig& config, const Eigen::Vector3d& start,
                                     const Eigen::Vector3d& end);

// Callback form used by hot loops; returning false stops the walk early.
template <typename Fn>
void raycastVisit(const GridConfig& config, const Eigen::Vector3d& start, const Eigen::Vector3d& end,
                  Fn&& visit);

namespace detail {

struct RayWalk {
  Eigen::Vector3i cur;
  Eigen::Vector3i step;
  Eigen::Vector3d t_max;
  Eigen::Vector3d t_delta;
  double t_end = 1.0;
  double t = 0.0;
  bool done = false;

  RayWalk(const GridConfig& config, const Eigen::Vector3d& start, const Eigen::Vector3d& end) {
    const Eigen::Vector3d s = (start - config.origin) / config.resolution;
    const Eigen::Vector3d e = (end - config.origin) / config.resolution;
    const Eigen::Vector3d d = e - s;
    cur = config.posToIndex(start);
    for (int i = 0; i < 3; ++i) {
      if (d[i] > 0.0) {
        step[i] = 1;
        t_delta[i] = 1.0 / d[i];
        t_max[i] = (static_cast<double>(cur[i]) + 1.0 - s[i]) / d[i];
      } else if (d[i] < 0.0) {
        step[i] = -1;
        t_delta[i] = -1.0 / d[i];
        t_max[i] = (static_cast<double>(cur[i]) - s[i]) / d[i];
      } else {
        step[i] = 0;
        t_delta[i] = std::numeric_limits<double>::infinity();
        t_max[i] = std::numeric_limits<double>::infinity();
      }
    }
  }

  // Advances to the next voxel; false when the segment ends or leaves the grid.
  bool advance(const GridConfig& config) {
    int axis = 0;
    if (t_max.y() < t_max.x()) axis = 1;
    if (t_max.z() < t_max[axis]) axis = 2;
    if (t_max[axis] > t_end) return false;
    t = t_max[axis];
    cur[axis] += step[axis];
    t_max[axis] += t_delta[axis];
    return config.inBounds(cur);
  }
};

}  // namespace detail

template <typename Fn>
void raycastVisit(const GridConfig& config, const Eigen::Vector3d& start, const Eigen::Vector3d& end,
                  Fn&& visit) {
  detail::RayWalk walk(config, start, end);
  if (!visit(walk.cur)) return;
  while (walk.advance(config))
    if (!visit(walk.cur)) return;
}

}  // namespace fuel
