#pragma once

#include "fuel/grid.hpp"

#include <vector>

namespace fuel {

enum class PathStatus { Ok, StartNotFree, Unreachable };

struct PathResult {
  PathStatus status = PathStatus::Unreachable;
  // Exact start, voxel centers along the grid path, exact goal.
  std::vector<Eigen::Vector3d> points;
  double length = 0.0;

  bool ok() const { return status == PathStatus::Ok; }
};

// Shortest 26-connected path through Free voxels (Unknown and Occupied block),
// Euclidean edge weights, plus straight-line snap from/to the exact endpoints.
// Thread-safe: per-thread search workspace.
PathResult astar(const VoxelGrid& grid, const Eigen::Vector3d& start, const Eigen::Vector3d& goal);

// Polyline length helper for path post-processing.
double pathLength(const std::vector<Eigen::Vector3d>& points);

}  // namespace fuel
