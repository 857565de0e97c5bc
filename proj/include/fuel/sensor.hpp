#pragma once

#include "fuel/grid.hpp"

#include <variant>

namespace fuel {

// Depth-camera-like scan pattern: a rays_h x rays_v bundle inside the
// yaw-centered horizontal FOV and the symmetric vertical FOV.
struct SensorModel {
  double horizontal_fov = 80.0 * M_PI / 180.0;
  double vertical_fov = 60.0 * M_PI / 180.0;
  double max_range = 4.5;
  int rays_h = 64;
  int rays_v = 48;
};

enum class ScanError { PoseOutOfBounds, PoseNotFree };

struct ScanPose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
};

struct ScanResult {
  Aabb changed;  // tight box of voxels whose online state changed
  std::vector<Eigen::Vector3i> changed_cells;
};

// Casts the sensor bundle through the truth map and commits the observed cells
// into the online map. Cells only ever transition Unknown -> Free/Occupied.
std::variant<ScanResult, ScanError> integrateScan(VoxelGrid& online, const VoxelGrid& truth,
                                                  const ScanPose& pose, const SensorModel& sensor);

// True when the direction from `from` to `to` falls inside the sensor cone
// centered on `yaw` (horizontal window plus vertical window) within max_range.
bool insideFov(const SensorModel& sensor, const Eigen::Vector3d& from, double yaw,
               const Eigen::Vector3d& to);

double wrapToPi(double angle);

}  // namespace fuel
