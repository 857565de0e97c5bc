#include "fuel/sensor.hpp"

#include "fuel/raycast.hpp"

#include <cmath>

namespace fuel {

double wrapToPi(double angle) {
  angle = std::fmod(angle + M_PI, 2.0 * M_PI);
  if (angle < 0.0) angle += 2.0 * M_PI;
  return angle - M_PI;
}

bool insideFov(const SensorModel& sensor, const Eigen::Vector3d& from, double yaw,
               const Eigen::Vector3d& to) {
  const Eigen::Vector3d d = to - from;
  const double range = d.norm();
  if (range > sensor.max_range) return false;
  if (range < 1e-9) return true;
  const double azimuth = std::atan2(d.y(), d.x());
  if (std::abs(wrapToPi(azimuth - yaw)) > 0.5 * sensor.horizontal_fov) return false;
  const double elevation = std::atan2(d.z(), d.head<2>().norm());
  return std::abs(elevation) <= 0.5 * sensor.vertical_fov;
}

std::variant<ScanResult, ScanError> integrateScan(VoxelGrid& online, const VoxelGrid& truth,
                                                  const ScanPose& pose, const SensorModel& sensor) {
  const GridConfig& cfg = truth.config();
  const Eigen::Vector3i pose_idx = cfg.posToIndex(pose.position);
  if (!cfg.inBounds(pose_idx)) return ScanError::PoseOutOfBounds;
  if (!truth.isFree(pose_idx)) return ScanError::PoseNotFree;

  ScanResult result;
  auto commit = [&](const Eigen::Vector3i& idx, VoxelState s) {
    if (online.at(idx) == s) return;
    if (online.at(idx) != VoxelState::Unknown) return;  // never revert observed cells
    online.set(idx, s);
    result.changed.extend(idx);
    result.changed_cells.push_back(idx);
  };

  for (int ih = 0; ih < sensor.rays_h; ++ih) {
    const double azimuth =
        pose.yaw - 0.5 * sensor.horizontal_fov +
        sensor.horizontal_fov * (sensor.rays_h == 1 ? 0.5 : static_cast<double>(ih) / (sensor.rays_h - 1));
    for (int iv = 0; iv < sensor.rays_v; ++iv) {
      const double elevation =
          -0.5 * sensor.vertical_fov +
          sensor.vertical_fov * (sensor.rays_v == 1 ? 0.5 : static_cast<double>(iv) / (sensor.rays_v - 1));
      const Eigen::Vector3d dir(std::cos(elevation) * std::cos(azimuth),
                                std::cos(elevation) * std::sin(azimuth), std::sin(elevation));
      const Eigen::Vector3d end = pose.position + sensor.max_range * dir;
      raycastVisit(cfg, pose.position, end, [&](const Eigen::Vector3i& v) {
        if (truth.isOccupied(v)) {
          commit(v, VoxelState::Occupied);
          return false;
        }
        if (truth.isUnknown(v)) return false;  // opaque: never observed through
        commit(v, VoxelState::Free);
        return true;
      });
    }
  }
  return result;
}

}  // namespace fuel
