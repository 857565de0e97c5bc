#include "fuel/raycast.hpp"

namespace fuel {

std::vector<Eigen::Vector3i> raycast(const GridConfig& config, const Eigen::Vector3d& start,
                                     const Eigen::Vector3d& end) {
  std::vector<Eigen::Vector3i> out;
  raycastVisit(config, start, end, [&out](const Eigen::Vector3i& v) {
    out.push_back(v);
    return true;
  });
  return out;
}

}  // namespace fuel
