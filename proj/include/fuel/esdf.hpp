#pragma once

#include "fuel/grid.hpp"

#include <vector>

namespace fuel {

// Unsigned distance field: meters to the nearest obstacle voxel center, clamped
// to a cap, zero on obstacle voxels.
class Esdf {
 public:
  Esdf() = default;
  Esdf(const GridConfig& config, double cap) : config_(config), cap_(cap), dist_(config.voxelCount(), cap) {}

  const GridConfig& config() const { return config_; }
  double cap() const { return cap_; }

  double at(const Eigen::Vector3i& idx) const { return dist_[config_.linear(idx)]; }
  double& at(const Eigen::Vector3i& idx) { return dist_[config_.linear(idx)]; }

  const std::vector<double>& values() const { return dist_; }
  std::vector<double>& values() { return dist_; }

 private:
  GridConfig config_;
  double cap_ = 0.0;
  std::vector<double> dist_;
};

// Exact Euclidean distance transform (separable lower-envelope passes) from the
// obstacle set, clamped to cap. Unknown voxels count as obstacles when
// unknown_as_occupied is set.
Esdf computeEsdf(const VoxelGrid& grid, double cap, bool unknown_as_occupied = true);

struct EsdfSample {
  double distance = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
};

// Trilinear interpolation over voxel centers with its analytic gradient.
// Positions outside the interpolation lattice are clamped to it.
EsdfSample esdfQuery(const Esdf& esdf, const Eigen::Vector3d& p);

}  // namespace fuel
