#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

namespace fuel {

enum class VoxelState : uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

// Axis-aligned box of voxel indices, inclusive on both ends.
struct Aabb {
  Eigen::Vector3i min{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
                      std::numeric_limits<int>::max()};
  Eigen::Vector3i max{std::numeric_limits<int>::min(), std::numeric_limits<int>::min(),
                      std::numeric_limits<int>::min()};

  bool empty() const { return min.x() > max.x() || min.y() > max.y() || min.z() > max.z(); }

  void extend(const Eigen::Vector3i& idx) {
    min = min.cwiseMin(idx);
    max = max.cwiseMax(idx);
  }

  void extend(const Aabb& other) {
    if (other.empty()) return;
    min = min.cwiseMin(other.min);
    max = max.cwiseMax(other.max);
  }

  bool contains(const Eigen::Vector3i& idx) const {
    return !empty() && (idx.array() >= min.array()).all() && (idx.array() <= max.array()).all();
  }

  bool intersects(const Aabb& other) const {
    if (empty() || other.empty()) return false;
    return (min.array() <= other.max.array()).all() && (max.array() >= other.min.array()).all();
  }

  Aabb inflated(int r) const {
    if (empty()) return *this;
    Aabb out;
    out.min = min - Eigen::Vector3i::Constant(r);
    out.max = max + Eigen::Vector3i::Constant(r);
    return out;
  }

  Aabb clamped(const Eigen::Vector3i& dims) const {
    if (empty()) return *this;
    Aabb out;
    out.min = min.cwiseMax(Eigen::Vector3i::Zero());
    out.max = max.cwiseMin(dims - Eigen::Vector3i::Ones());
    return out;
  }
};

// Geometry of a dense voxel grid: world origin, edge length, voxel counts.
struct GridConfig {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double resolution = 0.1;
  Eigen::Vector3i dims = Eigen::Vector3i::Ones();

  size_t voxelCount() const {
    return static_cast<size_t>(dims.x()) * static_cast<size_t>(dims.y()) *
           static_cast<size_t>(dims.z());
  }

  bool inBounds(const Eigen::Vector3i& idx) const {
    return (idx.array() >= 0).all() && (idx.array() < dims.array()).all();
  }

  bool inBounds(const Eigen::Vector3d& pos) const { return inBounds(posToIndex(pos)); }

  Eigen::Vector3i posToIndex(const Eigen::Vector3d& pos) const {
    Eigen::Vector3d rel = (pos - origin) / resolution;
    return Eigen::Vector3i(static_cast<int>(std::floor(rel.x())),
                           static_cast<int>(std::floor(rel.y())),
                           static_cast<int>(std::floor(rel.z())));
  }

  // Voxel center of index.
  Eigen::Vector3d indexToPos(const Eigen::Vector3i& idx) const {
    return origin + (idx.cast<double>() + Eigen::Vector3d::Constant(0.5)) * resolution;
  }

  // x-fastest linear addressing.
  size_t linear(const Eigen::Vector3i& idx) const {
    return static_cast<size_t>(idx.x()) +
           static_cast<size_t>(dims.x()) *
               (static_cast<size_t>(idx.y()) + static_cast<size_t>(dims.y()) * static_cast<size_t>(idx.z()));
  }

  Eigen::Vector3i delinear(size_t adr) const {
    const size_t nx = static_cast<size_t>(dims.x());
    const size_t ny = static_cast<size_t>(dims.y());
    return Eigen::Vector3i(static_cast<int>(adr % nx), static_cast<int>((adr / nx) % ny),
                           static_cast<int>(adr / (nx * ny)));
  }

  Eigen::Vector3d worldMin() const { return origin; }
  Eigen::Vector3d worldMax() const { return origin + dims.cast<double>() * resolution; }
};

class VoxelGrid {
 public:
  VoxelGrid() = default;
  explicit VoxelGrid(const GridConfig& config, VoxelState fill = VoxelState::Unknown)
      : config_(config), states_(config.voxelCount(), fill) {}

  const GridConfig& config() const { return config_; }

  VoxelState at(const Eigen::Vector3i& idx) const { return states_[config_.linear(idx)]; }
  VoxelState at(size_t adr) const { return states_[adr]; }
  void set(const Eigen::Vector3i& idx, VoxelState s) { states_[config_.linear(idx)] = s; }

  bool isFree(const Eigen::Vector3i& idx) const { return at(idx) == VoxelState::Free; }
  bool isOccupied(const Eigen::Vector3i& idx) const { return at(idx) == VoxelState::Occupied; }
  bool isUnknown(const Eigen::Vector3i& idx) const { return at(idx) == VoxelState::Unknown; }

  size_t countState(VoxelState s) const;

  const std::vector<VoxelState>& states() const { return states_; }
  std::vector<VoxelState>& states() { return states_; }

 private:
  GridConfig config_;
  std::vector<VoxelState> states_;
};

// Snapshot export: one text line per z-slice ('?' unknown, '.' free, '#' occupied),
// x-fastest within the line.
void writeAsciiSlices(const VoxelGrid& grid, std::ostream& os);

// Binary dump: text header "nx ny nz resolution ox oy oz\n", then one byte per
// voxel in x-fastest order.
void writeBinary(const VoxelGrid& grid, std::ostream& os);
VoxelGrid readBinary(std::istream& is);

}  // namespace fuel
