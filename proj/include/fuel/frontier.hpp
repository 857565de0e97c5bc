#pragma once

#include "fuel/esdf.hpp"
#include "fuel/grid.hpp"
#include "fuel/limits.hpp"
#include "fuel/sensor.hpp"

#include <iosfwd>
#include <map>
#include <vector>

namespace fuel {

struct FrontierParams {
  int min_cluster_size = 10;          // groups smaller than this are ignored
  double pca_split_threshold = 0.15;  // m^2, largest covariance eigenvalue
  std::vector<double> cyl_radii = {1.0, 1.6, 2.2};
  int cyl_angles_per_ring = 12;
  std::vector<double> z_offsets = {0.0};
  int min_coverage = 15;   // cells a viewpoint must cover to qualify
  int max_viewpoints = 8;  // N_view
  double clearance = 0.5;  // m, minimum obstacle distance at a viewpoint
  int yaw_bins = 36;       // discrete yaw sweep resolution
};

struct Viewpoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;  // [-pi, pi)
  int coverage = 0;
};

constexpr double kUnreachableCost = 1e4;  // seconds, keeps the tour matrix finite

struct CostEntry {
  double t_lb = 0.0;         // seconds
  double path_length = 0.0;  // meters, +inf when no free path existed
};

struct FrontierCluster {
  int id = -1;
  int component = -1;  // region-growing group; siblings share it
  std::vector<Eigen::Vector3i> cells;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();  // mean of cell centers
  Aabb bbox;       // tight voxel box of cells
  Aabb influence;  // voxel box whose map changes can alter this cluster's viewpoints
  std::vector<Viewpoint> viewpoints;  // descending coverage, at most max_viewpoints
  std::map<int, CostEntry> costs;     // other active cluster id -> connection cost
  bool dormant = false;

  const Viewpoint& top() const { return viewpoints.front(); }
};

struct ChangeSet {
  std::vector<int> removed_ids;  // left the active set (deleted or went dormant)
  std::vector<int> new_ids;      // entered the active set or need fresh cost rows

  bool empty() const { return removed_ids.empty() && new_ids.empty(); }
};

// Known-free voxel with at least one unknown 6-neighbor; out-of-bounds
// neighbors do not count as unknown.
bool isFrontier(const VoxelGrid& grid, const Eigen::Vector3i& v);

// Recursive split along the first principal axis while the largest covariance
// eigenvalue exceeds the threshold. Cells on the splitting plane go to the
// non-negative side; the principal axis sign is canonicalized so the result is
// deterministic.
std::vector<std::vector<Eigen::Vector3i>> pcaSplit(const std::vector<Eigen::Vector3i>& cells,
                                                   double resolution, double threshold);

// Number of cluster cells within sensor range and FOV of (position, yaw) whose
// line of sight crosses no occupied voxel before the cell.
int coverage(const VoxelGrid& grid, const Eigen::Vector3d& position, double yaw,
             const std::vector<Eigen::Vector3i>& cells, const SensorModel& sensor);

// Cylindrical-pattern viewpoint sampling around the cluster centroid with an
// exhaustive discrete yaw sweep per surviving candidate.
std::vector<Viewpoint> generateViewpoints(const VoxelGrid& grid, const Esdf& esdf,
                                          const Eigen::Vector3d& centroid,
                                          const std::vector<Eigen::Vector3i>& cells,
                                          const SensorModel& sensor, const FrontierParams& params);

// max(translation time at v_max, shorter-arc yaw time at xi_dot_max).
double timeLowerBound(double yaw1, double yaw2, double path_length, const DynLimits& limits);

// Incrementally maintained frontier information structure.
class FrontierRegistry {
 public:
  FrontierRegistry(const GridConfig& config, const FrontierParams& params, const SensorModel& sensor,
                   const DynLimits& limits);

  // Structural update for the map change box returned by a scan: removes
  // clusters that stopped being frontier, grows/splits new ones, regenerates
  // viewpoints whose surroundings changed, and flags clusters whose connection
  // costs must be recomputed. Does not touch cost lists.
  //
  // The ScanResult form knows which cells became free and uses a shortest-path
  // flood from them to decide precisely which stored connection costs may have
  // shortened; the box-only form conservatively treats every free cell in the
  // box as fresh.
  ChangeSet detectAndUpdate(const VoxelGrid& grid, const ScanResult& scan, const Esdf& esdf);
  ChangeSet detectAndUpdate(const VoxelGrid& grid, const Aabb& updated, const Esdf& esdf);

  // Applies a ChangeSet to the cost lists: erases rows of departed clusters and
  // computes symmetric entries for every flagged cluster via A* between top
  // viewpoints.
  void updateCosts(const VoxelGrid& grid, const ChangeSet& change);

  // detectAndUpdate followed by updateCosts.
  ChangeSet observe(const VoxelGrid& grid, const ScanResult& scan, const Esdf& esdf);
  ChangeSet observe(const VoxelGrid& grid, const Aabb& updated, const Esdf& esdf);

  const std::map<int, FrontierCluster>& clusters() const { return clusters_; }
  std::vector<int> activeIds() const;
  size_t activeCount() const;
  size_t dormantCount() const;

  const FrontierParams& params() const { return params_; }
  const DynLimits& limits() const { return limits_; }
  const SensorModel& sensor() const { return sensor_; }

  // Counters for complexity assertions.
  size_t astarCallsTotal() const { return astar_calls_total_; }
  size_t lastAstarCalls() const { return last_astar_calls_; }
  size_t lastKNew() const { return last_k_new_; }

  // One CSV row per cluster: id, cells, centroid, bbox, top viewpoint, costs.
  void writeDebugCsv(std::ostream& os) const;

 private:
  Aabb influenceBox(const FrontierCluster& cluster) const;
  void regenerateViewpoints(FrontierCluster& cluster, const VoxelGrid& grid, const Esdf& esdf);
  ChangeSet update(const VoxelGrid& grid, const Aabb& updated,
                   const std::vector<Eigen::Vector3i>& fresh_free, const Esdf& esdf);

  GridConfig config_;
  FrontierParams params_;
  SensorModel sensor_;
  DynLimits limits_;

  std::map<int, FrontierCluster> clusters_;
  std::vector<int32_t> owner_;  // voxel address -> owning cluster id, -1 if none
  std::vector<uint32_t> visit_stamp_;
  uint32_t visit_epoch_ = 0;
  int next_id_ = 0;
  int next_component_ = 0;

  size_t astar_calls_total_ = 0;
  size_t last_astar_calls_ = 0;
  size_t last_k_new_ = 0;
};

}  // namespace fuel
