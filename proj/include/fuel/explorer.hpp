#pragma once

#include "fuel/bspline.hpp"
#include "fuel/scenario.hpp"

#include <string>
#include <vector>

namespace fuel {

enum class PlannerKind { Fuel, Greedy };

struct VehicleState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double t = 0.0;  // mission clock, seconds
};

struct StageTimings {
  double map_ms = 0.0;
  double frontier_ms = 0.0;
  double matrix_ms = 0.0;
  double solver_ms = 0.0;
  double refine_ms = 0.0;
  double traj_ms = 0.0;
};

struct ReplanRecord {
  double t = 0.0;
  int n_clusters = 0;
  StageTimings timings;
  double tour_cost = 0.0;
  double traj_duration = 0.0;
  double coverage = 0.0;
  std::vector<int> tour_order;
  std::vector<int> refined_ids;
  bool fallback = false;
  const char* trigger = "";  // "change", "exhausted" or "forced"
};

struct MissionMetrics {
  double elapsed = 0.0;          // mission seconds
  double flight_distance = 0.0;  // meters
  double coverage = 0.0;         // fraction of the reachable-observable set
  int replan_count = 0;
  int collision_count = 0;
  int scan_count = 0;
  int changeset_count = 0;  // scans that changed the frontier structure
  bool complete = false;    // terminated with zero active clusters
  StageTimings totals;
};

struct MissionResult {
  MissionMetrics metrics;
  std::vector<ReplanRecord> replans;
  std::string events;         // line-delimited deterministic event log
  std::string planner_trace;  // one record per replan
  VoxelGrid online;           // final online map
  std::vector<Eigen::Matrix<double, 5, 1>> flown;  // (t, x, y, z, yaw) samples
};

// Truth cells the vehicle could ever observe: free cells flood-fill-reachable
// from the start plus occupied cells with a clear, in-FOV sight line from some
// reachable free cell within sensor range.
std::vector<uint8_t> reachableObservable(const VoxelGrid& truth, const Eigen::Vector3d& start,
                                         const SensorModel& sensor);

// Kinematic step along the active trajectory; flags a collision when the
// segment from the old to new position crosses an occupied truth voxel.
VehicleState advance(const VehicleState& vehicle, const UniformBSpline& spline, double traj_start,
                     double dt, const VoxelGrid& truth, bool* collision);

// Closed sense -> update -> plan -> advance loop until no active cluster
// remains or a cap is hit. The reachable-observable set may be precomputed
// and shared across runs of the same truth map.
MissionResult runMission(const Scenario& scenario, PlannerKind kind,
                         double wall_clock_cap_s = 1e18,
                         const std::vector<uint8_t>* ro_precomputed = nullptr);

// CSV headers are stable; see README for the output layout.
void writeMetricsCsv(const MissionResult& result, std::ostream& os);
void writeSummary(const MissionResult& result, PlannerKind kind, const Scenario& scenario,
                  std::ostream& os);
void writeFlownCsv(const MissionResult& result, std::ostream& os);

}  // namespace fuel
