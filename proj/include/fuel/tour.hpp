#pragma once

#include "fuel/frontier.hpp"
#include "fuel/grid.hpp"
#include "fuel/limits.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fuel {

struct PlannerParams {
  double w_c = 1.5;           // motion-consistency weight on start edges
  double refine_radius = 5.0;  // R_rf, meters
  int exact_atsp_limit = 12;   // Held-Karp up to this cluster count
  int two_opt_rounds = 3;      // improvement rounds in heuristic mode
};

struct CurrentState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

// (n+1)^2 seconds matrix: node 0 is the current viewpoint, nodes 1..n the
// active clusters; column 0 is zero so closed tours reduce to open ones.
struct CostMatrix {
  int n = 0;
  Eigen::MatrixXd m;
  std::vector<int> cluster_ids;  // node k (k >= 1) -> cluster_ids[k - 1]
};

struct Tour {
  std::vector<int> order;  // active cluster ids, visited after the start node
  double cost = 0.0;       // sum of matrix entries along 0 -> order
};

struct RefinedTour {
  std::vector<int> cluster_ids;
  std::vector<Viewpoint> viewpoints;  // one chosen viewpoint per cluster
  double cost = 0.0;
};

// Angle between the current velocity and the direction to p; zero when either
// vector is degenerate.
double consistencyCost(const Eigen::Vector3d& p0, const Eigen::Vector3d& v0,
                       const Eigen::Vector3d& p);

// Assembles the tour matrix from registry cost lists (cluster block) and
// A*-based start costs with the consistency term (row 0).
// Throws std::runtime_error when an active pair lacks a registry cost entry.
CostMatrix buildCostMatrix(const FrontierRegistry& registry, const VoxelGrid& grid,
                           const CurrentState& state, const DynLimits& limits,
                           const PlannerParams& params);
CostMatrix buildCostMatrix(const std::map<int, FrontierCluster>& clusters, const VoxelGrid& grid,
                           const CurrentState& state, const DynLimits& limits,
                           const PlannerParams& params);

// Open tour from node 0: exact Held-Karp up to exact_atsp_limit, otherwise
// nearest-neighbor construction plus asymmetric-safe Or-opt/2-opt rounds.
Tour solveAtsp(const CostMatrix& matrix, const PlannerParams& params);

// Chooses one viewpoint per cluster on the tour prefix within refine_radius
// (at least one cluster) by shortest path through the layered viewpoint graph;
// straight-line lengths feed the time lower bounds inside the refinement.
RefinedTour refineLocal(const Tour& tour, const FrontierRegistry& registry,
                        const CurrentState& state, const DynLimits& limits,
                        const PlannerParams& params);
RefinedTour refineLocal(const Tour& tour, const std::map<int, FrontierCluster>& clusters,
                        const CurrentState& state, const DynLimits& limits,
                        const PlannerParams& params);

// Eq-style objective of a concrete viewpoint selection over the same layered
// segment; used to compare refined selections against alternatives.
double refinementCost(const std::vector<Viewpoint>& selection, const Viewpoint* anchor,
                      const CurrentState& state, const DynLimits& limits,
                      const PlannerParams& params);

}  // namespace fuel
