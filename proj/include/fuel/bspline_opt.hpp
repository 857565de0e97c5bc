#pragma once

#include "fuel/bspline.hpp"
#include "fuel/esdf.hpp"
#include "fuel/limits.hpp"

#include <vector>

namespace fuel {

struct OptimizerWeights {
  double w_s_p = 1.0;       // positional smoothness
  double w_s_xi = 0.5;      // yaw smoothness
  double w_t = 2.0;         // total time
  double lambda_c = 10.0;   // clearance penalty
  double lambda_d = 10.0;   // velocity/acceleration penalty
  double lambda_bs = 100.0; // boundary-state penalty
  double d_min = 0.5;       // meters
};

struct BoundaryState {
  Eigen::Vector4d x0 = Eigen::Vector4d::Zero();    // start pose (x, y, z, yaw)
  Eigen::Vector4d xd0 = Eigen::Vector4d::Zero();   // start velocity and yaw rate
  Eigen::Vector4d xdd0 = Eigen::Vector4d::Zero();  // start acceleration
  Eigen::Vector4d x_next = Eigen::Vector4d::Zero();  // target pose at the end
};

// One-sided quadratic: (t1 - t2)^2 when t1 <= t2, else 0; second value is the
// derivative with respect to t1.
std::pair<double, double> penalty(double tau1, double tau2);

// Weighted cost contributions; they sum to the optimized objective.
struct CostTerms {
  double smoothness = 0.0;
  double time = 0.0;
  double collision = 0.0;
  double feasibility = 0.0;
  double boundary = 0.0;

  double total() const { return smoothness + time + collision + feasibility + boundary; }
};

struct CostGradient {
  std::vector<Eigen::Vector4d> ctrl;
  double knot_span = 0.0;
};

// Full objective over control points and knot span with analytic gradients.
CostTerms totalCost(const std::vector<Eigen::Vector4d>& ctrl, double knot_span, const Esdf& esdf,
                    const DynLimits& limits, const OptimizerWeights& weights,
                    const BoundaryState& boundary, CostGradient* grad = nullptr);

struct FeasibilityReport {
  bool ok = false;
  double min_clearance = 0.0;  // over position control points
  double max_vel = 0.0;        // worst per-axis |velocity| control point
  double max_acc = 0.0;
  double max_yaw_rate = 0.0;
  double max_yaw_acc = 0.0;
  int worst_clearance_index = -1;
  int worst_vel_index = -1;
  int worst_acc_index = -1;
};

// Control-point checks backed by the convex hull property: clearance at
// position control points, per-axis velocity/acceleration control points
// within limits.
FeasibilityReport checkFeasibility(const UniformBSpline& spline, const Esdf& esdf,
                                   const DynLimits& limits, double d_min);

// Arc-length resampling of a path into control points with linearly
// interpolated yaw along the shorter wrap direction.
UniformBSpline initializeFromPath(const std::vector<Eigen::Vector3d>& path, double yaw_start,
                                  double yaw_goal, const DynLimits& limits);

struct OptReport {
  CostTerms terms;
  int iterations = 0;
  bool converged = false;
  int escalations = 0;
  FeasibilityReport feasibility;
  std::vector<std::vector<double>> cost_histories;  // one per escalation round
};

struct SolverSettings {
  double grad_tolerance = 1e-4;
  double cost_rel_tolerance = 1e-6;
};

// Quasi-Newton minimization over all control points and the log-knot-span;
// infeasible results escalate the collision/dynamic penalties (x10, up to 3
// times) and re-optimize.
std::pair<UniformBSpline, OptReport> optimize(const UniformBSpline& init, const Esdf& esdf,
                                              const DynLimits& limits, const OptimizerWeights& weights,
                                              const BoundaryState& boundary, int budget = 150,
                                              const SolverSettings& solver = {});

}  // namespace fuel
