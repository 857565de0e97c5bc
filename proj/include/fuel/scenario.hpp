#pragma once

#include "fuel/bspline_opt.hpp"
#include "fuel/frontier.hpp"
#include "fuel/grid.hpp"
#include "fuel/limits.hpp"
#include "fuel/sensor.hpp"
#include "fuel/tour.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fuel {

struct ObstacleBox {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
};

struct ObstacleCylinder {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
};

struct MissionParams {
  double control_period = 0.1;     // seconds
  double scan_period = 0.2;        // seconds (5 Hz)
  double replan_cooldown = 0.2;    // minimum seconds between replans
  double mission_time_cap = 600.0;  // mission seconds before giving up
  int optimizer_budget = 150;      // iterations per optimization round
};

// Scenario parse/validation failure with a field-specific message.
struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct Scenario {
  int schema = 1;
  std::string name;
  GridConfig grid;
  ScanPose start;
  SensorModel sensor;
  std::vector<ObstacleBox> boxes;
  std::vector<ObstacleCylinder> cylinders;
  std::string occupancy_file;  // alternative to primitives
  bool closed_shell = true;    // occupy the outermost voxel shell
  bool start_known = false;    // begin with the truth map fully known
  uint64_t seed = 0;

  FrontierParams frontier;
  PlannerParams planner;
  DynLimits limits;
  OptimizerWeights weights;
  MissionParams mission;

  VoxelGrid truth;  // rasterized at load time
};

// Parses, applies defaults, rasterizes primitives (or loads the occupancy
// file) and validates. Throws ScenarioError naming the offending field.
Scenario loadScenario(const std::string& path);
Scenario parseScenario(const std::string& json_text, const std::string& base_dir);

// FUEL_<NAME> environment overrides for every numeric parameter.
void applyEnvOverrides(Scenario& scenario);

// Echo of every resolved parameter, for run metadata.
void writeResolvedParams(const Scenario& scenario, std::ostream& os);

}  // namespace fuel
