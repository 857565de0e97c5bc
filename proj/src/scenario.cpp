#include "fuel/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fuel {

using nlohmann::json;

namespace {

double degToRad(double deg) { return deg * M_PI / 180.0; }

json requireObject(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ScenarioError(key + ": missing required field");
  if (!j.at(key).is_object()) throw ScenarioError(key + ": expected an object");
  return j.at(key);
}

Eigen::Vector3d parseVec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ScenarioError(field + ": expected [x, y, z]");
  for (const auto& v : j)
    if (!v.is_number()) throw ScenarioError(field + ": expected numeric components");
  return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

double getNumber(const json& j, const std::string& key, double fallback,
                 const std::string& scope) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ScenarioError(scope + key + ": expected a number");
  return j.at(key).get<double>();
}

int getInt(const json& j, const std::string& key, int fallback, const std::string& scope) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ScenarioError(scope + key + ": expected an integer");
  return j.at(key).get<int>();
}

std::vector<double> getNumberList(const json& j, const std::string& key,
                                  std::vector<double> fallback, const std::string& scope) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_array() || j.at(key).empty())
    throw ScenarioError(scope + key + ": expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ScenarioError(scope + key + ": expected numeric entries");
    out.push_back(v.get<double>());
  }
  return out;
}

void rasterize(Scenario& s) {
  const GridConfig& cfg = s.grid;
  s.truth = VoxelGrid(cfg, VoxelState::Free);

  if (s.closed_shell) {
    for (int z = 0; z < cfg.dims.z(); ++z)
      for (int y = 0; y < cfg.dims.y(); ++y)
        for (int x = 0; x < cfg.dims.x(); ++x)
          if (x == 0 || y == 0 || z == 0 || x == cfg.dims.x() - 1 || y == cfg.dims.y() - 1 ||
              z == cfg.dims.z() - 1)
            s.truth.set(Eigen::Vector3i(x, y, z), VoxelState::Occupied);
  }

  const Eigen::Vector3d lo = cfg.worldMin();
  const Eigen::Vector3d hi = cfg.worldMax();
  for (size_t i = 0; i < s.boxes.size(); ++i) {
    const ObstacleBox& b = s.boxes[i];
    if ((b.min.array() > b.max.array()).any())
      throw ScenarioError("obstacles[" + std::to_string(i) + "]: box min exceeds max");
    if ((b.min.array() < lo.array() - 1e-9).any() || (b.max.array() > hi.array() + 1e-9).any())
      throw ScenarioError("obstacles[" + std::to_string(i) + "]: box outside grid bounds");
  }
  for (size_t i = 0; i < s.cylinders.size(); ++i) {
    const ObstacleCylinder& c = s.cylinders[i];
    if (c.radius <= 0.0)
      throw ScenarioError("cylinders[" + std::to_string(i) + "]: radius must be positive");
    if (c.z_min > c.z_max)
      throw ScenarioError("cylinders[" + std::to_string(i) + "]: z_min exceeds z_max");
    if (c.center.x() - c.radius < lo.x() - 1e-9 || c.center.x() + c.radius > hi.x() + 1e-9 ||
        c.center.y() - c.radius < lo.y() - 1e-9 || c.center.y() + c.radius > hi.y() + 1e-9 ||
        c.z_min < lo.z() - 1e-9 || c.z_max > hi.z() + 1e-9)
      throw ScenarioError("cylinders[" + std::to_string(i) + "]: outside grid bounds");
  }

  for (int z = 0; z < cfg.dims.z(); ++z)
    for (int y = 0; y < cfg.dims.y(); ++y)
      for (int x = 0; x < cfg.dims.x(); ++x) {
        const Eigen::Vector3i idx(x, y, z);
        const Eigen::Vector3d p = cfg.indexToPos(idx);
        bool occupied = false;
        for (const ObstacleBox& b : s.boxes)
          if ((p.array() >= b.min.array()).all() && (p.array() <= b.max.array()).all()) {
            occupied = true;
            break;
          }
        if (!occupied)
          for (const ObstacleCylinder& c : s.cylinders)
            if (p.z() >= c.z_min && p.z() <= c.z_max &&
                (p.head<2>() - c.center).squaredNorm() <= c.radius * c.radius) {
              occupied = true;
              break;
            }
        if (occupied) s.truth.set(idx, VoxelState::Occupied);
      }
}

}  // namespace

Scenario parseScenario(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ScenarioError("scenario: expected a JSON object");

  Scenario s;
  if (!j.contains("schema") || !j.at("schema").is_number_integer())
    throw ScenarioError("schema: missing or non-integer");
  s.schema = j.at("schema").get<int>();
  if (s.schema != 1) throw ScenarioError("schema: unsupported version " + std::to_string(s.schema));

  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ScenarioError("name: expected a string");
    s.name = j.at("name").get<std::string>();
  }

  const json grid = requireObject(j, "grid");
  if (!grid.contains("origin")) throw ScenarioError("grid.origin: missing required field");
  s.grid.origin = parseVec3(grid.at("origin"), "grid.origin");
  s.grid.resolution = getNumber(grid, "resolution", 0.1, "grid.");
  if (s.grid.resolution <= 0.0) throw ScenarioError("grid.resolution: must be positive");
  if (!grid.contains("dims")) throw ScenarioError("grid.dims: missing required field");
  const json dims = grid.at("dims");
  if (!dims.is_array() || dims.size() != 3) throw ScenarioError("grid.dims: expected [nx, ny, nz]");
  for (int i = 0; i < 3; ++i) {
    if (!dims[i].is_number_integer() || dims[i].get<int>() < 1)
      throw ScenarioError("grid.dims: entries must be integers >= 1");
    s.grid.dims[i] = dims[i].get<int>();
  }
  if (s.grid.voxelCount() > 64u * 1024u * 1024u)
    throw ScenarioError("grid.dims: grid exceeds the supported voxel count");

  const json start = requireObject(j, "start");
  if (!start.contains("position")) throw ScenarioError("start.position: missing required field");
  s.start.position = parseVec3(start.at("position"), "start.position");
  s.start.yaw = getNumber(start, "yaw", 0.0, "start.");

  if (j.contains("sensor")) {
    const json sensor = j.at("sensor");
    if (!sensor.is_object()) throw ScenarioError("sensor: expected an object");
    s.sensor.horizontal_fov = degToRad(getNumber(sensor, "horizontal_fov_deg", 80.0, "sensor."));
    s.sensor.vertical_fov = degToRad(getNumber(sensor, "vertical_fov_deg", 60.0, "sensor."));
    s.sensor.max_range = getNumber(sensor, "max_range", 4.5, "sensor.");
    s.sensor.rays_h = getInt(sensor, "rays_h", 64, "sensor.");
    s.sensor.rays_v = getInt(sensor, "rays_v", 48, "sensor.");
    if (s.sensor.horizontal_fov <= 0.0 || s.sensor.horizontal_fov >= M_PI)
      throw ScenarioError("sensor.horizontal_fov_deg: must be in (0, 180)");
    if (s.sensor.vertical_fov <= 0.0 || s.sensor.vertical_fov >= M_PI)
      throw ScenarioError("sensor.vertical_fov_deg: must be in (0, 180)");
    if (s.sensor.max_range <= 0.0) throw ScenarioError("sensor.max_range: must be positive");
    if (s.sensor.rays_h < 2 || s.sensor.rays_v < 2)
      throw ScenarioError("sensor.rays_h/rays_v: must be at least 2");
  }

  if (j.contains("obstacles")) {
    const json obstacles = j.at("obstacles");
    if (!obstacles.is_array()) throw ScenarioError("obstacles: expected an array");
    for (size_t i = 0; i < obstacles.size(); ++i) {
      const json& o = obstacles[i];
      const std::string scope = "obstacles[" + std::to_string(i) + "]";
      if (!o.is_object() || !o.contains("type") || !o.at("type").is_string())
        throw ScenarioError(scope + ": expected an object with a \"type\" string");
      const std::string type = o.at("type").get<std::string>();
      if (type == "box") {
        if (!o.contains("min") || !o.contains("max"))
          throw ScenarioError(scope + ": box needs min and max");
        s.boxes.push_back({parseVec3(o.at("min"), scope + ".min"),
                           parseVec3(o.at("max"), scope + ".max")});
      } else if (type == "cylinder") {
        if (!o.contains("center") || !o.at("center").is_array() || o.at("center").size() != 2 ||
            !o.at("center")[0].is_number() || !o.at("center")[1].is_number())
          throw ScenarioError(scope + ".center: expected [x, y]");
        ObstacleCylinder c;
        c.center = Eigen::Vector2d(o.at("center")[0].get<double>(), o.at("center")[1].get<double>());
        c.radius = getNumber(o, "radius", 0.0, scope + ".");
        c.z_min = getNumber(o, "z_min", s.grid.worldMin().z(), scope + ".");
        c.z_max = getNumber(o, "z_max", s.grid.worldMax().z(), scope + ".");
        s.cylinders.push_back(c);
      } else {
        throw ScenarioError(scope + ".type: unknown obstacle type \"" + type + "\"");
      }
    }
  }

  if (j.contains("occupancy_file")) {
    if (!j.at("occupancy_file").is_string())
      throw ScenarioError("occupancy_file: expected a string path");
    s.occupancy_file = j.at("occupancy_file").get<std::string>();
  }

  if (j.contains("closed_shell")) {
    if (!j.at("closed_shell").is_boolean()) throw ScenarioError("closed_shell: expected a boolean");
    s.closed_shell = j.at("closed_shell").get<bool>();
  }
  if (j.contains("start_known")) {
    if (!j.at("start_known").is_boolean()) throw ScenarioError("start_known: expected a boolean");
    s.start_known = j.at("start_known").get<bool>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
      throw ScenarioError("seed: expected a non-negative integer");
    s.seed = j.at("seed").get<uint64_t>();
  }

  if (j.contains("params")) {
    const json p = j.at("params");
    if (!p.is_object()) throw ScenarioError("params: expected an object");
    const std::string scope = "params.";
    // Dynamics
    s.limits.v_max = getNumber(p, "v_max", s.limits.v_max, scope);
    s.limits.a_max = getNumber(p, "a_max", s.limits.a_max, scope);
    s.limits.xi_dot_max = getNumber(p, "xi_dot_max", s.limits.xi_dot_max, scope);
    s.limits.xi_ddot_max = getNumber(p, "xi_ddot_max", s.limits.xi_ddot_max, scope);
    if (s.limits.v_max <= 0 || s.limits.a_max <= 0 || s.limits.xi_dot_max <= 0 ||
        s.limits.xi_ddot_max <= 0)
      throw ScenarioError("params: dynamic limits must be positive");
    // Frontier
    s.frontier.min_cluster_size = getInt(p, "min_cluster_size", s.frontier.min_cluster_size, scope);
    s.frontier.pca_split_threshold =
        getNumber(p, "pca_split_threshold", s.frontier.pca_split_threshold, scope);
    s.frontier.cyl_radii = getNumberList(p, "cyl_radii", s.frontier.cyl_radii, scope);
    s.frontier.cyl_angles_per_ring =
        getInt(p, "cyl_angles_per_ring", s.frontier.cyl_angles_per_ring, scope);
    s.frontier.z_offsets = getNumberList(p, "z_offsets", s.frontier.z_offsets, scope);
    s.frontier.min_coverage = getInt(p, "min_coverage", s.frontier.min_coverage, scope);
    s.frontier.max_viewpoints = getInt(p, "N_view", s.frontier.max_viewpoints, scope);
    s.frontier.clearance = getNumber(p, "clearance", s.frontier.clearance, scope);
    s.frontier.yaw_bins = getInt(p, "yaw_bins", s.frontier.yaw_bins, scope);
    if (s.frontier.min_cluster_size < 1) throw ScenarioError("params.min_cluster_size: must be >= 1");
    if (s.frontier.pca_split_threshold <= 0)
      throw ScenarioError("params.pca_split_threshold: must be positive");
    if (s.frontier.max_viewpoints < 1) throw ScenarioError("params.N_view: must be >= 1");
    // Planner
    s.planner.w_c = getNumber(p, "w_c", s.planner.w_c, scope);
    s.planner.refine_radius = getNumber(p, "R_rf", s.planner.refine_radius, scope);
    s.planner.exact_atsp_limit = getInt(p, "exact_atsp_limit", s.planner.exact_atsp_limit, scope);
    s.planner.two_opt_rounds = getInt(p, "two_opt_rounds", s.planner.two_opt_rounds, scope);
    if (s.planner.w_c < 0) throw ScenarioError("params.w_c: must be non-negative");
    if (s.planner.refine_radius <= 0) throw ScenarioError("params.R_rf: must be positive");
    if (s.planner.exact_atsp_limit < 1) throw ScenarioError("params.exact_atsp_limit: must be >= 1");
    // Trajectory
    s.weights.w_s_p = getNumber(p, "w_s_p", s.weights.w_s_p, scope);
    s.weights.w_s_xi = getNumber(p, "w_s_xi", s.weights.w_s_xi, scope);
    s.weights.w_t = getNumber(p, "w_t", s.weights.w_t, scope);
    s.weights.lambda_c = getNumber(p, "lambda_c", s.weights.lambda_c, scope);
    s.weights.lambda_d = getNumber(p, "lambda_d", s.weights.lambda_d, scope);
    s.weights.lambda_bs = getNumber(p, "lambda_bs", s.weights.lambda_bs, scope);
    s.weights.d_min = getNumber(p, "d_min", s.weights.d_min, scope);
    if (s.weights.d_min <= 0) throw ScenarioError("params.d_min: must be positive");
    // Mission
    s.mission.control_period = getNumber(p, "control_period", s.mission.control_period, scope);
    s.mission.scan_period = getNumber(p, "scan_period", s.mission.scan_period, scope);
    s.mission.replan_cooldown = getNumber(p, "replan_cooldown", s.mission.replan_cooldown, scope);
    s.mission.mission_time_cap = getNumber(p, "mission_time_cap", s.mission.mission_time_cap, scope);
    s.mission.optimizer_budget = getInt(p, "optimizer_budget", s.mission.optimizer_budget, scope);
    if (s.mission.control_period <= 0) throw ScenarioError("params.control_period: must be positive");
    if (s.mission.scan_period <= 0) throw ScenarioError("params.scan_period: must be positive");
  }

  // Truth map: occupancy file wins over primitives.
  if (!s.occupancy_file.empty()) {
    std::filesystem::path p(s.occupancy_file);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ScenarioError("occupancy_file: cannot open " + p.string());
    try {
      s.truth = readBinary(in);
    } catch (const std::exception& e) {
      throw ScenarioError(std::string("occupancy_file: ") + e.what());
    }
    s.grid = s.truth.config();
  } else {
    rasterize(s);
  }

  const Eigen::Vector3i start_idx = s.grid.posToIndex(s.start.position);
  if (!s.grid.inBounds(start_idx)) throw ScenarioError("start.position: outside the grid");
  if (!s.truth.isFree(start_idx)) throw ScenarioError("start.position: start not free");

  return s;
}

Scenario loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("scenario: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parseScenario(buf.str(), std::filesystem::path(path).parent_path().string());
}

void applyEnvOverrides(Scenario& s) {
  auto num = [](const char* name, double& target) {
    if (const char* v = std::getenv(name)) {
      char* end = nullptr;
      const double parsed = std::strtod(v, &end);
      if (end != v && *end == '\0') target = parsed;
    }
  };
  auto integer = [](const char* name, int& target) {
    if (const char* v = std::getenv(name)) {
      char* end = nullptr;
      const long parsed = std::strtol(v, &end, 10);
      if (end != v && *end == '\0') target = static_cast<int>(parsed);
    }
  };

  num("FUEL_V_MAX", s.limits.v_max);
  num("FUEL_A_MAX", s.limits.a_max);
  num("FUEL_XI_DOT_MAX", s.limits.xi_dot_max);
  num("FUEL_XI_DDOT_MAX", s.limits.xi_ddot_max);
  integer("FUEL_MIN_CLUSTER_SIZE", s.frontier.min_cluster_size);
  num("FUEL_PCA_SPLIT_THRESHOLD", s.frontier.pca_split_threshold);
  integer("FUEL_CYL_ANGLES_PER_RING", s.frontier.cyl_angles_per_ring);
  integer("FUEL_MIN_COVERAGE", s.frontier.min_coverage);
  integer("FUEL_N_VIEW", s.frontier.max_viewpoints);
  num("FUEL_CLEARANCE", s.frontier.clearance);
  integer("FUEL_YAW_BINS", s.frontier.yaw_bins);
  num("FUEL_W_C", s.planner.w_c);
  num("FUEL_R_RF", s.planner.refine_radius);
  integer("FUEL_EXACT_ATSP_LIMIT", s.planner.exact_atsp_limit);
  integer("FUEL_TWO_OPT_ROUNDS", s.planner.two_opt_rounds);
  num("FUEL_W_S_P", s.weights.w_s_p);
  num("FUEL_W_S_XI", s.weights.w_s_xi);
  num("FUEL_W_T", s.weights.w_t);
  num("FUEL_LAMBDA_C", s.weights.lambda_c);
  num("FUEL_LAMBDA_D", s.weights.lambda_d);
  num("FUEL_LAMBDA_BS", s.weights.lambda_bs);
  num("FUEL_D_MIN", s.weights.d_min);
  num("FUEL_CONTROL_PERIOD", s.mission.control_period);
  num("FUEL_SCAN_PERIOD", s.mission.scan_period);
  num("FUEL_REPLAN_COOLDOWN", s.mission.replan_cooldown);
  num("FUEL_MISSION_TIME_CAP", s.mission.mission_time_cap);
  integer("FUEL_OPTIMIZER_BUDGET", s.mission.optimizer_budget);
}

void writeResolvedParams(const Scenario& s, std::ostream& os) {
  json out;
  out["schema"] = s.schema;
  out["name"] = s.name;
  out["seed"] = s.seed;
  out["grid"] = {{"origin", {s.grid.origin.x(), s.grid.origin.y(), s.grid.origin.z()}},
                 {"resolution", s.grid.resolution},
                 {"dims", {s.grid.dims.x(), s.grid.dims.y(), s.grid.dims.z()}}};
  out["start"] = {{"position", {s.start.position.x(), s.start.position.y(), s.start.position.z()}},
                  {"yaw", s.start.yaw}};
  out["sensor"] = {{"horizontal_fov_deg", s.sensor.horizontal_fov * 180.0 / M_PI},
                   {"vertical_fov_deg", s.sensor.vertical_fov * 180.0 / M_PI},
                   {"max_range", s.sensor.max_range},
                   {"rays_h", s.sensor.rays_h},
                   {"rays_v", s.sensor.rays_v}};
  out["params"] = {{"v_max", s.limits.v_max},
                   {"a_max", s.limits.a_max},
                   {"xi_dot_max", s.limits.xi_dot_max},
                   {"xi_ddot_max", s.limits.xi_ddot_max},
                   {"min_cluster_size", s.frontier.min_cluster_size},
                   {"pca_split_threshold", s.frontier.pca_split_threshold},
                   {"cyl_radii", s.frontier.cyl_radii},
                   {"cyl_angles_per_ring", s.frontier.cyl_angles_per_ring},
                   {"z_offsets", s.frontier.z_offsets},
                   {"min_coverage", s.frontier.min_coverage},
                   {"N_view", s.frontier.max_viewpoints},
                   {"clearance", s.frontier.clearance},
                   {"yaw_bins", s.frontier.yaw_bins},
                   {"w_c", s.planner.w_c},
                   {"R_rf", s.planner.refine_radius},
                   {"exact_atsp_limit", s.planner.exact_atsp_limit},
                   {"two_opt_rounds", s.planner.two_opt_rounds},
                   {"w_s_p", s.weights.w_s_p},
                   {"w_s_xi", s.weights.w_s_xi},
                   {"w_t", s.weights.w_t},
                   {"lambda_c", s.weights.lambda_c},
                   {"lambda_d", s.weights.lambda_d},
                   {"lambda_bs", s.weights.lambda_bs},
                   {"d_min", s.weights.d_min},
                   {"control_period", s.mission.control_period},
                   {"scan_period", s.mission.scan_period},
                   {"replan_cooldown", s.mission.replan_cooldown},
                   {"mission_time_cap", s.mission.mission_time_cap},
                   {"optimizer_budget", s.mission.optimizer_budget}};
  os << out.dump(2) << '\n';
}

}  // namespace fuel
