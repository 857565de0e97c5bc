#include "fuel/explorer.hpp"

#include "fuel/astar.hpp"
#include "fuel/raycast.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <random>
#include <sstream>

namespace fuel {

namespace {

constexpr double kEsdfCap = 5.0;

double msSince(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

bool segmentHitsOccupied(const VoxelGrid& truth, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  bool hit = false;
  raycastVisit(truth.config(), a, b, [&](const Eigen::Vector3i& v) {
    if (truth.isOccupied(v)) {
      hit = true;
      return false;
    }
    return true;
  });
  return hit;
}

std::string formatIds(const std::vector<int>& ids) {
  std::string out = "[";
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  out += ']';
  return out;
}

}  // namespace

std::vector<uint8_t> reachableObservable(const VoxelGrid& truth, const Eigen::Vector3d& start,
                                         const SensorModel& sensor) {
  const GridConfig& cfg = truth.config();
  std::vector<uint8_t> out(cfg.voxelCount(), 0);

  const Eigen::Vector3i start_idx = cfg.posToIndex(start);
  if (!cfg.inBounds(start_idx) || !truth.isFree(start_idx)) return out;

  // Flood fill of reachable free space (26-connected).
  std::vector<uint8_t> reachable(cfg.voxelCount(), 0);
  std::deque<Eigen::Vector3i> queue;
  queue.push_back(start_idx);
  reachable[cfg.linear(start_idx)] = 1;
  while (!queue.empty()) {
    const Eigen::Vector3i cur = queue.front();
    queue.pop_front();
    out[cfg.linear(cur)] = 1;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!dx && !dy && !dz) continue;
          const Eigen::Vector3i nb = cur + Eigen::Vector3i(dx, dy, dz);
          if (!cfg.inBounds(nb) || !truth.isFree(nb)) continue;
          uint8_t& flag = reachable[cfg.linear(nb)];
          if (!flag) {
            flag = 1;
            queue.push_back(nb);
          }
        }
  }

  // Candidate free-cell offsets in ascending distance with in-FOV elevation.
  // A clear sightline implies clear sightlines from the free cells near its
  // end, so a small candidate ball already covers the direction cone.
  const int reach = std::min(static_cast<int>(sensor.max_range / cfg.resolution), 8);
  struct Offset {
    Eigen::Vector3i d;
    double norm;
  };
  std::vector<Offset> offsets;
  for (int dz = -reach; dz <= reach; ++dz)
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx) {
        if (!dx && !dy && !dz) continue;
        const Eigen::Vector3i d(dx, dy, dz);
        const double n = d.cast<double>().norm();
        if (n > reach) continue;
        const double elevation = std::atan2(std::abs(dz), std::hypot(double(dx), double(dy)));
        if (elevation > 0.5 * sensor.vertical_fov) continue;
        offsets.push_back({d, n});
      }
  std::sort(offsets.begin(), offsets.end(), [](const Offset& a, const Offset& b) {
    return a.norm < b.norm;
  });

  // Occupied surface cells with an unobstructed in-FOV line from reachable
  // free space within range.
  for (int z = 0; z < cfg.dims.z(); ++z)
    for (int y = 0; y < cfg.dims.y(); ++y)
      for (int x = 0; x < cfg.dims.x(); ++x) {
        const Eigen::Vector3i o(x, y, z);
        if (!truth.isOccupied(o)) continue;
        bool surface = false;
        for (int dz = -1; dz <= 1 && !surface; ++dz)
          for (int dy = -1; dy <= 1 && !surface; ++dy)
            for (int dx = -1; dx <= 1 && !surface; ++dx) {
              const Eigen::Vector3i nb = o + Eigen::Vector3i(dx, dy, dz);
              if ((dx || dy || dz) && cfg.inBounds(nb) && truth.isFree(nb) &&
                  reachable[cfg.linear(nb)])
                surface = true;
            }
        if (!surface) continue;
        const Eigen::Vector3d oc = cfg.indexToPos(o);
        for (const Offset& off : offsets) {
          const Eigen::Vector3i f = o + off.d;
          if (!cfg.inBounds(f) || !reachable[cfg.linear(f)]) continue;
          const Eigen::Vector3d fc = cfg.indexToPos(f);
          if ((oc - fc).norm() > sensor.max_range) continue;
          bool clear = true;
          raycastVisit(cfg, fc, oc, [&](const Eigen::Vector3i& v) {
            if (v == o) return false;
            if (!truth.isFree(v)) {
              clear = false;
              return false;
            }
            return true;
          });
          if (clear) {
            out[cfg.linear(o)] = 1;
            break;
          }
        }
      }
  return out;
}

VehicleState advance(const VehicleState& vehicle, const UniformBSpline& spline, double traj_start,
                     double dt, const VoxelGrid& truth, bool* collision) {
  VehicleState next = vehicle;
  next.t = vehicle.t + dt;
  const double tau = std::clamp(next.t - traj_start, 0.0, spline.duration());
  const Eigen::Vector4d x = spline.evaluate(tau, 0);
  const Eigen::Vector4d v = spline.evaluate(tau, 1);
  next.position = x.head<3>();
  next.yaw = wrapToPi(x.w());
  next.velocity = v.head<3>();
  if (collision != nullptr)
    *collision = segmentHitsOccupied(truth, vehicle.position, next.position);
  return next;
}

MissionResult runMission(const Scenario& scenario, PlannerKind kind, double wall_clock_cap_s,
                         const std::vector<uint8_t>* ro_precomputed) {
  const auto wall_start = std::chrono::steady_clock::now();
  const GridConfig& cfg = scenario.grid;
  const VoxelGrid& truth = scenario.truth;
  const MissionParams& mission = scenario.mission;

  MissionResult result;
  result.online = scenario.start_known ? truth : VoxelGrid(cfg, VoxelState::Unknown);
  VoxelGrid& online = result.online;

  // The seed perturbs the start pose so repeats explore run-to-run variance.
  ScanPose start = scenario.start;
  if (scenario.seed != 0) {
    std::mt19937_64 rng(scenario.seed);
    std::uniform_real_distribution<double> uyaw(-M_PI, M_PI);
    start.yaw = uyaw(rng);
    std::uniform_real_distribution<double> ujit(-0.2, 0.2);
    for (int attempt = 0; attempt < 20; ++attempt) {
      const Eigen::Vector3d cand =
          scenario.start.position + Eigen::Vector3d(ujit(rng), ujit(rng), 0.0);
      const Eigen::Vector3i idx = cfg.posToIndex(cand);
      if (cfg.inBounds(idx) && truth.isFree(idx)) {
        start.position = cand;
        break;
      }
    }
  }

  VehicleState vehicle;
  vehicle.position = start.position;
  vehicle.yaw = wrapToPi(start.yaw);

  const std::vector<uint8_t> ro = ro_precomputed != nullptr
                                      ? *ro_precomputed
                                      : reachableObservable(truth, start.position, scenario.sensor);
  const size_t ro_total = std::max<size_t>(1, std::count(ro.begin(), ro.end(), uint8_t{1}));
  size_t known_in_ro = 0;
  if (scenario.start_known) {
    for (size_t a = 0; a < ro.size(); ++a)
      if (ro[a] && online.at(a) != VoxelState::Unknown) ++known_in_ro;
  }

  FrontierRegistry registry(cfg, scenario.frontier, scenario.sensor, scenario.limits);
  Esdf esdf;
  bool esdf_valid = false;

  std::ostringstream events;
  std::ostringstream trace;
  char line[512];

  MissionMetrics& metrics = result.metrics;

  UniformBSpline traj;
  bool has_traj = false;
  double traj_t0 = 0.0;
  Eigen::Vector4d vehicle_acc = Eigen::Vector4d::Zero();
  double yaw_rate = 0.0;

  std::vector<Eigen::Vector3d> fb_path;
  double fb_progress = 0.0;
  bool fb_active = false;

  bool pending_change = false;
  bool force_replan = false;
  double last_replan_t = -1e18;
  double next_scan_t = 0.0;
  bool done = false;

  auto logEvent = [&](const char* fmt, auto... args) {
    std::snprintf(line, sizeof(line), fmt, args...);
    events << line << '\n';
  };

  auto coverageNow = [&]() { return static_cast<double>(known_in_ro) / ro_total; };

  const int max_steps =
      static_cast<int>(mission.mission_time_cap / mission.control_period) + 8;
  for (int step = 0; step < max_steps; ++step) {
    if (msSince(wall_start) / 1000.0 > wall_clock_cap_s) break;
    if (vehicle.t > mission.mission_time_cap + 1e-9) break;

    // Sense at the scan rate.
    if (vehicle.t + 1e-9 >= next_scan_t) {
      next_scan_t += mission.scan_period;
      auto scan = integrateScan(online, truth, {vehicle.position, vehicle.yaw}, scenario.sensor);
      if (std::holds_alternative<ScanError>(scan)) {
        logEvent(R"({"t":%.3f,"event":"scan_error"})", vehicle.t);
      } else {
        const ScanResult& sr = std::get<ScanResult>(scan);
        ++metrics.scan_count;
        for (const auto& c : sr.changed_cells)
          if (ro[cfg.linear(c)]) ++known_in_ro;
        if (!sr.changed_cells.empty()) {
          auto t0 = std::chrono::steady_clock::now();
          esdf = computeEsdf(online, kEsdfCap);
          esdf_valid = true;
          metrics.totals.map_ms += msSince(t0);

          t0 = std::chrono::steady_clock::now();
          const ChangeSet change = registry.observe(online, sr, esdf);
          metrics.totals.frontier_ms += msSince(t0);
          if (!change.empty()) {
            pending_change = true;
            ++metrics.changeset_count;
          }
          logEvent(R"({"t":%.3f,"event":"scan","changed":%zu,"removed":%zu,"new":%zu})", vehicle.t,
                   sr.changed_cells.size(), change.removed_ids.size(), change.new_ids.size());
        } else {
          logEvent(R"({"t":%.3f,"event":"scan","changed":0,"removed":0,"new":0})", vehicle.t);
        }
      }

      if (registry.activeCount() == 0) {
        metrics.complete = true;
        logEvent(R"({"t":%.3f,"event":"terminate","dormant":%zu})", vehicle.t,
                 registry.dormantCount());
        done = true;
      }
    }
    if (done) break;

    // Replan on structure changes or an exhausted trajectory, rate-limited.
    const bool traj_exhausted = !has_traj || vehicle.t - traj_t0 >= traj.duration() - 1e-9;
    const bool cooldown_ok =
        metrics.replan_count == 0 || vehicle.t - last_replan_t >= mission.replan_cooldown - 1e-9;
    if ((pending_change || traj_exhausted || force_replan) && cooldown_ok &&
        registry.activeCount() > 0) {
      ReplanRecord rec;
      rec.t = vehicle.t;
      rec.n_clusters = static_cast<int>(registry.activeCount());
      rec.trigger = pending_change ? "change" : (force_replan ? "forced" : "exhausted");

      if (!esdf_valid) {
        const auto t0 = std::chrono::steady_clock::now();
        esdf = computeEsdf(online, kEsdfCap);
        esdf_valid = true;
        metrics.totals.map_ms += msSince(t0);
      }

      const CurrentState state{vehicle.position, vehicle.yaw, vehicle.velocity};
      Viewpoint target;
      bool have_target = false;
      PathResult path_to_target;

      if (kind == PlannerKind::Fuel) {
        auto t0 = std::chrono::steady_clock::now();
        const CostMatrix matrix =
            buildCostMatrix(registry, online, state, scenario.limits, scenario.planner);
        rec.timings.matrix_ms = msSince(t0);

        t0 = std::chrono::steady_clock::now();
        const Tour tour = solveAtsp(matrix, scenario.planner);
        rec.timings.solver_ms = msSince(t0);
        rec.tour_cost = tour.cost;
        rec.tour_order = tour.order;

        t0 = std::chrono::steady_clock::now();
        const RefinedTour refined =
            refineLocal(tour, registry, state, scenario.limits, scenario.planner);
        rec.timings.refine_ms = msSince(t0);
        rec.refined_ids = refined.cluster_ids;
        if (!refined.viewpoints.empty()) {
          target = refined.viewpoints.front();
          have_target = true;
        }
      } else {
        // Greedy baseline: closest cluster by A* to its top viewpoint.
        const auto t0 = std::chrono::steady_clock::now();
        double best = std::numeric_limits<double>::infinity();
        for (int id : registry.activeIds()) {
          const Viewpoint& vp = registry.clusters().at(id).top();
          const PathResult p = astar(online, vehicle.position, vp.position);
          if (p.ok() && p.length < best) {
            best = p.length;
            target = vp;
            have_target = true;
          }
        }
        rec.timings.solver_ms = msSince(t0);
        rec.tour_cost = best;
      }

      if (have_target) {
        auto t0 = std::chrono::steady_clock::now();
        path_to_target = astar(online, vehicle.position, target.position);
        if (path_to_target.ok()) {
          std::vector<Eigen::Vector3d> pts = path_to_target.points;
          if (pts.size() < 2) pts.push_back(pts.front());
          UniformBSpline init =
              initializeFromPath(pts, vehicle.yaw, target.yaw, scenario.limits);
          BoundaryState boundary;
          boundary.x0 << vehicle.position, vehicle.yaw;
          boundary.xd0 << vehicle.velocity, yaw_rate;
          boundary.xdd0 = vehicle_acc;
          boundary.x_next << target.position, vehicle.yaw + wrapToPi(target.yaw - vehicle.yaw);
          auto [opt, report] = optimize(init, esdf, scenario.limits, scenario.weights, boundary,
                                        mission.optimizer_budget);
          rec.timings.traj_ms = msSince(t0);
          if (report.feasibility.ok) {
            traj = opt;
            has_traj = true;
            traj_t0 = vehicle.t;
            fb_active = false;
            rec.traj_duration = traj.duration();
          } else {
            // Optimizer failure: crawl along the A* path and retry shortly.
            fb_path = path_to_target.points;
            fb_progress = 0.0;
            fb_active = true;
            has_traj = false;
            rec.fallback = true;
            logEvent(R"({"t":%.3f,"event":"fallback"})", vehicle.t);
          }
        } else {
          rec.timings.traj_ms = msSince(t0);
          rec.fallback = true;
          has_traj = false;
          logEvent(R"({"t":%.3f,"event":"target_unreachable"})", vehicle.t);
        }
      }

      rec.coverage = coverageNow();
      metrics.totals.matrix_ms += rec.timings.matrix_ms;
      metrics.totals.solver_ms += rec.timings.solver_ms;
      metrics.totals.refine_ms += rec.timings.refine_ms;
      metrics.totals.traj_ms += rec.timings.traj_ms;
      ++metrics.replan_count;
      result.replans.push_back(rec);
      pending_change = false;
      force_replan = false;
      last_replan_t = vehicle.t;

      logEvent(R"({"t":%.3f,"event":"replan","n_cls":%d,"tour":%s,"refined":%s,"fallback":%d})",
               rec.t, rec.n_clusters, formatIds(rec.tour_order).c_str(),
               formatIds(rec.refined_ids).c_str(), rec.fallback ? 1 : 0);
      std::snprintf(line, sizeof(line),
                    R"({"t":%.3f,"n_cls":%d,"matrix_ms":%.3f,"solver_ms":%.3f,"refine_ms":%.3f,"tour":%s,"refined":%s})",
                    rec.t, rec.n_clusters, rec.timings.matrix_ms, rec.timings.solver_ms,
                    rec.timings.refine_ms, formatIds(rec.tour_order).c_str(),
                    formatIds(rec.refined_ids).c_str());
      trace << line << '\n';
    }

    // Advance the vehicle for one control period.
    const Eigen::Vector3d old_pos = vehicle.position;
    if (has_traj) {
      bool collision = false;
      vehicle = advance(vehicle, traj, traj_t0, mission.control_period, truth, &collision);
      if (collision) {
        ++metrics.collision_count;
        logEvent(R"({"t":%.3f,"event":"collision"})", vehicle.t);
      }
      const double tau = std::clamp(vehicle.t - traj_t0, 0.0, traj.duration());
      yaw_rate = traj.evaluate(tau, 1).w();
      vehicle_acc = traj.evaluate(tau, 2);
    } else if (fb_active && fb_path.size() >= 2) {
      fb_progress += 0.5 * scenario.limits.v_max * mission.control_period;
      double remaining = fb_progress;
      Eigen::Vector3d pos = fb_path.front();
      Eigen::Vector3d dir = Eigen::Vector3d::Zero();
      for (size_t i = 1; i < fb_path.size(); ++i) {
        const Eigen::Vector3d seg = fb_path[i] - fb_path[i - 1];
        const double len = seg.norm();
        if (remaining <= len || i + 1 == fb_path.size()) {
          const double u = len > 1e-12 ? std::min(remaining / len, 1.0) : 0.0;
          pos = fb_path[i - 1] + u * seg;
          dir = len > 1e-12 ? (seg / len).eval() : Eigen::Vector3d::Zero();
          break;
        }
        remaining -= len;
      }
      vehicle.t += mission.control_period;
      if (segmentHitsOccupied(truth, vehicle.position, pos)) {
        ++metrics.collision_count;
        logEvent(R"({"t":%.3f,"event":"collision"})", vehicle.t);
      }
      vehicle.position = pos;
      vehicle.velocity = 0.5 * scenario.limits.v_max * dir;
      yaw_rate = 0.0;
      vehicle_acc.setZero();
      force_replan = true;
    } else {
      vehicle.t += mission.control_period;
      vehicle.velocity.setZero();
      yaw_rate = 0.0;
      vehicle_acc.setZero();
    }
    metrics.flight_distance += (vehicle.position - old_pos).norm();

    Eigen::Matrix<double, 5, 1> sample;
    sample << vehicle.t, vehicle.position.x(), vehicle.position.y(), vehicle.position.z(),
        vehicle.yaw;
    result.flown.push_back(sample);
  }

  metrics.elapsed = vehicle.t;
  metrics.coverage = coverageNow();
  result.events = events.str();
  result.planner_trace = trace.str();
  return result;
}

void writeMetricsCsv(const MissionResult& result, std::ostream& os) {
  os << "t,n_cls,map_ms,frontier_ms,matrix_ms,solver_ms,refine_ms,traj_ms,tour_cost,traj_T,"
        "coverage\n";
  char line[512];
  for (const ReplanRecord& r : result.replans) {
    std::snprintf(line, sizeof(line), "%.3f,%d,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.9g,%.9g,%.9g\n", r.t,
                  r.n_clusters, r.timings.map_ms, r.timings.frontier_ms, r.timings.matrix_ms,
                  r.timings.solver_ms, r.timings.refine_ms, r.timings.traj_ms, r.tour_cost,
                  r.traj_duration, r.coverage);
    os << line;
  }
}

void writeSummary(const MissionResult& result, PlannerKind kind, const Scenario& scenario,
                  std::ostream& os) {
  const MissionMetrics& m = result.metrics;
  char line[512];
  std::snprintf(line, sizeof(line),
                "planner=%s scenario=%s status=%s elapsed=%.3f distance=%.3f coverage=%.6f "
                "replans=%d collisions=%d scans=%d changesets=%d\n",
                kind == PlannerKind::Fuel ? "fuel" : "greedy", scenario.name.c_str(),
                m.complete ? "complete" : "incomplete", m.elapsed, m.flight_distance, m.coverage,
                m.replan_count, m.collision_count, m.scan_count, m.changeset_count);
  os << line;
}

void writeFlownCsv(const MissionResult& result, std::ostream& os) {
  os << "t,x,y,z,yaw\n";
  char line[256];
  for (const auto& s : result.flown) {
    std::snprintf(line, sizeof(line), "%.3f,%.9g,%.9g,%.9g,%.9g\n", s[0], s[1], s[2], s[3], s[4]);
    os << line;
  }
}

}  // namespace fuel
