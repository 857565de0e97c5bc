#include "fuel/explorer.hpp"
#include "fuel/scenario.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace {

namespace fs = std::filesystem;

struct BenchRow {
  std::string scenario;
  std::string planner;
  int repeat = 0;
  uint64_t seed = 0;
  fuel::MissionMetrics metrics;
  double wall_s = 0.0;
};

int writeRunArtifacts(const fuel::MissionResult& result, const fuel::Scenario& scenario,
                      fuel::PlannerKind kind, const fs::path& out_dir, bool dump_map,
                      bool dump_traj) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << out_dir << "\n";
    return 1;
  }

  {
    std::ofstream os(out_dir / "metrics.csv");
    fuel::writeMetricsCsv(result, os);
  }
  {
    std::ofstream os(out_dir / "events.jsonl");
    os << result.events;
  }
  {
    std::ofstream os(out_dir / "planner_trace.jsonl");
    os << result.planner_trace;
  }
  {
    std::ofstream os(out_dir / "summary.txt");
    fuel::writeSummary(result, kind, scenario, os);
  }
  {
    std::ofstream os(out_dir / "resolved_params.json");
    fuel::writeResolvedParams(scenario, os);
  }
  if (dump_map) {
    std::ofstream ascii(out_dir / "map.txt");
    fuel::writeAsciiSlices(result.online, ascii);
    std::ofstream bin(out_dir / "map.bin", std::ios::binary);
    fuel::writeBinary(result.online, bin);
  }
  if (dump_traj) {
    std::ofstream os(out_dir / "trajectory.csv");
    fuel::writeFlownCsv(result, os);
  }
  return 0;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frontier-based exploration planner simulation"};
  app.require_subcommand(1);

  // run
  std::string run_scenario;
  std::string run_planner = "fuel";
  std::string run_out = "out";
  int64_t run_seed = -1;
  double run_max_time = 1e18;
  bool run_dump_map = false;
  bool run_dump_traj = false;
  CLI::App* run = app.add_subcommand("run", "Execute one exploration mission");
  run->add_option("scenario", run_scenario, "Scenario JSON file")->required();
  run->add_option("--planner", run_planner, "fuel | greedy")
      ->check(CLI::IsMember({"fuel", "greedy"}));
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--seed", run_seed, "Override the scenario seed");
  run->add_option("--max-time", run_max_time, "Wall-clock cap in seconds");
  run->add_flag("--dump-map", run_dump_map, "Write final map snapshots");
  run->add_flag("--dump-traj", run_dump_traj, "Write the flown trajectory CSV");

  // validate
  std::string validate_scenario;
  CLI::App* validate = app.add_subcommand("validate", "Parse and validate a scenario");
  validate->add_option("scenario", validate_scenario, "Scenario JSON file")->required();

  // bench
  std::vector<std::string> bench_scenarios;
  int bench_repeat = 3;
  std::string bench_out = "bench";
  int bench_jobs = 1;
  int64_t bench_seed = -1;
  CLI::App* bench = app.add_subcommand("bench", "Run planner x scenario x repeat comparisons");
  bench->add_option("scenarios", bench_scenarios, "Scenario JSON files")->required();
  bench->add_option("--repeat", bench_repeat, "Repeats per scenario/planner")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "Output directory");
  bench->add_option("--jobs", bench_jobs, "Parallel worker slots")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "Base seed (repeat r uses seed+r)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      fuel::Scenario scenario = fuel::loadScenario(run_scenario);
      fuel::applyEnvOverrides(scenario);
      if (run_seed >= 0) scenario.seed = static_cast<uint64_t>(run_seed);
      const fuel::PlannerKind kind =
          run_planner == "greedy" ? fuel::PlannerKind::Greedy : fuel::PlannerKind::Fuel;
      const fuel::MissionResult result = fuel::runMission(scenario, kind, run_max_time);
      const int rc = writeRunArtifacts(result, scenario, kind, run_out, run_dump_map, run_dump_traj);
      if (rc != 0) return rc;
      fuel::writeSummary(result, kind, scenario, std::cout);
      return result.metrics.complete ? 0 : 2;
    }

    if (validate->parsed()) {
      const fuel::Scenario scenario = fuel::loadScenario(validate_scenario);
      std::cout << "ok: " << (scenario.name.empty() ? validate_scenario : scenario.name) << " ("
                << scenario.grid.dims.x() << "x" << scenario.grid.dims.y() << "x"
                << scenario.grid.dims.z() << " @ " << scenario.grid.resolution << " m, "
                << scenario.truth.countState(fuel::VoxelState::Occupied) << " occupied voxels)\n";
      return 0;
    }

    if (bench->parsed()) {
      struct Job {
        std::string scenario_path;
        std::string planner;
        int repeat;
      };
      std::vector<Job> jobs;
      for (const std::string& path : bench_scenarios)
        for (const std::string& planner : {"fuel", "greedy"})
          for (int r = 0; r < bench_repeat; ++r) jobs.push_back({path, planner, r});

      std::vector<BenchRow> rows(jobs.size());
      std::mutex index_mutex;
      size_t next_job = 0;
      bool failed = false;
      std::string failure;

      auto worker = [&]() {
        while (true) {
          size_t j;
          {
            std::lock_guard<std::mutex> lock(index_mutex);
            if (failed || next_job >= jobs.size()) return;
            j = next_job++;
          }
          try {
            fuel::Scenario scenario = fuel::loadScenario(jobs[j].scenario_path);
            fuel::applyEnvOverrides(scenario);
            const uint64_t base = bench_seed >= 0 ? static_cast<uint64_t>(bench_seed) : scenario.seed;
            scenario.seed = base + static_cast<uint64_t>(jobs[j].repeat);
            const fuel::PlannerKind kind = jobs[j].planner == "greedy" ? fuel::PlannerKind::Greedy
                                                                       : fuel::PlannerKind::Fuel;
            const auto t0 = std::chrono::steady_clock::now();
            const fuel::MissionResult result = fuel::runMission(scenario, kind);
            BenchRow row;
            row.scenario = scenario.name.empty() ? jobs[j].scenario_path : scenario.name;
            row.planner = jobs[j].planner;
            row.repeat = jobs[j].repeat;
            row.seed = scenario.seed;
            row.metrics = result.metrics;
            row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            rows[j] = row;
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(index_mutex);
            failed = true;
            failure = e.what();
          }
        }
      };

      std::vector<std::thread> pool;
      const int nworkers = std::min<int>(bench_jobs, static_cast<int>(jobs.size()));
      for (int i = 0; i < nworkers; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      if (failed) {
        std::cerr << "error: " << failure << "\n";
        return 1;
      }

      std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return std::tie(a.scenario, a.planner, a.repeat) < std::tie(b.scenario, b.planner, b.repeat);
      });

      std::error_code ec;
      fs::create_directories(bench_out, ec);
      std::ofstream raw(fs::path(bench_out) / "bench_rows.csv");
      raw << "scenario,planner,repeat,seed,status,elapsed,distance,coverage,replans,collisions,"
             "wall_s,map_ms,frontier_ms,matrix_ms,solver_ms,refine_ms,traj_ms\n";
      char line[512];
      for (const BenchRow& r : rows) {
        std::snprintf(line, sizeof(line),
                      "%s,%s,%d,%llu,%s,%.3f,%.3f,%.6f,%d,%d,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f\n",
                      r.scenario.c_str(), r.planner.c_str(), r.repeat,
                      static_cast<unsigned long long>(r.seed),
                      r.metrics.complete ? "complete" : "incomplete", r.metrics.elapsed,
                      r.metrics.flight_distance, r.metrics.coverage, r.metrics.replan_count,
                      r.metrics.collision_count, r.wall_s, r.metrics.totals.map_ms,
                      r.metrics.totals.frontier_ms, r.metrics.totals.matrix_ms,
                      r.metrics.totals.solver_ms, r.metrics.totals.refine_ms,
                      r.metrics.totals.traj_ms);
        raw << line;
      }

      std::ofstream agg(fs::path(bench_out) / "bench_aggregate.csv");
      agg << "scenario,planner,n,mean_elapsed,std_elapsed,mean_distance,std_distance,mean_wall_s,"
             "std_wall_s,mean_map_ms,mean_frontier_ms,mean_matrix_ms,mean_solver_ms,mean_refine_ms,"
             "mean_traj_ms\n";
      for (size_t i = 0; i < rows.size();) {
        size_t j = i;
        std::vector<double> elapsed, distance, wall, map_ms, frontier_ms, matrix_ms, solver_ms,
            refine_ms, traj_ms;
        while (j < rows.size() && rows[j].scenario == rows[i].scenario &&
               rows[j].planner == rows[i].planner) {
          elapsed.push_back(rows[j].metrics.elapsed);
          distance.push_back(rows[j].metrics.flight_distance);
          wall.push_back(rows[j].wall_s);
          map_ms.push_back(rows[j].metrics.totals.map_ms);
          frontier_ms.push_back(rows[j].metrics.totals.frontier_ms);
          matrix_ms.push_back(rows[j].metrics.totals.matrix_ms);
          solver_ms.push_back(rows[j].metrics.totals.solver_ms);
          refine_ms.push_back(rows[j].metrics.totals.refine_ms);
          traj_ms.push_back(rows[j].metrics.totals.traj_ms);
          ++j;
        }
        std::snprintf(line, sizeof(line),
                      "%s,%s,%zu,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f\n",
                      rows[i].scenario.c_str(), rows[i].planner.c_str(), j - i, mean(elapsed),
                      stddev(elapsed), mean(distance), stddev(distance), mean(wall), stddev(wall),
                      mean(map_ms), mean(frontier_ms), mean(matrix_ms), mean(solver_ms),
                      mean(refine_ms), mean(traj_ms));
        agg << line;
        i = j;
      }

      bool any_incomplete = false;
      for (const BenchRow& r : rows) any_incomplete |= !r.metrics.complete;
      std::cout << "wrote " << rows.size() << " rows to " << bench_out << "\n";
      return any_incomplete ? 2 : 0;
    }
  } catch (const fuel::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
