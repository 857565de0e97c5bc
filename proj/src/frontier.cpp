#include "fuel/frontier.hpp"

#include "fuel/astar.hpp"
#include "fuel/raycast.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <ostream>
#include <set>

namespace fuel {

namespace {

const std::array<Eigen::Vector3i, 6>& neighbors6() {
  static const std::array<Eigen::Vector3i, 6> n = {
      Eigen::Vector3i(1, 0, 0),  Eigen::Vector3i(-1, 0, 0), Eigen::Vector3i(0, 1, 0),
      Eigen::Vector3i(0, -1, 0), Eigen::Vector3i(0, 0, 1),  Eigen::Vector3i(0, 0, -1)};
  return n;
}

std::vector<Eigen::Vector3i> neighbors26Offsets() {
  std::vector<Eigen::Vector3i> out;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx || dy || dz) out.emplace_back(dx, dy, dz);
  return out;
}

// Distance from a point to a world-space box (0 inside).
double pointBoxDistance(const Eigen::Vector3d& p, const Eigen::Vector3d& lo,
                        const Eigen::Vector3d& hi) {
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) d[i] = std::max({lo[i] - p[i], 0.0, p[i] - hi[i]});
  return d.norm();
}

}  // namespace

bool isFrontier(const VoxelGrid& grid, const Eigen::Vector3i& v) {
  if (!grid.isFree(v)) return false;
  const GridConfig& cfg = grid.config();
  for (const auto& off : neighbors6()) {
    const Eigen::Vector3i nb = v + off;
    if (cfg.inBounds(nb) && grid.isUnknown(nb)) return true;
  }
  return false;
}

double timeLowerBound(double yaw1, double yaw2, double path_length, const DynLimits& limits) {
  double dyaw = std::abs(yaw1 - yaw2);
  dyaw = std::min(dyaw, 2.0 * M_PI - dyaw);
  return std::max(path_length / limits.v_max, dyaw / limits.xi_dot_max);
}

namespace {

const std::vector<Eigen::Vector3i>& nb26() {
  static const std::vector<Eigen::Vector3i> k = neighbors26Offsets();
  return k;
}

struct WeightedOffset {
  Eigen::Vector3i d;
  double w;
};

const std::vector<WeightedOffset>& nb26Weighted() {
  static const std::vector<WeightedOffset> k = [] {
    std::vector<WeightedOffset> out;
    for (const auto& d : neighbors26Offsets()) out.push_back({d, d.cast<double>().norm()});
    return out;
  }();
  return k;
}

void pcaSplitRec(std::vector<Eigen::Vector3i>&& cells, double resolution, double threshold,
                 std::vector<std::vector<Eigen::Vector3i>>& out) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& c : cells) mean += c.cast<double>();
  mean /= static_cast<double>(cells.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& c : cells) {
    const Eigen::Vector3d d = c.cast<double>() - mean;
    cov += d * d.transpose();
  }
  cov *= resolution * resolution / static_cast<double>(cells.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  if (es.eigenvalues()(2) <= threshold) {
    out.push_back(std::move(cells));
    return;
  }

  Eigen::Vector3d axis = es.eigenvectors().col(2);
  int amax = 0;
  axis.cwiseAbs().maxCoeff(&amax);
  if (axis[amax] < 0.0) axis = -axis;

  std::vector<Eigen::Vector3i> pos, neg;
  for (const auto& c : cells) {
    if ((c.cast<double>() - mean).dot(axis) >= 0.0)
      pos.push_back(c);
    else
      neg.push_back(c);
  }
  // A positive eigenvalue guarantees both sides are non-empty.
  pcaSplitRec(std::move(pos), resolution, threshold, out);
  pcaSplitRec(std::move(neg), resolution, threshold, out);
}

}  // namespace

std::vector<std::vector<Eigen::Vector3i>> pcaSplit(const std::vector<Eigen::Vector3i>& cells,
                                                   double resolution, double threshold) {
  std::vector<std::vector<Eigen::Vector3i>> out;
  if (cells.empty()) return out;
  pcaSplitRec(std::vector<Eigen::Vector3i>(cells), resolution, threshold, out);
  return out;
}

namespace {

// Occlusion test shared by coverage() and the yaw sweep: line of sight from p
// to the cell center must cross no occupied voxel before the cell.
bool lineOfSight(const VoxelGrid& grid, const Eigen::Vector3d& from, const Eigen::Vector3i& cell) {
  const Eigen::Vector3d target = grid.config().indexToPos(cell);
  bool clear = true;
  raycastVisit(grid.config(), from, target, [&](const Eigen::Vector3i& v) {
    if (v == cell) return false;  // reached the cell itself
    if (grid.isOccupied(v)) {
      clear = false;
      return false;
    }
    return true;
  });
  return clear;
}

}  // namespace

int coverage(const VoxelGrid& grid, const Eigen::Vector3d& position, double yaw,
             const std::vector<Eigen::Vector3i>& cells, const SensorModel& sensor) {
  int count = 0;
  for (const auto& cell : cells) {
    const Eigen::Vector3d c = grid.config().indexToPos(cell);
    if (!insideFov(sensor, position, yaw, c)) continue;
    if (lineOfSight(grid, position, cell)) ++count;
  }
  return count;
}

std::vector<Viewpoint> generateViewpoints(const VoxelGrid& grid, const Esdf& esdf,
                                          const Eigen::Vector3d& centroid,
                                          const std::vector<Eigen::Vector3i>& cells,
                                          const SensorModel& sensor, const FrontierParams& params) {
  const GridConfig& cfg = grid.config();
  std::vector<Viewpoint> survivors;

  // Per-cell azimuth/qualification cache, rebuilt per candidate position.
  std::vector<double> azimuths;
  azimuths.reserve(cells.size());

  for (double radius : params.cyl_radii) {
    for (int a = 0; a < params.cyl_angles_per_ring; ++a) {
      const double theta = 2.0 * M_PI * a / params.cyl_angles_per_ring;
      for (double dz : params.z_offsets) {
        const Eigen::Vector3d p =
            centroid + Eigen::Vector3d(radius * std::cos(theta), radius * std::sin(theta), dz);
        const Eigen::Vector3i idx = cfg.posToIndex(p);
        if (!cfg.inBounds(idx) || !grid.isFree(idx)) continue;
        if (esdf.at(idx) < params.clearance) continue;

        // Collect azimuths of cells passing range, elevation and occlusion;
        // the yaw window check is applied per sweep angle below.
        azimuths.clear();
        int zero_range = 0;
        for (const auto& cell : cells) {
          const Eigen::Vector3d c = cfg.indexToPos(cell);
          const Eigen::Vector3d d = c - p;
          const double range = d.norm();
          if (range > sensor.max_range) continue;
          if (range < 1e-9) {
            if (lineOfSight(grid, p, cell)) ++zero_range;
            continue;
          }
          const double elevation = std::atan2(d.z(), d.head<2>().norm());
          if (std::abs(elevation) > 0.5 * sensor.vertical_fov) continue;
          if (!lineOfSight(grid, p, cell)) continue;
          azimuths.push_back(std::atan2(d.y(), d.x()));
        }
        if (static_cast<int>(azimuths.size()) + zero_range < params.min_coverage) continue;

        int best_count = -1;
        double best_yaw = 0.0;
        for (int b = 0; b < params.yaw_bins; ++b) {
          const double cand_yaw = wrapToPi(-M_PI + (b + 0.5) * 2.0 * M_PI / params.yaw_bins);
          int count = zero_range;
          for (double az : azimuths)
            if (std::abs(wrapToPi(az - cand_yaw)) <= 0.5 * sensor.horizontal_fov) ++count;
          if (count > best_count) {
            best_count = count;
            best_yaw = cand_yaw;
          }
        }
        if (best_count >= params.min_coverage)
          survivors.push_back({p, best_yaw, best_count});
      }
    }
  }

  std::stable_sort(survivors.begin(), survivors.end(),
                   [](const Viewpoint& a, const Viewpoint& b) { return a.coverage > b.coverage; });
  if (static_cast<int>(survivors.size()) > params.max_viewpoints)
    survivors.resize(params.max_viewpoints);
  return survivors;
}

FrontierRegistry::FrontierRegistry(const GridConfig& config, const FrontierParams& params,
                                   const SensorModel& sensor, const DynLimits& limits)
    : config_(config),
      params_(params),
      sensor_(sensor),
      limits_(limits),
      owner_(config.voxelCount(), -1),
      visit_stamp_(config.voxelCount(), 0) {}

Aabb FrontierRegistry::influenceBox(const FrontierCluster& cluster) const {
  const double reach = *std::max_element(params_.cyl_radii.begin(), params_.cyl_radii.end());
  double zreach = 0.0;
  for (double dz : params_.z_offsets) zreach = std::max(zreach, std::abs(dz));
  const double margin = params_.clearance + 2.0 * config_.resolution;

  Eigen::Vector3d lo = config_.indexToPos(cluster.bbox.min);
  Eigen::Vector3d hi = config_.indexToPos(cluster.bbox.max);
  lo = lo.cwiseMin(cluster.centroid - Eigen::Vector3d(reach, reach, zreach));
  hi = hi.cwiseMax(cluster.centroid + Eigen::Vector3d(reach, reach, zreach));
  lo -= Eigen::Vector3d::Constant(margin);
  hi += Eigen::Vector3d::Constant(margin);

  Aabb box;
  box.extend(config_.posToIndex(lo));
  box.extend(config_.posToIndex(hi));
  return box.clamped(config_.dims);
}

void FrontierRegistry::regenerateViewpoints(FrontierCluster& cluster, const VoxelGrid& grid,
                                            const Esdf& esdf) {
  cluster.viewpoints = generateViewpoints(grid, esdf, cluster.centroid, cluster.cells, sensor_, params_);
  cluster.dormant = cluster.viewpoints.empty();
}

ChangeSet FrontierRegistry::detectAndUpdate(const VoxelGrid& grid, const ScanResult& scan,
                                            const Esdf& esdf) {
  std::vector<Eigen::Vector3i> fresh_free;
  for (const auto& c : scan.changed_cells)
    if (grid.isFree(c)) fresh_free.push_back(c);
  return update(grid, scan.changed, fresh_free, esdf);
}

ChangeSet FrontierRegistry::detectAndUpdate(const VoxelGrid& grid, const Aabb& updated,
                                            const Esdf& esdf) {
  std::vector<Eigen::Vector3i> fresh_free;
  if (!updated.empty()) {
    const Aabb box = updated.clamped(config_.dims);
    for (int z = box.min.z(); z <= box.max.z(); ++z)
      for (int y = box.min.y(); y <= box.max.y(); ++y)
        for (int x = box.min.x(); x <= box.max.x(); ++x)
          if (grid.isFree({x, y, z})) fresh_free.push_back({x, y, z});
  }
  return update(grid, updated, fresh_free, esdf);
}

ChangeSet FrontierRegistry::update(const VoxelGrid& grid, const Aabb& updated,
                                   const std::vector<Eigen::Vector3i>& fresh_free,
                                   const Esdf& esdf) {
  ChangeSet change;
  if (updated.empty()) return change;

  const Aabb inflated = updated.inflated(1).clamped(config_.dims);

  // Narrow phase: a candidate cluster dies when any of its cells stopped being
  // frontier. Death always takes the whole region-growing component so the
  // remainder is re-clustered exactly as a from-scratch pass would.
  std::set<int> doomed_components;
  for (const auto& [id, cluster] : clusters_) {
    if (!cluster.bbox.intersects(inflated)) continue;
    if (doomed_components.count(cluster.component)) continue;
    for (const auto& cell : cluster.cells) {
      if (!isFrontier(grid, cell)) {
        doomed_components.insert(cluster.component);
        break;
      }
    }
  }

  std::vector<Eigen::Vector3i> seeds;
  auto removeCluster = [&](int id) {
    auto it = clusters_.find(id);
    FrontierCluster& cluster = it->second;
    for (const auto& cell : cluster.cells) {
      owner_[config_.linear(cell)] = -1;
      if (isFrontier(grid, cell)) seeds.push_back(cell);
    }
    if (!cluster.dormant) change.removed_ids.push_back(id);
    clusters_.erase(it);
  };

  std::vector<int> to_remove;
  for (const auto& [id, cluster] : clusters_)
    if (doomed_components.count(cluster.component)) to_remove.push_back(id);
  for (int id : to_remove) removeCluster(id);

  // Seed scan over the (slightly inflated) update box.
  for (int z = inflated.min.z(); z <= inflated.max.z(); ++z)
    for (int y = inflated.min.y(); y <= inflated.max.y(); ++y)
      for (int x = inflated.min.x(); x <= inflated.max.x(); ++x) {
        const Eigen::Vector3i v(x, y, z);
        if (owner_[config_.linear(v)] < 0 && isFrontier(grid, v)) seeds.push_back(v);
      }

  // Region growing (26-connected) over unowned frontier cells. Touching an
  // owned cell dissolves that cluster's entire component into the growth.
  ++visit_epoch_;
  auto visited = [&](const Eigen::Vector3i& v) { return visit_stamp_[config_.linear(v)] == visit_epoch_; };
  auto markVisited = [&](const Eigen::Vector3i& v) { visit_stamp_[config_.linear(v)] = visit_epoch_; };

  std::vector<std::vector<Eigen::Vector3i>> groups;
  for (const auto& seed : seeds) {
    if (visited(seed) || owner_[config_.linear(seed)] >= 0) continue;
    std::vector<Eigen::Vector3i> group;
    std::deque<Eigen::Vector3i> queue;
    queue.push_back(seed);
    markVisited(seed);
    while (!queue.empty()) {
      const Eigen::Vector3i cur = queue.front();
      queue.pop_front();
      group.push_back(cur);
      for (const auto& off : nb26()) {
        const Eigen::Vector3i nb = cur + off;
        if (!config_.inBounds(nb) || visited(nb)) continue;
        const int owner = owner_[config_.linear(nb)];
        if (owner >= 0) {
          // Dissolve the touched component; its cells join the frontier pool.
          const int comp = clusters_.at(owner).component;
          std::vector<int> comp_ids;
          for (const auto& [cid, cl] : clusters_)
            if (cl.component == comp) comp_ids.push_back(cid);
          for (int cid : comp_ids) {
            auto it = clusters_.find(cid);
            for (const auto& cell : it->second.cells) {
              owner_[config_.linear(cell)] = -1;
              if (!visited(cell)) {
                markVisited(cell);
                queue.push_back(cell);
              }
            }
            if (!it->second.dormant) change.removed_ids.push_back(cid);
            clusters_.erase(it);
          }
          continue;
        }
        if (!isFrontier(grid, nb)) continue;
        markVisited(nb);
        queue.push_back(nb);
      }
    }
    // Canonical cell order keeps the PCA recursion and centroid sums
    // independent of the growth visit order.
    std::sort(group.begin(), group.end(),
              [this](const Eigen::Vector3i& a, const Eigen::Vector3i& b) {
                return config_.linear(a) < config_.linear(b);
              });
    groups.push_back(std::move(group));
  }

  // Small groups are noise; the rest are split recursively and registered.
  for (auto& group : groups) {
    if (static_cast<int>(group.size()) < params_.min_cluster_size) continue;
    const int component = next_component_++;
    for (auto& cells : pcaSplit(group, config_.resolution, params_.pca_split_threshold)) {
      FrontierCluster cluster;
      cluster.id = next_id_++;
      cluster.component = component;
      cluster.cells = std::move(cells);
      cluster.centroid = Eigen::Vector3d::Zero();
      for (const auto& c : cluster.cells) {
        cluster.bbox.extend(c);
        cluster.centroid += config_.indexToPos(c);
      }
      cluster.centroid /= static_cast<double>(cluster.cells.size());
      cluster.influence = influenceBox(cluster);
      regenerateViewpoints(cluster, grid, esdf);
      for (const auto& c : cluster.cells) owner_[config_.linear(c)] = cluster.id;
      if (!cluster.dormant) change.new_ids.push_back(cluster.id);
      clusters_.emplace(cluster.id, std::move(cluster));
    }
  }

  // Surviving clusters whose viewpoint surroundings changed: regenerate, and
  // re-cost when the representative viewpoint moved.
  std::vector<int> new_id_set(change.new_ids);
  for (auto& [id, cluster] : clusters_) {
    if (std::binary_search(new_id_set.begin(), new_id_set.end(), id)) continue;
    if (!cluster.influence.intersects(updated)) continue;
    const bool was_dormant = cluster.dormant;
    const Viewpoint old_top = cluster.dormant ? Viewpoint{} : cluster.top();
    regenerateViewpoints(cluster, grid, esdf);
    if (was_dormant && !cluster.dormant) {
      change.new_ids.push_back(id);
    } else if (!was_dormant && cluster.dormant) {
      change.removed_ids.push_back(id);
    } else if (!was_dormant && !cluster.dormant) {
      const Viewpoint& now = cluster.top();
      if ((now.position - old_top.position).norm() > 1e-12 ||
          std::abs(now.yaw - old_top.yaw) > 1e-12)
        change.new_ids.push_back(id);
    }
  }

  // Connection costs can only shorten, and a strictly shorter path must pass
  // through a cell that became free this update. A multi-source shortest-path
  // flood from those cells lower-bounds any such detour; pairs whose stored
  // length beats the bound keep their entries, the rest are re-costed.
  if (!fresh_free.empty()) {
    std::vector<double> flood(config_.voxelCount(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> open;
    for (const auto& c : fresh_free) {
      const size_t adr = config_.linear(c);
      flood[adr] = 0.0;
      open.push({0.0, adr});
    }
    while (!open.empty()) {
      const auto [d, adr] = open.top();
      open.pop();
      if (d > flood[adr]) continue;
      const Eigen::Vector3i cur = config_.delinear(adr);
      for (const auto& off : nb26Weighted()) {
        const Eigen::Vector3i nb = cur + off.d;
        if (!config_.inBounds(nb) || !grid.isFree(nb)) continue;
        const size_t nadr = config_.linear(nb);
        const double nd = d + config_.resolution * off.w;
        if (nd < flood[nadr]) {
          flood[nadr] = nd;
          open.push({nd, nadr});
        }
      }
    }
    // Extra slack for the straight-line snap between exact viewpoint
    // positions and their voxel centers.
    const double snap = 2.0 * config_.resolution * std::sqrt(3.0);
    auto reach_bound = [&](const FrontierCluster& c) {
      const Eigen::Vector3i idx = config_.posToIndex(c.top().position);
      return config_.inBounds(idx) ? flood[config_.linear(idx)]
                                   : std::numeric_limits<double>::infinity();
    };

    std::set<int> flagged(change.new_ids.begin(), change.new_ids.end());
    for (auto it1 = clusters_.begin(); it1 != clusters_.end(); ++it1) {
      const FrontierCluster& a = it1->second;
      if (a.dormant || flagged.count(a.id)) continue;
      const double da = reach_bound(a);
      if (!std::isfinite(da)) continue;
      for (auto it2 = std::next(it1); it2 != clusters_.end(); ++it2) {
        const FrontierCluster& b = it2->second;
        if (b.dormant || flagged.count(b.id)) continue;
        auto entry = a.costs.find(b.id);
        if (entry == a.costs.end()) continue;
        const double db = reach_bound(b);
        if (!std::isfinite(db)) continue;
        if (entry->second.path_length > da + db - snap - 1e-9) {
          flagged.insert(a.id);
          change.new_ids.push_back(a.id);
          break;  // a full re-cost of `a` refreshes all its pairs
        }
      }
    }
  }

  std::sort(change.removed_ids.begin(), change.removed_ids.end());
  change.removed_ids.erase(std::unique(change.removed_ids.begin(), change.removed_ids.end()),
                           change.removed_ids.end());
  std::sort(change.new_ids.begin(), change.new_ids.end());
  change.new_ids.erase(std::unique(change.new_ids.begin(), change.new_ids.end()),
                       change.new_ids.end());
  return change;
}

void FrontierRegistry::updateCosts(const VoxelGrid& grid, const ChangeSet& change) {
  last_astar_calls_ = 0;
  last_k_new_ = change.new_ids.size();

  // Drop rows referencing clusters that left the active set, plus stale rows
  // of clusters about to be re-costed.
  for (auto& [id, cluster] : clusters_) {
    for (int removed : change.removed_ids) cluster.costs.erase(removed);
    for (int renew : change.new_ids) cluster.costs.erase(renew);
  }
  for (int removed : change.removed_ids) {
    auto it = clusters_.find(removed);
    if (it != clusters_.end()) it->second.costs.clear();  // went dormant
  }
  for (int renew : change.new_ids) {
    auto it = clusters_.find(renew);
    if (it != clusters_.end()) it->second.costs.clear();
  }

  // One cost row per flagged cluster: a single shortest-path sweep from its
  // top viewpoint reaches every peer viewpoint and terminates once all of
  // them are settled. Each filled pair counts as one search toward the
  // complexity budget.
  std::vector<double> dist(config_.voxelCount(), std::numeric_limits<double>::infinity());
  std::vector<uint32_t> dist_stamp(config_.voxelCount(), 0);
  uint32_t dist_epoch = 0;

  for (size_t i = 0; i < change.new_ids.size(); ++i) {
    auto it_new = clusters_.find(change.new_ids[i]);
    if (it_new == clusters_.end() || it_new->second.dormant) continue;
    FrontierCluster& fresh = it_new->second;

    // Peers whose pair with `fresh` is computed in this sweep.
    std::vector<FrontierCluster*> peers;
    std::vector<size_t> peer_addresses;
    for (auto& [other_id, other] : clusters_) {
      if (other_id == fresh.id || other.dormant) continue;
      if (other_id > fresh.id &&
          std::binary_search(change.new_ids.begin(), change.new_ids.end(), other_id))
        continue;  // the later sweep owns new-new pairs
      if (fresh.costs.count(other_id)) continue;
      peers.push_back(&other);
      const Eigen::Vector3i idx = config_.posToIndex(other.top().position);
      peer_addresses.push_back(config_.inBounds(idx) ? config_.linear(idx) : SIZE_MAX);
    }
    if (peers.empty()) continue;

    ++dist_epoch;
    auto distAt = [&](size_t adr) {
      return dist_stamp[adr] == dist_epoch ? dist[adr] : std::numeric_limits<double>::infinity();
    };
    auto setDist = [&](size_t adr, double d) {
      dist[adr] = d;
      dist_stamp[adr] = dist_epoch;
    };

    const Eigen::Vector3i source = config_.posToIndex(fresh.top().position);
    size_t unsettled = 0;
    std::vector<uint8_t> settled(peers.size(), 0);
    for (size_t p = 0; p < peers.size(); ++p)
      if (peer_addresses[p] != SIZE_MAX && grid.isFree(config_.delinear(peer_addresses[p])))
        ++unsettled;
      else
        settled[p] = 1;  // blocked or out-of-bounds peer voxel: unreachable

    using Item = std::pair<double, size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> open;
    if (config_.inBounds(source) && grid.isFree(source)) {
      setDist(config_.linear(source), 0.0);
      open.push({0.0, config_.linear(source)});
    }
    std::map<size_t, int> pending;  // peer voxel -> count of unsettled peers
    for (size_t p = 0; p < peers.size(); ++p)
      if (!settled[p]) ++pending[peer_addresses[p]];

    while (!open.empty() && unsettled > 0) {
      const auto [d, adr] = open.top();
      open.pop();
      if (d > distAt(adr)) continue;
      auto hit = pending.find(adr);
      if (hit != pending.end()) {
        unsettled -= hit->second;
        pending.erase(hit);
      }
      const Eigen::Vector3i cur = config_.delinear(adr);
      for (const auto& off : nb26Weighted()) {
        const Eigen::Vector3i nb = cur + off.d;
        if (!config_.inBounds(nb) || !grid.isFree(nb)) continue;
        const size_t nadr = config_.linear(nb);
        const double nd = d + config_.resolution * off.w;
        if (nd < distAt(nadr)) {
          setDist(nadr, nd);
          open.push({nd, nadr});
        }
      }
    }

    const Eigen::Vector3d source_center = config_.indexToPos(source);
    const double source_snap = (fresh.top().position - source_center).norm();
    for (size_t p = 0; p < peers.size(); ++p) {
      FrontierCluster& other = *peers[p];
      ++astar_calls_total_;
      ++last_astar_calls_;
      CostEntry entry;
      const double grid_dist =
          peer_addresses[p] == SIZE_MAX ? std::numeric_limits<double>::infinity()
                                        : distAt(peer_addresses[p]);
      if (std::isfinite(grid_dist)) {
        const Eigen::Vector3d peer_center = config_.indexToPos(config_.delinear(peer_addresses[p]));
        entry.path_length = source_snap + grid_dist + (other.top().position - peer_center).norm();
        entry.t_lb = timeLowerBound(fresh.top().yaw, other.top().yaw, entry.path_length, limits_);
      } else {
        entry.path_length = std::numeric_limits<double>::infinity();
        entry.t_lb = kUnreachableCost;
      }
      fresh.costs[other.id] = entry;
      other.costs[fresh.id] = entry;
    }
  }
}

ChangeSet FrontierRegistry::observe(const VoxelGrid& grid, const ScanResult& scan,
                                    const Esdf& esdf) {
  ChangeSet change = detectAndUpdate(grid, scan, esdf);
  updateCosts(grid, change);
  return change;
}

ChangeSet FrontierRegistry::observe(const VoxelGrid& grid, const Aabb& updated, const Esdf& esdf) {
  ChangeSet change = detectAndUpdate(grid, updated, esdf);
  updateCosts(grid, change);
  return change;
}

std::vector<int> FrontierRegistry::activeIds() const {
  std::vector<int> ids;
  for (const auto& [id, cluster] : clusters_)
    if (!cluster.dormant) ids.push_back(id);
  return ids;
}

size_t FrontierRegistry::activeCount() const { return activeIds().size(); }

size_t FrontierRegistry::dormantCount() const { return clusters_.size() - activeIds().size(); }

void FrontierRegistry::writeDebugCsv(std::ostream& os) const {
  os << "id,dormant,cells,centroid_x,centroid_y,centroid_z,bbox_min_x,bbox_min_y,bbox_min_z,"
        "bbox_max_x,bbox_max_y,bbox_max_z,top_x,top_y,top_z,top_yaw,top_coverage,cost_entries\n";
  for (const auto& [id, c] : clusters_) {
    os << id << ',' << (c.dormant ? 1 : 0) << ',' << c.cells.size() << ',' << c.centroid.x() << ','
       << c.centroid.y() << ',' << c.centroid.z() << ',' << c.bbox.min.x() << ',' << c.bbox.min.y()
       << ',' << c.bbox.min.z() << ',' << c.bbox.max.x() << ',' << c.bbox.max.y() << ','
       << c.bbox.max.z() << ',';
    if (c.dormant)
      os << ",,,,,";
    else
      os << c.top().position.x() << ',' << c.top().position.y() << ',' << c.top().position.z()
         << ',' << c.top().yaw << ',' << c.top().coverage << ',';
    os << c.costs.size() << '\n';
  }
}

}  // namespace fuel
