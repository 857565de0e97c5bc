#include "fuel/astar.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace fuel {

namespace {

struct Neighbor {
  Eigen::Vector3i offset;
  double weight;  // in voxel units
};

const std::vector<Neighbor>& neighbors26() {
  static const std::vector<Neighbor> n = [] {
    std::vector<Neighbor> out;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          Eigen::Vector3i o(dx, dy, dz);
          out.push_back({o, std::sqrt(static_cast<double>(o.squaredNorm()))});
        }
    return out;
  }();
  return n;
}

// Epoch-stamped scratch buffers so repeated searches skip re-zeroing.
struct Workspace {
  std::vector<double> g;
  std::vector<uint32_t> stamp_g;
  std::vector<uint8_t> closed;
  std::vector<uint32_t> stamp_closed;
  std::vector<int32_t> parent;
  uint32_t epoch = 0;

  void prepare(size_t n) {
    if (g.size() != n) {
      g.assign(n, 0.0);
      stamp_g.assign(n, 0);
      closed.assign(n, 0);
      stamp_closed.assign(n, 0);
      parent.assign(n, -1);
      epoch = 0;
    }
    ++epoch;
  }

  bool hasG(size_t a) const { return stamp_g[a] == epoch; }
  void setG(size_t a, double v) {
    g[a] = v;
    stamp_g[a] = epoch;
  }
  bool isClosed(size_t a) const { return stamp_closed[a] == epoch && closed[a]; }
  void close(size_t a) {
    closed[a] = 1;
    stamp_closed[a] = epoch;
  }
};

struct HeapItem {
  double f;
  double g;
  size_t adr;
  bool operator>(const HeapItem& o) const {
    if (f != o.f) return f > o.f;
    return adr > o.adr;  // deterministic tie-break
  }
};

}  // namespace

double pathLength(const std::vector<Eigen::Vector3d>& points) {
  double len = 0.0;
  for (size_t i = 1; i < points.size(); ++i) len += (points[i] - points[i - 1]).norm();
  return len;
}

PathResult astar(const VoxelGrid& grid, const Eigen::Vector3d& start, const Eigen::Vector3d& goal) {
  const GridConfig& cfg = grid.config();
  PathResult res;

  const Eigen::Vector3i si = cfg.posToIndex(start);
  const Eigen::Vector3i gi = cfg.posToIndex(goal);
  if (!cfg.inBounds(si) || !cfg.inBounds(gi)) {
    res.status = cfg.inBounds(si) ? PathStatus::Unreachable : PathStatus::StartNotFree;
    return res;
  }
  if (!grid.isFree(si)) {
    res.status = PathStatus::StartNotFree;
    return res;
  }
  if (start == goal) {
    res.status = PathStatus::Ok;
    res.points = {start};
    res.length = 0.0;
    return res;
  }
  if (!grid.isFree(gi)) {
    res.status = PathStatus::Unreachable;
    return res;
  }
  if (si == gi) {
    res.status = PathStatus::Ok;
    res.points = {start, goal};
    res.length = (goal - start).norm();
    return res;
  }

  thread_local Workspace ws;
  ws.prepare(cfg.voxelCount());

  const double r = cfg.resolution;
  auto heuristic = [&](const Eigen::Vector3i& idx) {
    return (gi - idx).cast<double>().norm() * r;
  };

  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> open;
  const size_t sa = cfg.linear(si);
  const size_t ga = cfg.linear(gi);
  ws.setG(sa, 0.0);
  ws.parent[sa] = -1;
  open.push({heuristic(si), 0.0, sa});

  bool found = false;
  while (!open.empty()) {
    const HeapItem top = open.top();
    open.pop();
    if (ws.isClosed(top.adr)) continue;
    ws.close(top.adr);
    if (top.adr == ga) {
      found = true;
      break;
    }
    const Eigen::Vector3i cur = cfg.delinear(top.adr);
    for (const Neighbor& nb : neighbors26()) {
      const Eigen::Vector3i nxt = cur + nb.offset;
      if (!cfg.inBounds(nxt)) continue;
      const size_t na = cfg.linear(nxt);
      if (ws.isClosed(na) || !grid.isFree(nxt)) continue;
      const double ng = top.g + nb.weight * r;
      if (!ws.hasG(na) || ng < ws.g[na]) {
        ws.setG(na, ng);
        ws.parent[na] = static_cast<int32_t>(top.adr);
        open.push({ng + heuristic(nxt), ng, na});
      }
    }
  }

  if (!found) {
    res.status = PathStatus::Unreachable;
    return res;
  }

  std::vector<Eigen::Vector3d> centers;
  for (int32_t a = static_cast<int32_t>(ga); a >= 0; a = ws.parent[a])
    centers.push_back(cfg.indexToPos(cfg.delinear(static_cast<size_t>(a))));
  std::reverse(centers.begin(), centers.end());

  res.status = PathStatus::Ok;
  res.points.reserve(centers.size() + 2);
  res.points.push_back(start);
  for (const auto& c : centers) res.points.push_back(c);
  res.points.push_back(goal);
  res.length = (centers.front() - start).norm() + ws.g[ga] + (goal - centers.back()).norm();
  return res;
}

}  // namespace fuel
