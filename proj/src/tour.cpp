#include "fuel/tour.hpp"

#include "fuel/astar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fuel {

double consistencyCost(const Eigen::Vector3d& p0, const Eigen::Vector3d& v0,
                       const Eigen::Vector3d& p) {
  const Eigen::Vector3d d = p - p0;
  const double dn = d.norm();
  const double vn = v0.norm();
  if (vn < 1e-3 || dn < 1e-6) return 0.0;
  const double c = std::clamp(d.dot(v0) / (dn * vn), -1.0, 1.0);
  return std::acos(c);
}

CostMatrix buildCostMatrix(const FrontierRegistry& registry, const VoxelGrid& grid,
                           const CurrentState& state, const DynLimits& limits,
                           const PlannerParams& params) {
  return buildCostMatrix(registry.clusters(), grid, state, limits, params);
}

CostMatrix buildCostMatrix(const std::map<int, FrontierCluster>& clusters, const VoxelGrid& grid,
                           const CurrentState& state, const DynLimits& limits,
                           const PlannerParams& params) {
  CostMatrix out;
  for (const auto& [id, cluster] : clusters)
    if (!cluster.dormant) out.cluster_ids.push_back(id);
  out.n = static_cast<int>(out.cluster_ids.size());
  out.m = Eigen::MatrixXd::Zero(out.n + 1, out.n + 1);
  for (int k1 = 1; k1 <= out.n; ++k1) {
    const FrontierCluster& a = clusters.at(out.cluster_ids[k1 - 1]);
    for (int k2 = k1 + 1; k2 <= out.n; ++k2) {
      const int id2 = out.cluster_ids[k2 - 1];
      auto it = a.costs.find(id2);
      if (it == a.costs.end())
        throw std::runtime_error("cost matrix: missing connection cost between clusters " +
                                 std::to_string(a.id) + " and " + std::to_string(id2));
      out.m(k1, k2) = it->second.t_lb;
      out.m(k2, k1) = it->second.t_lb;
    }
  }

  for (int k = 1; k <= out.n; ++k) {
    const FrontierCluster& cluster = clusters.at(out.cluster_ids[k - 1]);
    const Viewpoint& vp = cluster.top();
    const PathResult path = astar(grid, state.position, vp.position);
    const double t = path.ok() ? timeLowerBound(state.yaw, vp.yaw, path.length, limits)
                               : kUnreachableCost;
    out.m(0, k) = t + params.w_c * consistencyCost(state.position, state.velocity, vp.position);
    out.m(k, 0) = 0.0;
  }
  return out;
}

namespace {

double openTourCost(const CostMatrix& matrix, const std::vector<int>& nodes) {
  double cost = 0.0;
  int prev = 0;
  for (int node : nodes) {
    cost += matrix.m(prev, node);
    prev = node;
  }
  return cost;
}

// Exact DP over closed tours through 0; the zero return column makes the
// recovered open tour carry the same cost.
std::vector<int> heldKarp(const CostMatrix& matrix) {
  const int n = matrix.n;
  const size_t full = (size_t{1} << n) - 1;
  std::vector<double> dp((full + 1) * n, std::numeric_limits<double>::infinity());
  std::vector<int> parent((full + 1) * n, -1);
  auto at = [n](size_t mask, int j) { return mask * n + j; };

  for (int j = 0; j < n; ++j) dp[at(size_t{1} << j, j)] = matrix.m(0, j + 1);
  for (size_t mask = 1; mask <= full; ++mask) {
    for (int j = 0; j < n; ++j) {
      if (!(mask & (size_t{1} << j))) continue;
      const double base = dp[at(mask, j)];
      if (!std::isfinite(base)) continue;
      for (int k = 0; k < n; ++k) {
        if (mask & (size_t{1} << k)) continue;
        const size_t next_mask = mask | (size_t{1} << k);
        const double cand = base + matrix.m(j + 1, k + 1);
        if (cand < dp[at(next_mask, k)]) {
          dp[at(next_mask, k)] = cand;
          parent[at(next_mask, k)] = j;
        }
      }
    }
  }

  int best_end = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double closed = dp[at(full, j)] + matrix.m(j + 1, 0);
    if (closed < best) {
      best = closed;
      best_end = j;
    }
  }

  std::vector<int> nodes(n);
  size_t mask = full;
  int j = best_end;
  for (int i = n - 1; i >= 0; --i) {
    nodes[i] = j + 1;
    const int pj = parent[at(mask, j)];
    mask &= ~(size_t{1} << j);
    j = pj;
  }
  return nodes;
}

std::vector<int> nearestNeighbor(const CostMatrix& matrix) {
  const int n = matrix.n;
  std::vector<bool> used(n + 1, false);
  std::vector<int> nodes;
  nodes.reserve(n);
  int cur = 0;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k) {
      if (used[k]) continue;
      if (matrix.m(cur, k) < best_cost) {
        best_cost = matrix.m(cur, k);
        best = k;
      }
    }
    used[best] = true;
    nodes.push_back(best);
    cur = best;
  }
  return nodes;
}

// Or-opt (segment relocation, orientation kept) and 2-opt with the reversed
// segment re-evaluated exactly, both safe under asymmetric costs.
void improveTour(const CostMatrix& matrix, std::vector<int>& nodes, int rounds) {
  const int n = static_cast<int>(nodes.size());
  if (n < 2) return;
  double cost = openTourCost(matrix, nodes);
  for (int round = 0; round < rounds; ++round) {
    bool improved = false;
    // Or-opt
    for (int len = 1; len <= std::min(3, n - 1); ++len) {
      for (int i = 0; i + len <= n; ++i) {
        std::vector<int> segment(nodes.begin() + i, nodes.begin() + i + len);
        std::vector<int> rest;
        rest.reserve(n - len);
        rest.insert(rest.end(), nodes.begin(), nodes.begin() + i);
        rest.insert(rest.end(), nodes.begin() + i + len, nodes.end());
        for (int q = 0; q <= static_cast<int>(rest.size()); ++q) {
          if (q == i) continue;  // reinsertion at the original spot
          std::vector<int> cand;
          cand.reserve(n);
          cand.insert(cand.end(), rest.begin(), rest.begin() + q);
          cand.insert(cand.end(), segment.begin(), segment.end());
          cand.insert(cand.end(), rest.begin() + q, rest.end());
          const double c = openTourCost(matrix, cand);
          if (c < cost - 1e-12) {
            nodes = cand;
            cost = c;
            improved = true;
          }
        }
      }
    }
    // 2-opt (segment reversal)
    for (int i = 0; i < n - 1; ++i) {
      for (int j = i + 1; j < n; ++j) {
        std::vector<int> cand(nodes);
        std::reverse(cand.begin() + i, cand.begin() + j + 1);
        const double c = openTourCost(matrix, cand);
        if (c < cost - 1e-12) {
          nodes = std::move(cand);
          cost = c;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
}

}  // namespace

Tour solveAtsp(const CostMatrix& matrix, const PlannerParams& params) {
  Tour tour;
  if (matrix.n == 0) return tour;

  std::vector<int> nodes;
  if (matrix.n <= params.exact_atsp_limit) {
    nodes = heldKarp(matrix);
  } else {
    nodes = nearestNeighbor(matrix);
    improveTour(matrix, nodes, params.two_opt_rounds);
  }

  tour.cost = openTourCost(matrix, nodes);
  tour.order.reserve(nodes.size());
  for (int node : nodes) tour.order.push_back(matrix.cluster_ids[node - 1]);
  return tour;
}

double refinementCost(const std::vector<Viewpoint>& selection, const Viewpoint* anchor,
                      const CurrentState& state, const DynLimits& limits,
                      const PlannerParams& params) {
  double cost = timeLowerBound(state.yaw, selection.front().yaw,
                               (selection.front().position - state.position).norm(), limits) +
                params.w_c * consistencyCost(state.position, state.velocity,
                                             selection.front().position);
  for (size_t k = 1; k < selection.size(); ++k)
    cost += timeLowerBound(selection[k - 1].yaw, selection[k].yaw,
                           (selection[k].position - selection[k - 1].position).norm(), limits);
  if (anchor != nullptr)
    cost += timeLowerBound(selection.back().yaw, anchor->yaw,
                           (anchor->position - selection.back().position).norm(), limits);
  return cost;
}

RefinedTour refineLocal(const Tour& tour, const FrontierRegistry& registry,
                        const CurrentState& state, const DynLimits& limits,
                        const PlannerParams& params) {
  return refineLocal(tour, registry.clusters(), state, limits, params);
}

RefinedTour refineLocal(const Tour& tour, const std::map<int, FrontierCluster>& clusters,
                        const CurrentState& state, const DynLimits& limits,
                        const PlannerParams& params) {
  RefinedTour out;
  if (tour.order.empty()) return out;

  // Tour prefix whose representative viewpoints lie within the refinement
  // radius; the first cluster always participates.
  size_t n_rf = 0;
  for (size_t i = 0; i < tour.order.size(); ++i) {
    const FrontierCluster& cluster = clusters.at(tour.order[i]);
    if (i > 0 && (cluster.top().position - state.position).norm() >= params.refine_radius) break;
    ++n_rf;
  }

  std::vector<const FrontierCluster*> layers;
  for (size_t i = 0; i < n_rf; ++i) layers.push_back(&clusters.at(tour.order[i]));
  const Viewpoint* anchor = nullptr;
  if (tour.order.size() > n_rf) anchor = &clusters.at(tour.order[n_rf]).top();

  auto edge = [&](const Eigen::Vector3d& p1, double yaw1, const Eigen::Vector3d& p2, double yaw2) {
    return timeLowerBound(yaw1, yaw2, (p2 - p1).norm(), limits);
  };

  // Forward pass over the layered DAG.
  std::vector<std::vector<double>> best(layers.size());
  std::vector<std::vector<int>> from(layers.size());
  for (size_t l = 0; l < layers.size(); ++l) {
    const auto& vps = layers[l]->viewpoints;
    best[l].assign(vps.size(), std::numeric_limits<double>::infinity());
    from[l].assign(vps.size(), -1);
    for (size_t j = 0; j < vps.size(); ++j) {
      if (l == 0) {
        best[l][j] = edge(state.position, state.yaw, vps[j].position, vps[j].yaw) +
                     params.w_c * consistencyCost(state.position, state.velocity, vps[j].position);
      } else {
        const auto& prev = layers[l - 1]->viewpoints;
        for (size_t k = 0; k < prev.size(); ++k) {
          const double c =
              best[l - 1][k] + edge(prev[k].position, prev[k].yaw, vps[j].position, vps[j].yaw);
          if (c < best[l][j]) {
            best[l][j] = c;
            from[l][j] = static_cast<int>(k);
          }
        }
      }
    }
  }

  const auto& last = layers.back()->viewpoints;
  double best_total = std::numeric_limits<double>::infinity();
  int best_j = 0;
  for (size_t j = 0; j < last.size(); ++j) {
    double total = best[layers.size() - 1][j];
    if (anchor != nullptr)
      total += edge(last[j].position, last[j].yaw, anchor->position, anchor->yaw);
    if (total < best_total) {
      best_total = total;
      best_j = static_cast<int>(j);
    }
  }

  std::vector<int> choice(layers.size());
  int j = best_j;
  for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
    choice[l] = j;
    j = from[l][j];
  }

  out.cost = best_total;
  for (size_t l = 0; l < layers.size(); ++l) {
    out.cluster_ids.push_back(layers[l]->id);
    out.viewpoints.push_back(layers[l]->viewpoints[choice[l]]);
  }
  return out;
}

}  // namespace fuel
