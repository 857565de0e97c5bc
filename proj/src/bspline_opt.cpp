#include "fuel/bspline_opt.hpp"

#include "fuel/astar.hpp"
#include "fuel/lbfgs.hpp"
#include "fuel/sensor.hpp"

#include <algorithm>
#include <cmath>

namespace fuel {

std::pair<double, double> penalty(double tau1, double tau2) {
  if (tau1 <= tau2) {
    const double d = tau1 - tau2;
    return {d * d, 2.0 * d};
  }
  return {0.0, 0.0};
}

CostTerms totalCost(const std::vector<Eigen::Vector4d>& ctrl, double knot_span, const Esdf& esdf,
                    const DynLimits& limits, const OptimizerWeights& weights,
                    const BoundaryState& boundary, CostGradient* grad) {
  const int n = static_cast<int>(ctrl.size());  // N_b + 1
  const double dt = knot_span;
  CostTerms terms;

  if (grad != nullptr) {
    grad->ctrl.assign(n, Eigen::Vector4d::Zero());
    grad->knot_span = 0.0;
  }
  auto addCtrl = [&](int i, const Eigen::Vector4d& g) {
    if (grad != nullptr) grad->ctrl[i] += g;
  };
  auto addDt = [&](double g) {
    if (grad != nullptr) grad->knot_span += g;
  };

  // Elastic-band smoothness over second differences.
  const Eigen::Vector4d r_s(weights.w_s_p, weights.w_s_p, weights.w_s_p, weights.w_s_xi);
  for (int i = 0; i + 2 < n; ++i) {
    const Eigen::Vector4d s = ctrl[i + 2] - 2.0 * ctrl[i + 1] + ctrl[i];
    const Eigen::Vector4d rs = r_s.cwiseProduct(s);
    terms.smoothness += s.dot(rs);
    addCtrl(i, 2.0 * rs);
    addCtrl(i + 1, -4.0 * rs);
    addCtrl(i + 2, 2.0 * rs);
  }

  // Total trajectory time.
  const int segments = n - UniformBSpline::kDegree;
  terms.time = weights.w_t * segments * dt;
  addDt(weights.w_t * segments);

  // Clearance penalty at position control points.
  for (int i = 0; i < n; ++i) {
    const EsdfSample sample = esdfQuery(esdf, ctrl[i].head<3>());
    const auto [value, dvalue] = penalty(sample.distance, weights.d_min);
    if (value > 0.0) {
      terms.collision += weights.lambda_c * value;
      const Eigen::Vector3d g = weights.lambda_c * dvalue * sample.gradient;
      addCtrl(i, Eigen::Vector4d(g.x(), g.y(), g.z(), 0.0));
    }
  }

  // Velocity/acceleration penalties through derivative control points.
  const Eigen::Vector4d v_lim(limits.v_max, limits.v_max, limits.v_max, limits.xi_dot_max);
  const Eigen::Vector4d a_lim(limits.a_max, limits.a_max, limits.a_max, limits.xi_ddot_max);
  for (int i = 0; i + 1 < n; ++i) {
    const Eigen::Vector4d v = (ctrl[i + 1] - ctrl[i]) / dt;
    for (int axis = 0; axis < 4; ++axis) {
      const double mag = std::abs(v[axis]);
      const auto [value, dvalue] = penalty(v_lim[axis], mag);
      if (value > 0.0) {
        terms.feasibility += weights.lambda_d * value;
        // d value / d mag = -dvalue; chain through |v| = |c_{i+1}-c_i|/dt.
        const double dmag = -weights.lambda_d * dvalue;
        const double sign = v[axis] >= 0.0 ? 1.0 : -1.0;
        Eigen::Vector4d g = Eigen::Vector4d::Zero();
        g[axis] = dmag * sign / dt;
        addCtrl(i + 1, g);
        addCtrl(i, -g);
        addDt(dmag * (-mag / dt));
      }
    }
  }
  for (int i = 0; i + 2 < n; ++i) {
    const Eigen::Vector4d a = (ctrl[i + 2] - 2.0 * ctrl[i + 1] + ctrl[i]) / (dt * dt);
    for (int axis = 0; axis < 4; ++axis) {
      const double mag = std::abs(a[axis]);
      const auto [value, dvalue] = penalty(a_lim[axis], mag);
      if (value > 0.0) {
        terms.feasibility += weights.lambda_d * value;
        const double dmag = -weights.lambda_d * dvalue;
        const double sign = a[axis] >= 0.0 ? 1.0 : -1.0;
        Eigen::Vector4d g = Eigen::Vector4d::Zero();
        g[axis] = dmag * sign / (dt * dt);
        addCtrl(i, g);
        addCtrl(i + 1, -2.0 * g);
        addCtrl(i + 2, g);
        addDt(dmag * (-2.0 * mag / dt));
      }
    }
  }

  // Boundary-state penalty (cubic-specific combinations).
  {
    const Eigen::Vector4d a = (ctrl[0] + 4.0 * ctrl[1] + ctrl[2]) / 6.0 - boundary.x0;
    const Eigen::Vector4d b = (ctrl[2] - ctrl[0]) / (2.0 * dt) - boundary.xd0;
    const Eigen::Vector4d c = (ctrl[2] - 2.0 * ctrl[1] + ctrl[0]) / (dt * dt) - boundary.xdd0;
    const Eigen::Vector4d d = (ctrl[n - 3] + 4.0 * ctrl[n - 2] + ctrl[n - 1]) / 6.0 - boundary.x_next;
    terms.boundary = weights.lambda_bs *
                     (a.squaredNorm() + b.squaredNorm() + c.squaredNorm() + d.squaredNorm());

    const double w = weights.lambda_bs;
    addCtrl(0, w * (2.0 * a / 6.0 - b / dt + 2.0 * c / (dt * dt)));
    addCtrl(1, w * (8.0 * a / 6.0 - 4.0 * c / (dt * dt)));
    addCtrl(2, w * (2.0 * a / 6.0 + b / dt + 2.0 * c / (dt * dt)));
    addCtrl(n - 3, w * 2.0 * d / 6.0);
    addCtrl(n - 2, w * 8.0 * d / 6.0);
    addCtrl(n - 1, w * 2.0 * d / 6.0);
    const Eigen::Vector4d db_ddt = -(ctrl[2] - ctrl[0]) / (2.0 * dt * dt);
    const Eigen::Vector4d dc_ddt = -2.0 * (ctrl[2] - 2.0 * ctrl[1] + ctrl[0]) / (dt * dt * dt);
    addDt(w * (2.0 * b.dot(db_ddt) + 2.0 * c.dot(dc_ddt)));
  }

  return terms;
}

FeasibilityReport checkFeasibility(const UniformBSpline& spline, const Esdf& esdf,
                                   const DynLimits& limits, double d_min) {
  FeasibilityReport rep;
  const auto& ctrl = spline.controls();
  rep.min_clearance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(ctrl.size()); ++i) {
    const double d = esdfQuery(esdf, ctrl[i].head<3>()).distance;
    if (d < rep.min_clearance) {
      rep.min_clearance = d;
      rep.worst_clearance_index = i;
    }
  }

  auto [vel, acc] = spline.derivativeControls();
  for (int i = 0; i < static_cast<int>(vel.size()); ++i) {
    const double m = vel[i].head<3>().cwiseAbs().maxCoeff();
    if (m > rep.max_vel) {
      rep.max_vel = m;
      rep.worst_vel_index = i;
    }
    rep.max_yaw_rate = std::max(rep.max_yaw_rate, std::abs(vel[i].w()));
  }
  for (int i = 0; i < static_cast<int>(acc.size()); ++i) {
    const double m = acc[i].head<3>().cwiseAbs().maxCoeff();
    if (m > rep.max_acc) {
      rep.max_acc = m;
      rep.worst_acc_index = i;
    }
    rep.max_yaw_acc = std::max(rep.max_yaw_acc, std::abs(acc[i].w()));
  }

  rep.ok = rep.min_clearance >= d_min && rep.max_vel <= limits.v_max && rep.max_acc <= limits.a_max &&
           rep.max_yaw_rate <= limits.xi_dot_max && rep.max_yaw_acc <= limits.xi_ddot_max;
  return rep;
}

UniformBSpline initializeFromPath(const std::vector<Eigen::Vector3d>& path, double yaw_start,
                                  double yaw_goal, const DynLimits& limits) {
  if (path.size() < 2) throw std::invalid_argument("spline initialization needs at least 2 path points");

  const double len = pathLength(path);
  const double nominal_step = limits.v_max * 0.3;
  // Degenerate segments get the minimal cubic; everything else enough control
  // points to decouple the start and end boundary terms.
  const int nseg = len < 0.1 ? 3 : std::max(6, static_cast<int>(std::ceil(len / nominal_step)));
  const int nctrl = nseg + 1;
  const double spacing = len / nseg;

  // Arc-length resampling of the polyline.
  std::vector<Eigen::Vector4d> ctrl(nctrl);
  {
    size_t seg = 0;
    double seg_start = 0.0;
    double seg_len = (path[1] - path[0]).norm();
    for (int i = 0; i < nctrl; ++i) {
      const double target = std::min(spacing * i, len);
      while (seg + 2 < path.size() && seg_start + seg_len < target) {
        seg_start += seg_len;
        ++seg;
        seg_len = (path[seg + 1] - path[seg]).norm();
      }
      const double u = seg_len > 1e-12 ? std::clamp((target - seg_start) / seg_len, 0.0, 1.0) : 0.0;
      ctrl[i].head<3>() = path[seg] + u * (path[seg + 1] - path[seg]);
      ctrl[i].w() = 0.0;
    }
    ctrl[nctrl - 1].head<3>() = path.back();
  }

  // Yaw interpolated along the shorter wrap direction, left unwrapped.
  const double dyaw = wrapToPi(yaw_goal - yaw_start);
  for (int i = 0; i < nctrl; ++i)
    ctrl[i].w() = yaw_start + dyaw * static_cast<double>(i) / (nctrl - 1);

  const double yaw_step = std::abs(dyaw) / (nctrl - 1);
  const double dt =
      std::max({spacing / limits.v_max, yaw_step / limits.xi_dot_max, 0.05});
  return UniformBSpline(std::move(ctrl), dt);
}

std::pair<UniformBSpline, OptReport> optimize(const UniformBSpline& init, const Esdf& esdf,
                                              const DynLimits& limits, const OptimizerWeights& weights,
                                              const BoundaryState& boundary, int budget,
                                              const SolverSettings& solver) {
  OptReport report;
  OptimizerWeights w = weights;
  UniformBSpline current = init;

  // The penalties are soft and settle marginally past their thresholds, so
  // the optimizer works against a slightly tightened envelope while the
  // feasibility verdict uses the true one.
  DynLimits inner = limits;
  inner.v_max *= 0.98;
  inner.a_max *= 0.98;
  inner.xi_dot_max *= 0.98;
  inner.xi_ddot_max *= 0.98;
  w.d_min += 0.02;

  for (int round = 0; round <= 3; ++round) {
    const int n = current.numControl();
    Eigen::VectorXd x(4 * n + 1);
    for (int i = 0; i < n; ++i) x.segment<4>(4 * i) = current.controls()[i];
    x[4 * n] = std::log(current.knotSpan());

    std::vector<Eigen::Vector4d> ctrl(n);
    CostGradient grad;
    const Objective objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
      for (int i = 0; i < n; ++i) ctrl[i] = v.segment<4>(4 * i);
      const double dt = std::exp(v[4 * n]);
      const CostTerms terms = totalCost(ctrl, dt, esdf, inner, w, boundary, &grad);
      g.resize(v.size());
      for (int i = 0; i < n; ++i) g.segment<4>(4 * i) = grad.ctrl[i];
      g[4 * n] = grad.knot_span * dt;  // chain rule through dt = exp(sigma)
      return terms.total();
    };

    LbfgsParams lp;
    lp.max_iterations = budget;
    lp.grad_tolerance = solver.grad_tolerance;
    lp.cost_rel_tolerance = solver.cost_rel_tolerance;
    const LbfgsResult sol = lbfgsMinimize(objective, x, lp);

    std::vector<Eigen::Vector4d> out(n);
    for (int i = 0; i < n; ++i) out[i] = sol.x.segment<4>(4 * i);
    current = UniformBSpline(std::move(out), std::exp(sol.x[4 * n]));

    report.iterations += sol.iterations;
    report.converged = sol.converged;
    report.cost_histories.push_back(sol.history);
    report.terms = totalCost(current.controls(), current.knotSpan(), esdf, inner, w, boundary);
    report.feasibility = checkFeasibility(current, esdf, limits, weights.d_min);
    if (report.feasibility.ok) break;
    if (round < 3) {
      w.lambda_c *= 10.0;
      w.lambda_d *= 10.0;
      ++report.escalations;
    }
  }

  if (!report.feasibility.ok) report.converged = false;
  return {current, report};
}

}  // namespace fuel
