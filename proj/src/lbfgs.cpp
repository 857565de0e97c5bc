#include "fuel/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace fuel {

LbfgsResult lbfgsMinimize(const Objective& fg, Eigen::VectorXd x0, const LbfgsParams& params) {
  LbfgsResult res;
  const int n = static_cast<int>(x0.size());
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(n), g_new(n);
  double f = fg(x, g);
  res.history.push_back(f);

  struct Pair {
    Eigen::VectorXd s, y;
    double rho;
  };
  std::deque<Pair> mem;

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    if (g.cwiseAbs().maxCoeff() < params.grad_tolerance) {
      res.converged = true;
      break;
    }

    // Two-loop recursion for the search direction.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(mem.size());
    for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
      alpha[i] = mem[i].rho * mem[i].s.dot(q);
      q -= alpha[i] * mem[i].y;
    }
    if (!mem.empty()) {
      const Pair& last = mem.back();
      q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (size_t i = 0; i < mem.size(); ++i) {
      const double beta = mem[i].rho * mem[i].y.dot(q);
      q += (alpha[i] - beta) * mem[i].s;
    }
    Eigen::VectorXd dir = -q;

    double slope = g.dot(dir);
    if (slope >= 0.0) {  // fall back to steepest descent
      dir = -g;
      slope = -g.squaredNorm();
      mem.clear();
    }

    // Armijo backtracking; the very first step is scaled to a unit move.
    double step = mem.empty() ? std::min(1.0, 1.0 / std::max(1e-12, dir.norm())) : 1.0;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < params.max_line_search; ++ls) {
      Eigen::VectorXd x_trial = x + step * dir;
      f_new = fg(x_trial, g_new);
      if (std::isfinite(f_new) && f_new <= f + params.armijo_c * step * slope) {
        Eigen::VectorXd s = step * dir;
        Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
          mem.push_back({std::move(s), std::move(y), 1.0 / sy});
          if (static_cast<int>(mem.size()) > params.memory) mem.pop_front();
        }
        x = std::move(x_trial);
        g = g_new;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no acceptable step along this direction

    ++res.iterations;
    res.history.push_back(f_new);
    f = f_new;
    if (static_cast<int>(res.history.size()) > params.past) {
      const double f_past = res.history[res.history.size() - 1 - params.past];
      if ((f_past - f) / std::max(1.0, std::abs(f)) < params.cost_rel_tolerance) {
        res.converged = true;
        break;
      }
    }
  }

  res.x = std::move(x);
  res.f = f;
  return res;
}

}  // namespace fuel
