#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace fuel {

struct LbfgsParams {
  int memory = 8;
  int max_iterations = 200;
  double grad_tolerance = 1e-4;      // on the max-abs gradient component
  double cost_rel_tolerance = 1e-6;  // relative decrease over the past window
  int past = 5;                      // window for the relative decrease test
  int max_line_search = 40;
  double armijo_c = 1e-4;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;            // tolerance met (as opposed to budget hit)
  std::vector<double> history;       // objective at accepted iterates
};

using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

// Limited-memory BFGS with Armijo backtracking line search. The history is
// non-increasing by construction.
LbfgsResult lbfgsMinimize(const Objective& fg, Eigen::VectorXd x0, const LbfgsParams& params);

}  // namespace fuel
