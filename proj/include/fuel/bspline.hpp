#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace fuel {

// Cubic uniform B-spline over the flat outputs (x, y, z, yaw). The curve is
// unclamped; boundary states are matched by the optimizer's boundary cost.
class UniformBSpline {
 public:
  static constexpr int kDegree = 3;

  UniformBSpline() = default;
  UniformBSpline(std::vector<Eigen::Vector4d> ctrl, double knot_span);

  int numControl() const { return static_cast<int>(ctrl_.size()); }  // N_b + 1
  double knotSpan() const { return knot_span_; }
  double duration() const { return (numControl() - kDegree) * knot_span_; }

  const std::vector<Eigen::Vector4d>& controls() const { return ctrl_; }
  std::vector<Eigen::Vector4d>& controls() { return ctrl_; }
  void setKnotSpan(double dt) { knot_span_ = dt; }

  // De Boor evaluation of the curve (order 0) or its derivative (1 or 2) at
  // t in [0, duration()]; throws std::domain_error outside the domain.
  Eigen::Vector4d evaluate(double t, int order = 0) const;

  // Velocity and acceleration control points: first and second differences
  // scaled by the knot span.
  std::pair<std::vector<Eigen::Vector4d>, std::vector<Eigen::Vector4d>> derivativeControls() const;

 private:
  std::vector<Eigen::Vector4d> ctrl_;
  double knot_span_ = 0.1;
};

}  // namespace fuel
