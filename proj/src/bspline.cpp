#include "fuel/bspline.hpp"

#include <cmath>
#include <stdexcept>

namespace fuel {

UniformBSpline::UniformBSpline(std::vector<Eigen::Vector4d> ctrl, double knot_span)
    : ctrl_(std::move(ctrl)), knot_span_(knot_span) {
  if (static_cast<int>(ctrl_.size()) < kDegree + 1)
    throw std::invalid_argument("uniform b-spline needs at least degree+1 control points");
  if (knot_span_ <= 0.0) throw std::invalid_argument("uniform b-spline needs a positive knot span");
}

namespace {

// De Boor on a uniform knot vector knot(j) = knot0 + j*dt.
Eigen::Vector4d deBoor(const std::vector<Eigen::Vector4d>& ctrl, int degree, double dt, double knot0,
                       double t) {
  const int nctrl = static_cast<int>(ctrl.size());
  int k = static_cast<int>(std::floor((t - knot0) / dt));
  k = std::max(degree, std::min(k, nctrl - 1));

  std::vector<Eigen::Vector4d> d(degree + 1);
  for (int j = 0; j <= degree; ++j) d[j] = ctrl[j + k - degree];
  for (int r = 1; r <= degree; ++r) {
    for (int j = degree; j >= r; --j) {
      const double t_lo = knot0 + (j + k - degree) * dt;
      const double t_hi = knot0 + (j + 1 + k - r) * dt;
      const double alpha = (t - t_lo) / (t_hi - t_lo);
      d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j];
    }
  }
  return d[degree];
}

}  // namespace

Eigen::Vector4d UniformBSpline::evaluate(double t, int order) const {
  const double T = duration();
  if (t < -1e-9 || t > T + 1e-9) throw std::domain_error("b-spline evaluation outside [0, T]");
  t = std::max(0.0, std::min(t, T));

  if (order == 0) return deBoor(ctrl_, kDegree, knot_span_, -kDegree * knot_span_, t);

  auto [vel, acc] = derivativeControls();
  if (order == 1) return deBoor(vel, kDegree - 1, knot_span_, -(kDegree - 1) * knot_span_, t);
  if (order == 2) return deBoor(acc, kDegree - 2, knot_span_, -(kDegree - 2) * knot_span_, t);
  throw std::invalid_argument("b-spline evaluation order must be 0, 1 or 2");
}

std::pair<std::vector<Eigen::Vector4d>, std::vector<Eigen::Vector4d>>
UniformBSpline::derivativeControls() const {
  const int n = numControl();
  std::vector<Eigen::Vector4d> vel(n - 1), acc(n - 2);
  for (int i = 0; i + 1 < n; ++i) vel[i] = (ctrl_[i + 1] - ctrl_[i]) / knot_span_;
  for (int i = 0; i + 2 < n; ++i)
    acc[i] = (ctrl_[i + 2] - 2.0 * ctrl_[i + 1] + ctrl_[i]) / (knot_span_ * knot_span_);
  return {std::move(vel), std::move(acc)};
}

}  // namespace fuel
