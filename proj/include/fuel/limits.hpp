#pragma once

namespace fuel {

// Kinematic envelope shared by cost estimation and trajectory generation.
struct DynLimits {
  double v_max = 2.0;        // m/s
  double a_max = 2.0;        // m/s^2
  double xi_dot_max = 0.9;   // rad/s
  double xi_ddot_max = 2.0;  // rad/s^2
};

}  // namespace fuel
