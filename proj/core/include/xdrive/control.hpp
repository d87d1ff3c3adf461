// Waypoint-tracking controller: pure-pursuit steering over the current plan
// plus proportional speed control toward the decision's target speed.

#pragma once

#include "xdrive/reports.hpp"
#include "xdrive/types.hpp"

namespace xdrive {

struct ControlGains {
  double lookahead_gain = 1.2;   // seconds of travel
  double lookahead_min = 2.0;    // m
  double lookahead_max = 8.0;    // m
  double speed_gain = 0.5;       // 1/s
  double accel_norm = 3.0;       // m/s^2 at full throttle
  double decel_norm = 8.0;       // m/s^2 at full brake
  double stop_hold_speed = 0.3;  // m/s: below this a stop decision holds full brake
  double stop_bias = 0.0;        // m added to the stop-braking horizon
  double wheelbase = 2.8;        // m
  double max_steer = 0.5;        // rad
};

// Never emits throttle and brake simultaneously.
Action compute_action(const WaypointPlan& plan, const Decision& decision, double ego_speed,
                      const ControlGains& gains = {});

}  // namespace xdrive
