#include "xdrive/control.hpp"

#include <algorithm>
#include <cmath>

namespace xdrive {

Action compute_action(const WaypointPlan& plan, const Decision& decision, double ego_speed,
                      const ControlGains& g) {
  Action a;

  const bool stop_decision = decision.target_speed <= 1e-9;
  if (stop_decision && ego_speed < g.stop_hold_speed) {
    a.brake = 1.0;
    return a;
  }

  // Lateral: pure pursuit on the first plan point at/after the lookahead.
  const double lookahead = std::clamp(g.lookahead_gain * ego_speed, g.lookahead_min,
                                      g.lookahead_max);
  Vec2 target = plan.points.back();
  for (const Vec2& p : plan.points) {
    if (p.norm() >= lookahead) {
      target = p;
      break;
    }
  }
  if (target.norm() > 1e-6) {
    const double curvature = 2.0 * target.y / (lookahead * lookahead);
    a.steer = std::clamp(std::atan(curvature * g.wheelbase) / g.max_steer, -1.0, 1.0);
  }

  // Longitudinal. A stop plan saturates at the stop point (terminal spacing
  // collapses); once it does, brake against the distance the plan still
  // covers, which lands the halt at the planned buffer. Until then track the
  // plan's terminal speed. Other decisions use proportional control toward
  // the target speed.
  double target_speed = decision.target_speed;
  if (stop_decision) {
    double plan_len = 0.0;
    Vec2 prev{0.0, 0.0};
    for (const Vec2& p : plan.points) {
      plan_len += distance(prev, p);
      prev = p;
    }
    // A stop plan that covers less than its cruise reach has braked inside
    // the horizon: the stop point is measurable, so track the braking
    // envelope against it. Otherwise the stop point is beyond the plan and
    // the ego keeps the plan's pace.
    const double cruise_reach =
        ego_speed * WaypointPlan::kDt * WaypointPlan::kCount;
    if (plan_len < 0.92 * cruise_reach || cruise_reach < 0.05) {
      const double needed =
          ego_speed * ego_speed / (2.0 * std::max(plan_len + g.stop_bias, 0.05));
      a.brake = std::clamp(needed / g.decel_norm, 0.0, 1.0);
      return a;
    }
    const double terminal_spacing =
        distance(plan.points[WaypointPlan::kCount - 1], plan.points[WaypointPlan::kCount - 2]);
    target_speed = terminal_spacing / WaypointPlan::kDt;
  }
  const double accel = g.speed_gain * (target_speed - ego_speed);
  if (accel >= 0.0) {
    a.throttle = std::clamp(accel / g.accel_norm, 0.0, 1.0);
  } else {
    a.brake = std::clamp(-accel / g.decel_norm, 0.0, 1.0);
  }
  return a;
}

}  // namespace xdrive
