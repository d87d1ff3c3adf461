#include "xdrive/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "xdrive/parse.hpp"

namespace xdrive {

namespace {

constexpr double kRedLightRange = 60.0;   // m: light hazard window
constexpr double kGreenLightRange = 40.0; // m: green-light junction context
constexpr double kPedHazardRange = 30.0;  // m ahead
constexpr double kCutInRange = 30.0;      // m ahead
constexpr double kLeadGap = 20.0;         // m bumper gap
constexpr double kFollowGapTarget = 12.0; // m regulated following distance
constexpr double kFollowGain = 0.4;       // (m/s) per m of gap error
constexpr double kCruiseSpeed = 8.0;      // m/s ceiling
constexpr double kTurnSpeed = 5.0;        // m/s through junction turns
constexpr double kPlanAccel = 2.0;        // m/s^2
constexpr double kPlanDecel = 4.0;        // m/s^2
constexpr double kStopLineBuffer = 1.0;   // m short of the stop line
constexpr double kPedStopBuffer = 5.0;    // m short of a crossing pedestrian

std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

MotionKind classify_motion(const Vec2& vel) {
  if (vel.norm() < 0.2) return MotionKind::stationary;
  if (std::abs(vel.y) > 0.5) {
    return vel.y > 0 ? MotionKind::crossing_left : MotionKind::crossing_right;
  }
  return vel.x < -0.2 ? MotionKind::toward_ego : MotionKind::away;
}

ObjectCategory category_of(ActorKind kind) {
  switch (kind) {
    case ActorKind::pedestrian:
      return ObjectCategory::pedestrian;
    case ActorKind::static_obstacle:
      return ObjectCategory::static_obstacle;
    case ActorKind::vehicle:
      break;
  }
  return ObjectCategory::vehicle;
}

bool crossing(MotionKind m) {
  return m == MotionKind::crossing_left || m == MotionKind::crossing_right;
}

// A crossing pedestrian matters while it is inside or closing on the ego
// corridor ahead.
bool pedestrian_threat(const SceneObject& o, MotionKind motion) {
  if (o.box.x <= 0.0 || o.box.x > kPedHazardRange) return false;
  if (!crossing(motion)) return false;
  if (std::abs(o.box.y) <= 1.5) return true;
  const double closing = o.velocity.y * (o.box.y > 0 ? -1.0 : 1.0);
  return std::abs(o.box.y) <= 6.0 && closing > 0.0;
}

struct LeadInfo {
  bool present = false;
  double gap = std::numeric_limits<double>::infinity();
  double speed = 0.0;
};

LeadInfo nearest_lead(const SceneTruth& scene) {
  LeadInfo lead;
  for (const auto& o : scene.objects) {
    if (o.kind != ActorKind::vehicle || !o.in_ego_lane) continue;
    if (!(o.gap < lead.gap) || o.gap < -2.0) continue;
    lead.present = true;
    lead.gap = o.gap;
    lead.speed = o.velocity.x;
  }
  return lead;
}

double follow_speed(double gap, double lead_speed, double limit) {
  const double regulated = lead_speed + kFollowGain * (gap - kFollowGapTarget);
  return std::clamp(regulated, 0.0, std::min(limit, kCruiseSpeed));
}

std::string maneuver_text(NavKind kind, bool capitalize) {
  std::string text;
  switch (kind) {
    case NavKind::turn_left:
      text = "turn left";
      break;
    case NavKind::turn_right:
      text = "turn right";
      break;
    default:
      text = "go straight";
      break;
  }
  if (capitalize) text[0] = static_cast<char>(std::toupper(text[0]));
  return text;
}

std::string attention_text(const ObjectReport& objects) {
  for (const auto& o : objects.objects) {
    if (!o.attend) continue;
    return "Pay attention to the " + std::string(to_string(o.category)) + " " +
           one_decimal(o.box.x) + " m ahead.";
  }
  return "Pay attention to the road ahead.";
}

enum class StopKind { red_light, pedestrian };

struct HazardView {
  bool red = false;
  double red_distance = 0.0;
  LightPhase red_phase = LightPhase::red;
  bool pedestrian = false;
  double pedestrian_distance = 0.0;
  bool cut_in = false;
  double cut_in_distance = 0.0;
  double cut_in_speed = 0.0;
};

HazardView scan_hazards(const StageReports& reports, const Observation& obs) {
  HazardView h;
  const LightReport& light = reports.light;
  if (light.visible && light.phase != LightPhase::green &&
      light.distance_to_stop_line >= -1.0 && light.distance_to_stop_line <= kRedLightRange) {
    h.red = true;
    h.red_distance = light.distance_to_stop_line;
    h.red_phase = light.phase;
  }
  for (const auto& o : reports.objects.objects) {
    if (!o.attend || !crossing(o.motion)) continue;
    if (o.category == ObjectCategory::pedestrian && !h.pedestrian) {
      h.pedestrian = true;
      h.pedestrian_distance = o.box.x;
    }
    if (o.category == ObjectCategory::vehicle && o.box.x > 0 && o.box.x <= kCutInRange &&
        !h.cut_in) {
      h.cut_in = true;
      double front = 0.0;
      if (obs.scene) front = obs.scene->ego_front_offset;
      h.cut_in_distance = o.box.x - front - o.box.length * 0.5;
      h.cut_in_speed = 0.0;
      if (obs.scene) {
        // Recover the merging vehicle's forward speed from the scene.
        for (const auto& so : obs.scene->objects) {
          if (std::abs(so.box.x - o.box.x) < 0.5 && std::abs(so.box.y - o.box.y) < 0.5) {
            h.cut_in_speed = so.velocity.x;
            break;
          }
        }
      }
    }
  }
  return h;
}

Decision stop_decision(StopKind kind, const HazardView& h, double ego_speed) {
  Decision d;
  d.target_speed = 0.0;
  if (kind == StopKind::pedestrian) {
    d.template_id = TemplateId::pedestrian_crossing;
    d.filled_text = fill_template(d.template_id, {});
    d.rationale = "pedestrian crossing " + one_decimal(h.pedestrian_distance) + " m ahead";
    return d;
  }
  d.template_id = ego_speed >= 0.5 ? TemplateId::red_light_approach
                                   : TemplateId::red_light_stationary;
  d.filled_text = fill_template(d.template_id, {});
  d.rationale = std::string(to_string(h.red_phase)) + " light " +
                one_decimal(std::max(h.red_distance, 0.0)) + " m ahead";
  return d;
}

Decision select_decision(const StageReports& reports, const Observation& obs,
                         StopHysteresis* hysteresis) {
  const HazardView h = scan_hazards(reports, obs);
  const double limit = obs.scene ? obs.scene->speed_limit : kCruiseSpeed;
  const double cruise = std::min(limit, kCruiseSpeed);

  if (hysteresis && hysteresis->active) {
    const bool is_ped = *hysteresis->active == TemplateId::pedestrian_crossing;
    const bool still = is_ped ? h.pedestrian : h.red;
    if (still) {
      hysteresis->clear_count = 0;
    } else if (++hysteresis->clear_count >= kStopClearTicks) {
      hysteresis->active.reset();
      hysteresis->clear_count = 0;
    }
    if (hysteresis->active) {
      return stop_decision(is_ped ? StopKind::pedestrian : StopKind::red_light, h,
                           obs.ego_speed);
    }
  }

  auto latch = [&](Decision d) {
    if (hysteresis) {
      hysteresis->active = d.template_id == TemplateId::pedestrian_crossing
                               ? TemplateId::pedestrian_crossing
                               : TemplateId::red_light_approach;
      hysteresis->clear_count = 0;
    }
    return d;
  };

  if (h.red) return latch(stop_decision(StopKind::red_light, h, obs.ego_speed));
  if (h.pedestrian) return latch(stop_decision(StopKind::pedestrian, h, obs.ego_speed));

  if (h.cut_in) {
    Decision d;
    d.template_id = TemplateId::lead_vehicle_lane_change;
    d.filled_text =
        fill_template(d.template_id, {"Pay attention to the vehicle ahead changing lanes."});
    d.target_speed = std::max(0.0, follow_speed(h.cut_in_distance, h.cut_in_speed, limit) - 1.0);
    d.rationale = "vehicle merging " + one_decimal(h.cut_in_distance) + " m ahead";
    return d;
  }

  const LeadInfo lead = obs.scene ? nearest_lead(*obs.scene) : LeadInfo{};
  if (lead.present && lead.gap <= kLeadGap) {
    Decision d;
    d.template_id = TemplateId::lead_vehicle_20m;
    d.filled_text = fill_template(d.template_id, {"There is a vehicle ahead."});
    d.target_speed = follow_speed(lead.gap, lead.speed, limit);
    d.rationale = "vehicle " + one_decimal(lead.gap) + " m ahead in lane";
    return d;
  }

  const NavKind nav = obs.nav.kind;
  const bool green_context = reports.light.visible && reports.light.phase == LightPhase::green &&
                             reports.light.distance_to_stop_line <= kGreenLightRange &&
                             reports.light.distance_to_stop_line >= -1.0;
  if (nav == NavKind::turn_left || nav == NavKind::turn_right || nav == NavKind::go_straight) {
    Decision d;
    const bool turning = nav != NavKind::go_straight;
    d.target_speed = turning ? std::min(limit, kTurnSpeed) : cruise;
    if (green_context) {
      d.template_id = TemplateId::green_light_turn;
      d.filled_text = fill_template(
          d.template_id, {attention_text(reports.objects), maneuver_text(nav, false)});
      d.rationale = "green light junction, " + maneuver_text(nav, false);
    } else {
      d.template_id = TemplateId::junction_turn;
      d.filled_text = fill_template(
          d.template_id, {maneuver_text(nav, true), attention_text(reports.objects)});
      d.rationale = "junction ahead, " + maneuver_text(nav, false);
    }
    return d;
  }
  if (nav == NavKind::lane_change_left || nav == NavKind::lane_change_right) {
    const bool left = nav == NavKind::lane_change_left;
    const bool legal = left ? reports.lane.legal_left : reports.lane.legal_right;
    if (legal) {
      Decision d;
      d.template_id = TemplateId::ego_lane_change;
      d.filled_text = fill_template(
          d.template_id,
          {left ? std::string("Change lane to the left.") : std::string("Change lane to the right.")});
      d.target_speed = cruise;
      d.rationale = std::string("lane change ") + (left ? "left" : "right") +
                    " requested by navigation";
      return d;
    }
  }
  if (nav == NavKind::exit_ramp) {
    Decision d;
    d.template_id = TemplateId::exit_ramp;
    d.filled_text = fill_template(
        d.template_id,
        {"Approaching exit ramp, reduce speed, and enhance environment observation."});
    d.target_speed = 0.6 * limit;
    d.rationale = "exit ramp ahead";
    return d;
  }

  if (green_context) {
    Decision d;
    d.template_id = TemplateId::green_light_turn;
    d.filled_text =
        fill_template(d.template_id, {attention_text(reports.objects), "go straight"});
    d.target_speed = cruise;
    d.rationale = "green light " + one_decimal(reports.light.distance_to_stop_line) + " m ahead";
    return d;
  }

  Decision d;
  d.template_id = TemplateId::default_driving;
  d.filled_text = fill_template(d.template_id, {});
  d.target_speed = cruise;
  d.rationale = "clear road";
  return d;
}

}  // namespace

// --- ground-truth stage reports -----------------------------------------

ObjectReport scene_object_report(const SceneTruth& scene, bool with_attention) {
  ObjectReport report;
  for (const auto& o : scene.objects) {
    ReportedObject r;
    r.category = category_of(o.kind);
    r.box = o.box;
    r.motion = with_attention ? classify_motion(o.velocity) : MotionKind::stationary;
    if (with_attention) {
      if (o.kind == ActorKind::pedestrian && pedestrian_threat(o, r.motion)) {
        r.attend = true;
        r.reason = "pedestrian crossing " + one_decimal(o.box.x) + " m ahead";
      } else if (o.kind == ActorKind::vehicle && crossing(r.motion) && o.box.x > 0 &&
                 o.box.x <= kCutInRange) {
        r.attend = true;
        r.reason = "vehicle changing lanes " + one_decimal(o.box.x) + " m ahead";
      } else if (o.kind == ActorKind::vehicle && o.in_ego_lane && o.gap <= kLeadGap &&
                 o.gap > -2.0) {
        r.attend = true;
        r.reason = "vehicle ahead at " + one_decimal(o.gap) + " m";
      } else if (o.kind == ActorKind::static_obstacle && o.in_ego_lane && o.box.x > 0 &&
                 o.box.x <= 25.0) {
        r.attend = true;
        r.reason = "obstruction in lane " + one_decimal(o.box.x) + " m ahead";
      }
    }
    report.objects.push_back(std::move(r));
  }
  return report;
}

LightReport scene_light_report(const SceneTruth& scene) {
  LightReport r;
  r.visible = scene.light.visible;
  if (r.visible) {
    r.phase = scene.light.phase;
    r.distance_to_stop_line = scene.light.distance_to_stop_line;
  }
  return r;
}

SignReport scene_sign_report(const SceneTruth& scene) {
  SignReport r;
  for (const auto& s : scene.signs) {
    r.signs.push_back(ReportedSign{s.kind, s.value, s.distance});
  }
  return r;
}

LaneReport scene_lane_report(const SceneTruth& scene) {
  LaneReport r;
  r.current_lane_id = scene.lane.id;
  r.left_line = scene.lane.left_line;
  r.right_line = scene.lane.right_line;
  r.legal_left = scene.lane.legal_left;
  r.legal_right = scene.lane.legal_right;
  r.special = scene.lane.special;
  return r;
}

// --- decision + plan ------------------------------------------------------

Decision oracle_decide(const StageReports& reports, const Observation& obs,
                       StopHysteresis* hysteresis) {
  return select_decision(reports, obs, hysteresis);
}

Decision ablation_decide(const Observation& obs, const LightReport& light,
                         StopHysteresis* hysteresis) {
  StageReports reports;
  reports.light = light;
  if (obs.scene) {
    reports.sign = scene_sign_report(*obs.scene);
    reports.lane = scene_lane_report(*obs.scene);
  }
  return select_decision(reports, obs, hysteresis);
}

WaypointPlan oracle_plan(const Decision& decision, const Observation& obs) {
  const double v0 = obs.ego_speed;
  const double vt = decision.target_speed;
  const bool stop = vt <= 1e-9;

  double cap = std::numeric_limits<double>::infinity();
  if (obs.scene && stop) {
    const SceneTruth& scene = *obs.scene;
    if ((decision.template_id == TemplateId::red_light_approach ||
         decision.template_id == TemplateId::red_light_stationary) &&
        scene.light.visible) {
      cap = std::max(0.0, scene.light.distance_to_stop_line - kStopLineBuffer);
    } else if (decision.template_id == TemplateId::pedestrian_crossing) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& o : scene.objects) {
        if (o.kind != ActorKind::pedestrian || o.box.x <= 0) continue;
        nearest = std::min(nearest, o.box.x - scene.ego_front_offset - kPedStopBuffer);
      }
      if (std::isfinite(nearest)) cap = std::max(0.0, nearest);
    }
  }
  // A stop with no measurable hazard brakes immediately.
  if (stop && !std::isfinite(cap)) cap = v0 * v0 / (2.0 * kPlanDecel);

  // Integrate the speed profile; stops cruise and brake as late as possible
  // (decel 4), other targets ramp immediately (accel 2 / decel 4).
  WaypointPlan plan;
  double s = 0.0;
  double v = v0;
  const double dt = 0.01;
  int next_sample = 0;
  for (int k = 1; k <= 300 && next_sample < WaypointPlan::kCount; ++k) {
    if (stop) {
      const double remaining = cap - s;
      if (v * v / (2.0 * kPlanDecel) >= remaining - 1e-9) {
        v = std::max(0.0, v - kPlanDecel * dt);
      }
    } else if (v < vt) {
      v = std::min(vt, v + kPlanAccel * dt);
    } else if (v > vt) {
      v = std::max(vt, v - kPlanDecel * dt);
    }
    s += v * dt;
    if (s > cap) {
      s = cap;
      v = 0.0;
    }
    const double t = k * dt;
    if (std::abs(t - WaypointPlan::time_at(next_sample)) < dt / 2) {
      double arc = s;
      if (obs.scene && obs.scene->route_ahead.size() >= 2) {
        const Polyline ahead(obs.scene->route_ahead);
        plan.points[next_sample] = ahead.point_at(arc);
      } else {
        plan.points[next_sample] = Vec2{arc, 0.0};
      }
      ++next_sample;
    }
  }
  return plan;
}

// --- policy classes ---------------------------------------------------------

ObjectReport OraclePolicy::objects(const Observation& obs, const PromptBundle&) {
  return obs.scene ? scene_object_report(*obs.scene, true) : ObjectReport{};
}

LightReport OraclePolicy::light(const Observation& obs, const PromptBundle&,
                                const ObjectReport&) {
  return obs.scene ? scene_light_report(*obs.scene) : LightReport{};
}

SignReport OraclePolicy::sign(const Observation& obs, const PromptBundle&, const ObjectReport&,
                              const LightReport&) {
  return obs.scene ? scene_sign_report(*obs.scene) : SignReport{};
}

LaneReport OraclePolicy::lane(const Observation& obs, const PromptBundle&, const ObjectReport&,
                              const LightReport&, const SignReport&) {
  return obs.scene ? scene_lane_report(*obs.scene) : LaneReport{};
}

Decision OraclePolicy::decide(const Observation& obs, const PromptBundle&,
                              const StageReports& reports) {
  return oracle_decide(reports, obs, &hysteresis_);
}

WaypointPlan OraclePolicy::plan(const Observation& obs, const PromptBundle&,
                                const Decision& decision) {
  return oracle_plan(decision, obs);
}

LightReport AblationPolicy::light(const Observation& obs, const PromptBundle&,
                                  const ObjectReport&) {
  return obs.scene ? scene_light_report(*obs.scene) : LightReport{};
}

SignReport AblationPolicy::sign(const Observation& obs, const PromptBundle&,
                                const ObjectReport&, const LightReport&) {
  return obs.scene ? scene_sign_report(*obs.scene) : SignReport{};
}

LaneReport AblationPolicy::lane(const Observation& obs, const PromptBundle&,
                                const ObjectReport&, const LightReport&, const SignReport&) {
  return obs.scene ? scene_lane_report(*obs.scene) : LaneReport{};
}

Decision AblationPolicy::decide(const Observation& obs, const PromptBundle&,
                                const StageReports& reports) {
  return ablation_decide(obs, reports.light, &hysteresis_);
}

WaypointPlan AblationPolicy::plan(const Observation& obs, const PromptBundle&,
                                  const Decision& decision) {
  return oracle_plan(decision, obs);
}

}  // namespace xdrive
