// Intermediate and final outputs of the staged reasoning pipeline: the four
// per-tick comprehension reports, the driving decision and the waypoint plan.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "xdrive/geometry.hpp"
#include "xdrive/types.hpp"

namespace xdrive {

struct ReportedObject {
  ObjectCategory category = ObjectCategory::vehicle;
  Box3 box;  // ego frame
  MotionKind motion = MotionKind::stationary;
  bool attend = false;
  std::string reason;  // nonempty whenever attend is true

  bool operator==(const ReportedObject&) const = default;
};

struct ObjectReport {
  std::vector<ReportedObject> objects;
  bool operator==(const ObjectReport&) const = default;
};

struct LightReport {
  bool visible = false;
  LightPhase phase = LightPhase::red;        // valid when visible
  double distance_to_stop_line = 0.0;        // meters, valid when visible
  bool operator==(const LightReport&) const = default;
};

struct ReportedSign {
  SignKind kind = SignKind::stop;
  double value = 0.0;  // m/s, speed_limit only
  double distance = 0.0;
  bool operator==(const ReportedSign&) const = default;
};

struct SignReport {
  std::vector<ReportedSign> signs;
  bool operator==(const SignReport&) const = default;
};

struct LaneReport {
  std::string current_lane_id;
  LineType left_line = LineType::solid;
  LineType right_line = LineType::solid;
  bool legal_left = false;
  bool legal_right = false;
  LaneSpecial special = LaneSpecial::none;
  bool operator==(const LaneReport&) const = default;
};

struct Decision {
  TemplateId template_id = TemplateId::default_driving;
  std::string filled_text;  // instruction text with [bracketed] slots resolved
  std::string rationale;
  double target_speed = 0.0;  // m/s, >= 0
  bool operator==(const Decision&) const = default;
};

// Six ego-frame positions at 0.5 s spacing (0.5 .. 3.0 s horizon).
struct WaypointPlan {
  static constexpr int kCount = 6;
  static constexpr double kDt = 0.5;

  std::array<Vec2, kCount> points{};

  static double time_at(int i) { return kDt * (i + 1); }
  bool operator==(const WaypointPlan&) const = default;
};

struct StageReports {
  ObjectReport objects;
  LightReport light;
  SignReport sign;
  LaneReport lane;
};

}  // namespace xdrive
