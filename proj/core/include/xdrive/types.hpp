// Shared domain enums, the normalized control action, and the closed set of
// decision templates. String names here are canonical: they appear in
// scenario files, stage-report text, wire messages and logs.

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace xdrive {

enum class ActorKind { vehicle, pedestrian, static_obstacle };
enum class LightPhase { red, yellow, green };
enum class SignKind { stop, yield, speed_limit, pedestrian_crossing, exit_ramp };
enum class LineType { solid, dashed };
enum class LaneSpecial { none, bus, bicycle, turn_only };
enum class NavKind {
  follow,
  turn_left,
  turn_right,
  go_straight,
  lane_change_left,
  lane_change_right,
  exit_ramp,
};
enum class InfractionKind {
  collision_pedestrian,
  collision_vehicle,
  collision_static,
  red_light_violation,
  route_deviation,
  timeout,
};
enum class ObjectCategory { vehicle, pedestrian, cyclist, static_obstacle };
enum class MotionKind { stationary, toward_ego, away, crossing_left, crossing_right };

// The ten driving-instruction templates, one per catalog scenario archetype.
enum class TemplateId {
  red_light_approach,
  red_light_stationary,
  green_light_turn,
  pedestrian_crossing,
  lead_vehicle_20m,
  junction_turn,
  lead_vehicle_lane_change,
  ego_lane_change,
  exit_ramp,
  default_driving,
};
inline constexpr int kTemplateCount = 10;

enum class Stage { objects, light, sign, lane, decision, waypoints };

enum class TerminalCause { destination, timeout, fatal_collision, policy_failure };

// Normalized control output. steer is positive to the left; throttle and
// brake are never both nonzero.
struct Action {
  double steer = 0.0;     // [-1, 1]
  double throttle = 0.0;  // [0, 1]
  double brake = 0.0;     // [0, 1]

  bool finite() const;
};

std::string_view to_string(ActorKind k);
std::string_view to_string(LightPhase p);
std::string_view to_string(SignKind k);
std::string_view to_string(LineType t);
std::string_view to_string(LaneSpecial s);
std::string_view to_string(NavKind k);
std::string_view to_string(InfractionKind k);
std::string_view to_string(ObjectCategory c);
std::string_view to_string(MotionKind m);
std::string_view to_string(TemplateId id);
std::string_view to_string(Stage s);
std::string_view to_string(TerminalCause c);

std::optional<ActorKind> actor_kind_from(std::string_view s);
std::optional<LightPhase> light_phase_from(std::string_view s);
std::optional<SignKind> sign_kind_from(std::string_view s);
std::optional<LineType> line_type_from(std::string_view s);
std::optional<LaneSpecial> lane_special_from(std::string_view s);
std::optional<NavKind> nav_kind_from(std::string_view s);
std::optional<InfractionKind> infraction_kind_from(std::string_view s);
std::optional<ObjectCategory> object_category_from(std::string_view s);
std::optional<MotionKind> motion_kind_from(std::string_view s);
std::optional<TemplateId> template_id_from(std::string_view s);
std::optional<Stage> stage_from(std::string_view s);
std::optional<TerminalCause> terminal_cause_from(std::string_view s);

}  // namespace xdrive
