// Deterministic 2D kinematic micro-simulator. Holds ground truth for every
// reasoning subtask and advances the ego with a kinematic bicycle model at a
// fixed 10 Hz tick.
//
// Ego dynamics: x' = v cos(theta), y' = v sin(theta),
// theta' = (v / wheelbase) tan(steer * max_steer), v' = throttle*3 - brake*8,
// forward Euler, v clamped >= 0.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xdrive/geometry.hpp"
#include "xdrive/types.hpp"

namespace xdrive {

inline constexpr double kTickSeconds = 0.1;
inline constexpr double kWheelbase = 2.8;        // m
inline constexpr double kMaxSteerAngle = 0.5;    // rad at steer = 1
inline constexpr double kMaxAccel = 3.0;         // m/s^2 at throttle = 1
inline constexpr double kMaxBrakeDecel = 8.0;    // m/s^2 at brake = 1
inline constexpr double kVehicleSpeedMax = 20.0; // script continuity bound
inline constexpr double kPedestrianSpeedMax = 3.0;
inline constexpr double kRouteDeviationLateral = 3.5;  // m
inline constexpr double kRouteDeviationSeconds = 2.0;
inline constexpr double kInfractionDebounceSeconds = 2.0;
inline constexpr double kDefaultDetectRange = 50.0;  // m
inline constexpr double kDefaultSpeedLimit = 8.0;    // m/s when no sign applies

// Scripted actor trajectory sample; t is seconds since script activation.
struct ScriptPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  bool operator==(const ScriptPoint&) const = default;
};

struct ActorState {
  std::string id;
  ActorKind kind = ActorKind::vehicle;
  Pose pose;
  double length = 4.5, width = 1.8, height = 1.5;
  // Position-time table, activated immediately or by the ego trigger below.
  std::vector<ScriptPoint> script;
  // Script starts when (actor route s - ego route s) <= trigger_distance.
  std::optional<double> trigger_distance;

  // Runtime bookkeeping (owned by step()).
  bool script_active = false;
  double script_start_t = 0.0;
  Vec2 velocity;  // map frame, m/s, updated each step

  Box3 footprint() const;  // map frame, axis-aligned
  bool operator==(const ActorState&) const = default;
};

struct TrafficLight {
  std::string id;
  Vec2 position;
  double stop_line_s = 0.0;  // along the route centerline
  double red_s = 10.0, yellow_s = 3.0, green_s = 10.0;
  double phase_clock = 0.0;  // seconds into the red->yellow->green cycle

  double cycle_length() const { return red_s + yellow_s + green_s; }
  LightPhase phase() const;
  bool operator==(const TrafficLight&) const = default;
};

struct TrafficSign {
  std::string id;
  SignKind kind = SignKind::stop;
  double value = 0.0;  // m/s for speed_limit
  Vec2 position;
  double applies_from_s = 0.0;
  bool operator==(const TrafficSign&) const = default;
};

struct Lane {
  std::string id;
  Polyline centerline;
  double width = 3.5;
  LineType left_line = LineType::solid;
  LineType right_line = LineType::solid;
  std::optional<std::string> left_neighbor;
  std::optional<std::string> right_neighbor;
  LaneSpecial special = LaneSpecial::none;
  bool operator==(const Lane&) const = default;
};

struct LaneGraph {
  std::vector<Lane> lanes;
  const Lane* find(const std::string& id) const;
  bool operator==(const LaneGraph&) const = default;
};

struct NavigationCommand {
  double at_s = 0.0;
  NavKind kind = NavKind::follow;
  bool operator==(const NavigationCommand&) const = default;
};

// Navigation commands announce this far before at_s and persist a little past
// it, so a junction maneuver stays active through the turn.
inline constexpr double kNavAnnounceBefore = 30.0;
inline constexpr double kNavHoldAfter = 15.0;

struct Route {
  std::vector<std::string> lane_ids;
  std::vector<NavigationCommand> commands;  // at_s strictly increasing
  Polyline centerline;                      // built by scenario validation

  double length() const { return centerline.length(); }
  NavigationCommand active_command(double ego_s) const;
  bool operator==(const Route&) const = default;
};

struct Infraction {
  InfractionKind kind;
  double t = 0.0;
  std::string note;
};

struct InfractionLedger {
  std::vector<Infraction> events;

  // Appends unless an event of the same kind landed within the debounce
  // window. Returns true when recorded.
  bool add(InfractionKind kind, double t, std::string note);
  int count(InfractionKind kind) const;
  bool any_collision() const;
};

struct EgoState {
  Pose pose;
  double length = 4.5, width = 1.8, height = 1.5;
  std::string current_lane_id;

  // The geometric center sits half a wheelbase ahead of the rear axle.
  double center_offset() const { return 0.5 * kWheelbase; }
  double front_bumper_offset() const { return center_offset() + 0.5 * length; }
  Box3 footprint() const;  // map frame, axis-aligned
};

struct WorldState {
  double t = 0.0;
  EgoState ego;
  std::vector<ActorState> actors;
  std::vector<TrafficLight> lights;
  std::vector<TrafficSign> signs;
  LaneGraph lane_graph;
  Route route;
  InfractionLedger ledger;
  double time_budget = 120.0;
  std::optional<double> success_speed_cap;

  // Monotone route-progress watermark (arc meters), updated by step().
  double progress_s = 0.0;
  double deviation_clock = 0.0;  // consecutive seconds beyond lateral bound
};

// Advances the world by one tick. Throws std::invalid_argument on non-finite
// action fields; everything else saturates.
void step(WorldState& world, const Action& action, double dt = kTickSeconds);

// --- ground truth for the reasoning stages ------------------------------

struct SceneObject {
  std::string id;
  ActorKind kind = ActorKind::vehicle;
  Box3 box;       // ego frame
  Vec2 velocity;  // actor map-frame velocity expressed in ego axes
  bool in_ego_lane = false;
  // Bumper-to-bumper longitudinal gap along the route when the actor is
  // ahead in the ego lane; +inf otherwise.
  double gap = 0.0;
};

struct SceneLight {
  bool visible = false;
  LightPhase phase = LightPhase::red;
  double distance_to_stop_line = 0.0;  // from the ego front bumper
};

struct SceneSign {
  SignKind kind = SignKind::stop;
  double value = 0.0;
  double distance = 0.0;  // applies_from_s - ego front bumper s; <= 0 in force
};

struct SceneLane {
  std::string id;
  LineType left_line = LineType::solid;
  LineType right_line = LineType::solid;
  bool legal_left = false;
  bool legal_right = false;
  LaneSpecial special = LaneSpecial::none;
};

struct SceneTruth {
  double ego_speed = 0.0;
  double ego_front_offset = 0.0;  // front bumper ahead of rear axle, m
  double route_s = 0.0;           // ego rear axle arc position on the route
  std::vector<SceneObject> objects;
  SceneLight light;
  std::vector<SceneSign> signs;
  SceneLane lane;
  double speed_limit = kDefaultSpeedLimit;  // in force at the ego position
  // Route centerline ahead of the ego, ego frame, ~1 m sampling.
  std::vector<Vec2> route_ahead;
};

SceneTruth ground_truth_scene(const WorldState& world, double range_m = kDefaultDetectRange);

// Completed fraction of the route arc length, in [0, 1], nondecreasing
// across an episode.
double route_progress(const WorldState& world);

}  // namespace xdrive
