// Built-in scenario catalog: ten archetypes covering lights, pedestrians,
// lead vehicles, junction turns, lane changes, an exit ramp and plain
// driving. Geometry is tuned so the reference policy finishes every route
// inside the default budget.

#include <cmath>

#include "xdrive/scenario.hpp"

namespace xdrive {

namespace {

double q(double v) {  // quantize to the canonical 3-decimal grid
  return std::round(v * 1000.0) / 1000.0;
}

Lane straight_lane(const std::string& id, Vec2 from, Vec2 to, LineType left, LineType right) {
  Lane lane;
  lane.id = id;
  lane.left_line = left;
  lane.right_line = right;
  lane.centerline = Polyline({from, to});
  return lane;
}

// Quarter-circle turn lane of radius r starting at `from` heading +x,
// bending left (+1) or right (-1), then a straight run of `tail` meters.
Lane turn_lane(const std::string& id, Vec2 from, double r, int dir, double tail) {
  std::vector<Vec2> pts;
  for (int i = 0; i <= 12; ++i) {
    const double phi = (M_PI / 2.0) * i / 12.0;
    pts.push_back({q(from.x + r * std::sin(phi)), q(from.y + dir * r * (1.0 - std::cos(phi)))});
  }
  pts.push_back({q(from.x + r), q(from.y + dir * (r + tail))});
  Lane lane;
  lane.id = id;
  lane.centerline = Polyline(std::move(pts));
  return lane;
}

ActorState vehicle_actor(const std::string& id, Vec2 at, double heading, double speed) {
  ActorState a;
  a.id = id;
  a.kind = ActorKind::vehicle;
  a.pose = Pose{at.x, at.y, heading, speed};
  a.length = 4.5;
  a.width = 1.8;
  a.height = 1.5;
  return a;
}

ActorState pedestrian_actor(const std::string& id, Vec2 at, double heading) {
  ActorState a;
  a.id = id;
  a.kind = ActorKind::pedestrian;
  a.pose = Pose{at.x, at.y, heading, 0.0};
  a.length = 0.5;
  a.width = 0.5;
  a.height = 1.8;
  return a;
}

TrafficLight light(const std::string& id, Vec2 at, double stop_s, double red, double yellow,
                   double green, double clock) {
  TrafficLight l;
  l.id = id;
  l.position = at;
  l.stop_line_s = stop_s;
  l.red_s = red;
  l.yellow_s = yellow;
  l.green_s = green;
  l.phase_clock = clock;
  return l;
}

ScenarioSpec base(const std::string& name) {
  ScenarioSpec s;
  s.name = name;
  s.time_budget = 120.0;
  return s;
}

ScenarioSpec red_light_approach() {
  ScenarioSpec s = base("red_light_approach");
  s.lane_graph.lanes = {straight_lane("L0", {0, 0}, {220, 0}, LineType::solid, LineType::solid)};
  s.route.lane_ids = {"L0"};
  s.ego.speed = 7.0;
  s.lights = {light("TL1", {120, 3}, 120.0, 20.0, 3.0, 40.0, 0.0)};
  return s;
}

ScenarioSpec red_light_stationary() {
  ScenarioSpec s = base("red_light_stationary");
  s.lane_graph.lanes = {straight_lane("L0", {0, 0}, {220, 0}, LineType::solid, LineType::solid)};
  s.route.lane_ids = {"L0"};
  s.ego.route_s = 115.0;
  s.ego.speed = 0.0;
  s.lights = {light("TL1", {120, 3}, 120.0, 15.0, 3.0, 40.0, 0.0)};
  return s;
}

ScenarioSpec green_light_turn() {
  ScenarioSpec s = base("green_light_turn");
  s.lane_graph.lanes = {straight_lane("L0", {0, 0}, {90, 0}, LineType::solid, LineType::solid),
                        turn_lane("LT", {90, 0}, 12.0, +1, 118.0)};
  s.route.lane_ids = {"L0", "LT"};
  s.route.commands = {{90.0, NavKind::turn_left}};
  s.ego.speed = 6.0;
  s.lights = {light("TL1", {90, 4}, 90.0, 5.0, 3.0, 60.0, 8.0)};
  return s;
}

ScenarioSpec pedestrian_crossing_scn() {
  ScenarioSpec s = base("pedestrian_crossing");
  s.lane_graph.lanes = {straight_lane("L0", {0, 0}, {160, 0}, LineType::solid, LineType::solid)};
  s.route.lane_ids = {"L0"};
  s.ego.speed = 8.0;
  ActorState ped = pedestrian_actor("ped1", {70, -5}, 1.571);
  ped.trigger_distance = 30.0;
  ped.script = {{0.0, 70.0, -5.0}, {8.0, 70.0, 7.0}};
  s.actors = {ped};
  return s;
}

ScenarioSpec lead_vehicle_20m() {
  ScenarioSpec s = base("lead_vehicle_20m");
  s.lane_graph.lanes = {straight_lane("L0", {0, 0}, {250, 0}, LineType::solid, LineType::solid)};
  s.route.lane_ids = {"L0"};
  s.ego.speed = 5.0;
  s.actors = {vehicle_actor("lead1", {18, 0}, 0.0, 5.0)};
  return s;
}

ScenarioSpec junction_turn() {
  ScenarioSpec s = base("junction_turn");
  s.lane_graph.lanes = {straight_lane("L0", {0, 0}, {90, 0}, LineType::solid, LineType::solid),
                        turn_lane("RT", {90, 0}, 12.0, -1, 118.0)};
  s.route.lane_ids = {"L0", "RT"};
  s.route.commands = {{90.0, NavKind::turn_right}};
  s.ego.speed = 6.0;
  return s;
}

ScenarioSpec lead_vehicle_lane_change() {
  ScenarioSpec s = base("lead_vehicle_lane_change");
  Lane l0 = straight_lane("L0", {0, 0}, {250, 0}, LineType::solid, LineType::dashed);
  Lane l1 = straight_lane("L1", {0, -3.5}, {250, -3.5}, LineType::dashed, LineType::solid);
  l0.right_neighbor = "L1";
  l1.left_neighbor = "L0";
  s.lane_graph.lanes = {l0, l1};
  s.route.lane_ids = {"L0"};
  s.ego.speed = 7.0;
  ActorState cutter = vehicle_actor("cutter1", {40, -3.5}, 0.0, 6.0);
  cutter.trigger_distance = 22.0;
  cutter.script = {{0.0, 40.0, -3.5}, {1.5, 49.0, -2.6}, {3.0, 58.0, 0.0}, {43.0, 298.0, 0.0}};
  s.actors = {cutter};
  return s;
}

ScenarioSpec ego_lane_change() {
  ScenarioSpec s = base("ego_lane_change");
  Lane l0 = straight_lane("L0", {0, 0}, {220, 0}, LineType::dashed, LineType::solid);
  Lane l1 = straight_lane("L1", {0, 3.5}, {220, 3.5}, LineType::solid, LineType::dashed);
  l0.left_neighbor = "L1";
  l1.right_neighbor = "L0";
  s.lane_graph.lanes = {l0, l1};
  s.route.lane_ids = {"L0", "L1"};
  s.route.commands = {{90.0, NavKind::lane_change_left}};
  s.ego.speed = 7.0;
  return s;
}

ScenarioSpec exit_ramp() {
  ScenarioSpec s = base("exit_ramp");
  Lane l0 = straight_lane("L0", {0, 0}, {150, 0}, LineType::solid, LineType::dashed);
  Lane l1 = straight_lane("L1", {150, 0}, {250, 0}, LineType::solid, LineType::solid);
  Lane r1;
  r1.id = "R1";
  r1.centerline =
      Polyline({{150, 0}, {170, -1.5}, {190, -5.5}, {210, -12}, {228, -21}, {244, -32}});
  s.lane_graph.lanes = {l0, l1, r1};
  s.route.lane_ids = {"L0", "R1"};
  s.route.commands = {{150.0, NavKind::exit_ramp}};
  s.ego.speed = 7.0;
  TrafficSign sign;
  sign.id = "SL1";
  sign.kind = SignKind::speed_limit;
  sign.value = 6.0;
  sign.position = {160, -2};
  sign.applies_from_s = 158.0;
  s.signs = {sign};
  return s;
}

ScenarioSpec default_driving() {
  ScenarioSpec s = base("default_driving");
  s.lane_graph.lanes = {straight_lane("L0", {0, 0}, {200, 0}, LineType::solid, LineType::solid)};
  s.route.lane_ids = {"L0"};
  s.ego.speed = 6.0;
  return s;
}

std::vector<ScenarioSpec> build_catalog() {
  std::vector<ScenarioSpec> all = {
      red_light_approach(),       red_light_stationary(), green_light_turn(),
      pedestrian_crossing_scn(),  lead_vehicle_20m(),     junction_turn(),
      lead_vehicle_lane_change(), ego_lane_change(),      exit_ramp(),
      default_driving(),
  };
  // Round-trip every spec through the canonical text form; this also runs
  // full validation (route centerline construction included).
  std::vector<ScenarioSpec> validated;
  validated.reserve(all.size());
  for (const auto& spec : all) {
    validated.push_back(parse_scenario(serialize_scenario(spec)));
  }
  return validated;
}

}  // namespace

const std::vector<ScenarioSpec>& catalog() {
  static const std::vector<ScenarioSpec> kCatalog = build_catalog();
  return kCatalog;
}

}  // namespace xdrive
