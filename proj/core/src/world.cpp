#include "xdrive/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace xdrive {

Box3 ActorState::footprint() const {
  return Box3{pose.x, pose.y, 0.5 * height, length, width, height};
}

LightPhase TrafficLight::phase() const {
  double c = std::fmod(phase_clock, cycle_length());
  if (c < 0) c += cycle_length();
  if (c < red_s) return LightPhase::red;
  if (c < red_s + yellow_s) return LightPhase::yellow;
  return LightPhase::green;
}

const Lane* LaneGraph::find(const std::string& id) const {
  for (const auto& l : lanes) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

NavigationCommand Route::active_command(double ego_s) const {
  for (const auto& cmd : commands) {
    if (ego_s >= cmd.at_s - kNavAnnounceBefore && ego_s <= cmd.at_s + kNavHoldAfter) {
      return cmd;
    }
  }
  return NavigationCommand{0.0, NavKind::follow};
}

bool InfractionLedger::add(InfractionKind kind, double t, std::string note) {
  for (auto it = events.rbegin(); it != events.rend(); ++it) {
    if (it->kind == kind && t - it->t < kInfractionDebounceSeconds) return false;
  }
  events.push_back(Infraction{kind, t, std::move(note)});
  return true;
}

int InfractionLedger::count(InfractionKind kind) const {
  int n = 0;
  for (const auto& e : events) {
    if (e.kind == kind) ++n;
  }
  return n;
}

bool InfractionLedger::any_collision() const {
  return count(InfractionKind::collision_pedestrian) > 0 ||
         count(InfractionKind::collision_vehicle) > 0 ||
         count(InfractionKind::collision_static) > 0;
}

Box3 EgoState::footprint() const {
  const Vec2 center = to_map_frame(pose, {center_offset(), 0.0});
  return Box3{center.x, center.y, 0.5 * height, length, width, height};
}

namespace {

double clamp01(double v) {
  return std::clamp(v, 0.0, 1.0);
}

void advance_ego(EgoState& ego, const Action& a, double dt) {
  const double steer = std::clamp(a.steer, -1.0, 1.0);
  const double throttle = clamp01(a.throttle);
  const double brake = clamp01(a.brake);

  const double v = ego.pose.speed;
  const double heading = ego.pose.heading;
  ego.pose.x += v * std::cos(heading) * dt;
  ego.pose.y += v * std::sin(heading) * dt;
  ego.pose.heading =
      normalize_angle(heading + (v / kWheelbase) * std::tan(steer * kMaxSteerAngle) * dt);
  const double accel = throttle * kMaxAccel - brake * kMaxBrakeDecel;
  ego.pose.speed = std::max(0.0, v + accel * dt);
}

Vec2 script_position(const std::vector<ScriptPoint>& script, double tau) {
  if (script.empty()) return {};
  if (tau <= script.front().t) return {script.front().x, script.front().y};
  for (std::size_t i = 0; i + 1 < script.size(); ++i) {
    const auto& a = script[i];
    const auto& b = script[i + 1];
    if (tau <= b.t) {
      const double span = b.t - a.t;
      const double f = span > 0 ? (tau - a.t) / span : 1.0;
      return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
    }
  }
  return {script.back().x, script.back().y};
}

void advance_actor(ActorState& actor, const WorldState& world, double dt, double ego_s) {
  const Vec2 before = actor.pose.position();

  if (!actor.script.empty()) {
    if (!actor.script_active) {
      bool activate = true;
      if (actor.trigger_distance) {
        const double actor_s = world.route.centerline.project(before).s;
        activate = (actor_s - ego_s) <= *actor.trigger_distance;
      }
      if (activate) {
        actor.script_active = true;
        actor.script_start_t = world.t;
      }
    }
    if (actor.script_active) {
      const double tau = world.t + dt - actor.script_start_t;
      const Vec2 p = script_position(actor.script, tau);
      actor.pose.x = p.x;
      actor.pose.y = p.y;
    }
  } else if (actor.pose.speed > 0.0) {
    // Unscripted movers cruise straight along their heading.
    actor.pose.x += actor.pose.speed * std::cos(actor.pose.heading) * dt;
    actor.pose.y += actor.pose.speed * std::sin(actor.pose.heading) * dt;
  }

  const Vec2 after = actor.pose.position();
  actor.velocity = (after - before) * (1.0 / dt);
  const double speed = actor.velocity.norm();
  if (speed > 1e-6) {
    actor.pose.heading = std::atan2(actor.velocity.y, actor.velocity.x);
    actor.pose.speed = speed;
  } else if (!actor.script.empty() && actor.script_active) {
    actor.pose.speed = 0.0;
  }
}

void update_current_lane(WorldState& world) {
  const Vec2 p = world.ego.pose.position();
  const Lane* best = nullptr;
  double best_score = std::numeric_limits<double>::max();
  for (const auto& lane : world.lane_graph.lanes) {
    const auto proj = lane.centerline.project(p);
    const double lat = std::abs(proj.dist);
    if (lat > 0.5 * lane.width + 0.75) continue;
    // Mild stickiness so boundary chatter does not flip the lane id.
    const double score = lat - (lane.id == world.ego.current_lane_id ? 0.25 : 0.0);
    if (score < best_score) {
      best = &lane;
      best_score = score;
    }
  }
  if (best) world.ego.current_lane_id = best->id;
}

void detect_infractions(WorldState& world, double prev_front_s, double dt) {
  const double t = world.t;

  // Collisions: axis-aligned footprint overlap in the ego frame.
  for (const auto& actor : world.actors) {
    const Vec2 rel = to_ego_frame(world.ego.pose, actor.pose.position());
    const Box3 actor_box{rel.x, rel.y, 0.5 * actor.height, actor.length, actor.width,
                         actor.height};
    const Box3 ego_box{world.ego.center_offset(), 0.0, 0.5 * world.ego.height,
                       world.ego.length, world.ego.width, world.ego.height};
    if (ego_box.overlaps_footprint(actor_box)) {
      InfractionKind kind = InfractionKind::collision_static;
      if (actor.kind == ActorKind::pedestrian) kind = InfractionKind::collision_pedestrian;
      if (actor.kind == ActorKind::vehicle) kind = InfractionKind::collision_vehicle;
      world.ledger.add(kind, t, "hit " + actor.id);
    }
  }

  // Red-light violation: the front bumper crosses the stop line on red.
  const auto proj = world.route.centerline.project(world.ego.pose.position());
  const double front_s = proj.s + world.ego.front_bumper_offset();
  for (const auto& light : world.lights) {
    if (prev_front_s <= light.stop_line_s && front_s > light.stop_line_s &&
        light.phase() == LightPhase::red) {
      world.ledger.add(InfractionKind::red_light_violation, t, "crossed on red at " + light.id);
    }
  }

  // Sustained route deviation.
  if (std::abs(proj.lateral) > kRouteDeviationLateral) {
    world.deviation_clock += dt;
    if (world.deviation_clock > kRouteDeviationSeconds) {
      world.ledger.add(InfractionKind::route_deviation, t, "lateral offset sustained");
    }
  } else {
    world.deviation_clock = 0.0;
  }
}

}  // namespace

void step(WorldState& world, const Action& action, double dt) {
  if (!action.finite()) throw std::invalid_argument("invalid action");

  const auto pre = world.route.centerline.project(world.ego.pose.position());
  const double prev_front_s = pre.s + world.ego.front_bumper_offset();
  const double ego_s = pre.s;

  advance_ego(world.ego, action, dt);
  for (auto& actor : world.actors) advance_actor(actor, world, dt, ego_s);
  for (auto& light : world.lights) {
    light.phase_clock = std::fmod(light.phase_clock + dt, light.cycle_length());
  }
  world.t += dt;

  update_current_lane(world);
  const auto post = world.route.centerline.project(world.ego.pose.position());
  world.progress_s = std::max(world.progress_s, post.s);

  detect_infractions(world, prev_front_s, dt);
}

SceneTruth ground_truth_scene(const WorldState& world, double range_m) {
  SceneTruth scene;
  const EgoState& ego = world.ego;
  scene.ego_speed = ego.pose.speed;
  scene.ego_front_offset = ego.front_bumper_offset();

  const auto ego_proj = world.route.centerline.project(ego.pose.position());
  scene.route_s = ego_proj.s;
  const double ego_front_s = ego_proj.s + ego.front_bumper_offset();

  const Lane* ego_lane = world.lane_graph.find(ego.current_lane_id);

  for (const auto& actor : world.actors) {
    const Vec2 rel = to_ego_frame(ego.pose, actor.pose.position());
    if (rel.norm() > range_m) continue;
    SceneObject obj;
    obj.id = actor.id;
    obj.kind = actor.kind;
    obj.box = Box3{rel.x, rel.y, 0.5 * actor.height, actor.length, actor.width, actor.height};
    obj.velocity = to_ego_frame(Pose{0.0, 0.0, ego.pose.heading, 0.0}, actor.velocity);
    obj.gap = std::numeric_limits<double>::infinity();
    obj.in_ego_lane = false;
    if (ego_lane) {
      const auto aproj = ego_lane->centerline.project(actor.pose.position());
      if (std::abs(aproj.lateral) <= 0.5 * ego_lane->width && aproj.s > 0.0 &&
          aproj.s < ego_lane->centerline.length()) {
        obj.in_ego_lane = true;
      }
    }
    if (obj.in_ego_lane && rel.x > 0.0) {
      const auto rproj = world.route.centerline.project(actor.pose.position());
      obj.gap = (rproj.s - 0.5 * actor.length) - ego_front_s;
    }
    scene.objects.push_back(std::move(obj));
  }

  // Nearest light ahead on the route; stays visible a couple of meters past
  // the line so a stopped ego straddling it still sees the phase.
  double best_dist = std::numeric_limits<double>::max();
  for (const auto& light : world.lights) {
    const double d = light.stop_line_s - ego_front_s;
    if (d < -2.0 || d > range_m) continue;
    if (d < best_dist) {
      best_dist = d;
      scene.light.visible = true;
      scene.light.phase = light.phase();
      scene.light.distance_to_stop_line = d;
    }
  }

  scene.speed_limit = kDefaultSpeedLimit;
  for (const auto& sign : world.signs) {
    const double d = sign.applies_from_s - ego_front_s;
    if (d > range_m) continue;
    if (d < -range_m) {
      // Far behind: still governs the speed limit, but is not reported.
      if (sign.kind == SignKind::speed_limit && sign.value > 0) {
        scene.speed_limit = std::min(scene.speed_limit, sign.value);
      }
      continue;
    }
    scene.signs.push_back(SceneSign{sign.kind, sign.value, d});
    if (sign.kind == SignKind::speed_limit && d <= 0.0 && sign.value > 0) {
      scene.speed_limit = std::min(scene.speed_limit, sign.value);
    }
  }
  if (world.success_speed_cap) {
    scene.speed_limit = std::min(scene.speed_limit, *world.success_speed_cap);
  }

  if (ego_lane) {
    scene.lane.id = ego_lane->id;
    scene.lane.left_line = ego_lane->left_line;
    scene.lane.right_line = ego_lane->right_line;
    scene.lane.special = ego_lane->special;
    scene.lane.legal_left =
        ego_lane->left_neighbor.has_value() && ego_lane->left_line == LineType::dashed;
    scene.lane.legal_right =
        ego_lane->right_neighbor.has_value() && ego_lane->right_line == LineType::dashed;
  }

  // Route centerline ahead, ego frame, for the waypoint planner.
  const double horizon = 45.0;
  for (double s = 0.0; s <= horizon; s += 1.0) {
    const Vec2 p = world.route.centerline.point_at(ego_proj.s + s);
    scene.route_ahead.push_back(to_ego_frame(ego.pose, p));
  }
  return scene;
}

double route_progress(const WorldState& world) {
  const double total = world.route.length();
  if (total <= 0.0) return 0.0;
  return std::clamp(world.progress_s / total, 0.0, 1.0);
}

}  // namespace xdrive
