#include "xdrive/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "xdrive/parse.hpp"

namespace xdrive {

namespace {

constexpr double kLaneChangeRampMeters = 25.0;
constexpr double kLaneJoinTolerance = 1.0;

// --- line scanning -------------------------------------------------------

struct LineScanner {
  std::string line;
  int line_no = 0;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ScenarioError(line_no, static_cast<int>(at) + 1, msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos); }

  bool at_end() const { return pos >= line.size(); }

  void skip_spaces() {
    while (!at_end() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  }

  std::string word() {
    skip_spaces();
    const std::size_t start = pos;
    while (!at_end() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    if (pos == start) fail("expected token");
    return line.substr(start, pos - start);
  }

  bool peek_key(const std::string& key) {
    skip_spaces();
    return line.compare(pos, key.size(), key) == 0;
  }

  void expect_key(const std::string& key) {
    skip_spaces();
    if (!peek_key(key)) fail("expected '" + key + "'");
    pos += key.size();
  }

  double number() {
    skip_spaces();
    const std::size_t start = pos;
    try {
      // Reuse the tuple grammar's number scanner via a single-field parse.
      std::size_t end = pos;
      if (end < line.size() && (line[end] == '+' || line[end] == '-')) ++end;
      while (end < line.size() &&
             (std::isdigit(static_cast<unsigned char>(line[end])) || line[end] == '.'))
        ++end;
      const std::string token = line.substr(pos, end - pos);
      const auto vals = parse_tuple_list("(" + token + ")", 1);
      pos = end;
      return vals.at(0).at(0);
    } catch (const ParseError&) {
      fail("expected number", start);
    }
  }

  double keyed_number(const std::string& key) {
    expect_key(key);
    return number();
  }

  // Parenthesized tuple of fixed arity on this line.
  std::vector<double> tuple(int arity) {
    skip_spaces();
    if (at_end() || line[pos] != '(') fail("expected '('");
    const std::size_t close = line.find(')', pos);
    if (close == std::string::npos) fail("unterminated '('");
    const std::string group = line.substr(pos, close - pos + 1);
    const std::size_t base = pos;
    try {
      const auto vals = parse_tuple_list(group, arity);
      pos = close + 1;
      return vals.at(0);
    } catch (const ParseError& e) {
      fail(e.what(), base + e.offset());
    }
  }

  // Remaining text parsed as a tuple list (points=/script= payloads).
  std::vector<std::vector<double>> rest_tuples(int arity) {
    skip_spaces();
    const std::size_t base = pos;
    try {
      auto vals = parse_tuple_list(line.substr(pos), arity);
      pos = line.size();
      return vals;
    } catch (const ParseError& e) {
      fail(e.what(), base + e.offset());
    }
  }

  void end_of_line() {
    skip_spaces();
    if (!at_end()) fail("trailing text");
  }

  template <typename E>
  E enum_word(std::optional<E> (*from)(std::string_view), const char* what) {
    skip_spaces();
    const std::size_t at = pos;
    const std::string w = word();
    const auto v = from(w);
    if (!v) fail(std::string("unknown ") + what + " '" + w + "'", at);
    return *v;
  }
};

[[noreturn]] void semantic_error(const std::string& msg) {
  throw ScenarioError(0, 0, msg);
}

// --- route centerline construction ---------------------------------------

enum class JoinKind { continuation, change_left, change_right };

JoinKind classify_join(const Lane& a, const Lane& b) {
  if (a.left_neighbor && *a.left_neighbor == b.id) return JoinKind::change_left;
  if (a.right_neighbor && *a.right_neighbor == b.id) return JoinKind::change_right;
  const Vec2 a_end = a.centerline.points().back();
  const Vec2 b_start = b.centerline.points().front();
  if (distance(a_end, b_start) <= kLaneJoinTolerance) return JoinKind::continuation;
  semantic_error("route lanes '" + a.id + "' and '" + b.id + "' are not connected");
}

void append_points(std::vector<Vec2>& out, const std::vector<Vec2>& pts) {
  for (const Vec2& p : pts) {
    if (!out.empty() && distance(out.back(), p) < 1e-9) continue;
    out.push_back(p);
  }
}

// Lane changes ramp laterally over kLaneChangeRampMeters starting at the
// matching lane_change command; neighbor lanes are assumed parallel with a
// shared arc parameterization (the catalog uses straight parallel lanes).
Polyline build_route_centerline(const ScenarioSpec& spec) {
  const auto& lanes = spec.route.lane_ids;
  std::vector<NavigationCommand> changes;
  for (const auto& c : spec.route.commands) {
    if (c.kind == NavKind::lane_change_left || c.kind == NavKind::lane_change_right) {
      changes.push_back(c);
    }
  }
  std::size_t next_change = 0;

  std::vector<Vec2> pts;
  const Lane* cur = spec.lane_graph.find(lanes[0]);
  double cur_entry = 0.0;   // lane-local arc where the route enters `cur`
  double route_base = 0.0;  // route arc at that entry point

  for (std::size_t i = 1; i <= lanes.size(); ++i) {
    if (i == lanes.size()) {
      // Tail of the final lane.
      std::vector<Vec2> tail;
      for (double s = cur_entry; s < cur->centerline.length(); s += 1.0) {
        tail.push_back(cur->centerline.point_at(s));
      }
      tail.push_back(cur->centerline.points().back());
      append_points(pts, tail);
      break;
    }
    const Lane* next = spec.lane_graph.find(lanes[i]);
    const JoinKind join = classify_join(*cur, *next);
    if (join == JoinKind::continuation) {
      std::vector<Vec2> seg;
      for (double s = cur_entry; s < cur->centerline.length(); s += 1.0) {
        seg.push_back(cur->centerline.point_at(s));
      }
      seg.push_back(cur->centerline.points().back());
      append_points(pts, seg);
      route_base += cur->centerline.length() - cur_entry;
      cur = next;
      cur_entry = 0.0;
      continue;
    }
    // Lane change: consume the matching command.
    if (next_change >= changes.size()) {
      semantic_error("route lane change from '" + cur->id + "' to '" + next->id +
                     "' has no matching lane_change command");
    }
    const NavigationCommand cmd = changes[next_change++];
    const NavKind want =
        join == JoinKind::change_left ? NavKind::lane_change_left : NavKind::lane_change_right;
    if (cmd.kind != want) {
      semantic_error("lane_change command direction does not match route ('" + cur->id +
                     "' -> '" + next->id + "')");
    }
    const double cut = cur_entry + (cmd.at_s - route_base);
    if (cut <= cur_entry || cut >= cur->centerline.length()) {
      semantic_error("lane_change command at_s falls outside lane '" + cur->id + "'");
    }
    std::vector<Vec2> seg;
    for (double s = cur_entry; s < cut; s += 1.0) {
      seg.push_back(cur->centerline.point_at(s));
    }
    append_points(pts, seg);
    const double ramp_end =
        std::min(cut + kLaneChangeRampMeters,
                 std::min(cur->centerline.length(), next->centerline.length()));
    std::vector<Vec2> ramp;
    const double ramp_len = ramp_end - cut;
    if (ramp_len < 1.0) semantic_error("no room for the lane-change ramp on '" + cur->id + "'");
    for (double s = cut; s <= ramp_end + 1e-9; s += 1.0) {
      const double f = std::clamp((s - cut) / ramp_len, 0.0, 1.0);
      const Vec2 pa = cur->centerline.point_at(s);
      const Vec2 pb = next->centerline.point_at(s);
      ramp.push_back(pa + (pb - pa) * f);
    }
    append_points(pts, ramp);
    route_base = route_base + (ramp_end - cur_entry);
    cur = next;
    cur_entry = ramp_end;
  }
  if (next_change < changes.size()) {
    semantic_error("lane_change command present but the route never changes lanes");
  }
  return Polyline(std::move(pts));
}

// --- validation -----------------------------------------------------------

void validate(ScenarioSpec& spec) {
  if (spec.name.empty()) semantic_error("scenario name is required");
  if (spec.time_budget <= 0) semantic_error("time_budget must be > 0");

  std::set<std::string> lane_ids;
  for (const auto& lane : spec.lane_graph.lanes) {
    if (lane.id.empty()) semantic_error("lane id is required");
    if (!lane_ids.insert(lane.id).second) semantic_error("duplicate lane id " + lane.id);
    if (lane.width <= 0) semantic_error("lane " + lane.id + " width must be > 0");
    if (lane.centerline.size() < 2) semantic_error("lane " + lane.id + " needs >= 2 points");
    if (!lane.centerline.is_simple()) {
      semantic_error("lane " + lane.id + " centerline self-intersects");
    }
  }
  for (const auto& lane : spec.lane_graph.lanes) {
    for (const auto& [nbr, side] :
         {std::pair{lane.left_neighbor, "left"}, std::pair{lane.right_neighbor, "right"}}) {
      if (!nbr) continue;
      const Lane* other = spec.lane_graph.find(*nbr);
      if (!other) semantic_error("unknown lane id " + *nbr);
      const auto& back = std::string(side) == "left" ? other->right_neighbor : other->left_neighbor;
      if (!back || *back != lane.id) {
        semantic_error("lane adjacency between " + lane.id + " and " + *nbr +
                       " is not symmetric");
      }
    }
  }

  if (spec.route.lane_ids.empty()) semantic_error("route needs at least one lane");
  for (const auto& id : spec.route.lane_ids) {
    if (!spec.lane_graph.find(id)) semantic_error("unknown lane id " + id);
  }
  for (std::size_t i = 1; i < spec.route.commands.size(); ++i) {
    if (spec.route.commands[i].at_s <= spec.route.commands[i - 1].at_s) {
      semantic_error("navigation command positions must be strictly increasing");
    }
  }
  spec.route.centerline = build_route_centerline(spec);
  if (spec.ego.route_s < 0 || spec.ego.route_s >= spec.route.centerline.length()) {
    semantic_error("ego start position is outside the route");
  }
  if (spec.ego.length <= 0 || spec.ego.width <= 0 || spec.ego.height <= 0) {
    semantic_error("ego dims must be positive");
  }

  std::set<std::string> actor_ids;
  for (const auto& a : spec.actors) {
    if (a.id.empty()) semantic_error("actor id is required");
    if (!actor_ids.insert(a.id).second) semantic_error("duplicate actor id " + a.id);
    if (a.length <= 0 || a.width <= 0 || a.height <= 0) {
      semantic_error("actor " + a.id + " dims must be positive");
    }
    if (a.trigger_distance && a.script.empty()) {
      semantic_error("actor " + a.id + " has a trigger but no script");
    }
    if (!a.script.empty()) {
      if (a.kind == ActorKind::static_obstacle) {
        semantic_error("static_obstacle " + a.id + " cannot have a script");
      }
      const double bound =
          a.kind == ActorKind::pedestrian ? kPedestrianSpeedMax : kVehicleSpeedMax;
      const Vec2 spawn = a.pose.position();
      const Vec2 first{a.script.front().x, a.script.front().y};
      if (distance(spawn, first) > 0.01) {
        semantic_error("actor " + a.id + " script must start at the spawn position");
      }
      for (std::size_t i = 1; i < a.script.size(); ++i) {
        const auto& p = a.script[i - 1];
        const auto& q = a.script[i];
        if (q.t <= p.t) semantic_error("actor " + a.id + " script times must increase");
        const double v = distance({p.x, p.y}, {q.x, q.y}) / (q.t - p.t);
        if (v > bound + 1e-9) {
          semantic_error("actor " + a.id + " script segment exceeds speed bound");
        }
      }
    }
  }

  std::set<std::string> light_ids;
  for (const auto& l : spec.lights) {
    if (!light_ids.insert(l.id).second) semantic_error("duplicate light id " + l.id);
    if (l.red_s <= 0 || l.yellow_s <= 0 || l.green_s <= 0) {
      semantic_error("light " + l.id + " durations must be > 0");
    }
    if (l.stop_line_s < 0 || l.stop_line_s > spec.route.centerline.length()) {
      semantic_error("light " + l.id + " stop line is outside the route");
    }
    if (l.phase_clock < 0 || l.phase_clock >= l.cycle_length()) {
      semantic_error("light " + l.id + " phase clock outside the cycle");
    }
  }
  for (const auto& s : spec.signs) {
    if (s.kind == SignKind::speed_limit && s.value <= 0) {
      semantic_error("speed_limit sign " + s.id + " needs value > 0");
    }
    if (s.applies_from_s < 0) semantic_error("sign " + s.id + " applies_from_s must be >= 0");
  }
}

}  // namespace

// --- parser ----------------------------------------------------------------

ScenarioSpec parse_scenario(const std::string& text) {
  ScenarioSpec spec;
  spec.time_budget = 120.0;

  enum class Section { none, meta, lanes, route, actors, lights, signs };
  Section section = Section::none;

  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    lines.push_back(cur);
  }

  bool have_name = false;
  for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
    std::string raw = lines[i];
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    LineScanner sc{raw, i + 1};
    sc.skip_spaces();
    if (sc.at_end()) continue;

    if (raw[sc.pos] == '[') {
      const std::size_t close = raw.find(']', sc.pos);
      if (close == std::string::npos) sc.fail("unterminated section header");
      const std::string name = raw.substr(sc.pos + 1, close - sc.pos - 1);
      sc.pos = close + 1;
      sc.end_of_line();
      if (name == "meta") section = Section::meta;
      else if (name == "lanes") section = Section::lanes;
      else if (name == "route") section = Section::route;
      else if (name == "actors") section = Section::actors;
      else if (name == "lights") section = Section::lights;
      else if (name == "signs") section = Section::signs;
      else sc.fail("unknown section [" + name + "]");
      continue;
    }

    switch (section) {
      case Section::none:
        sc.fail("record outside any [section]");
      case Section::meta: {
        const std::string key = sc.word();
        if (key == "name") {
          spec.name = sc.word();
          have_name = true;
        } else if (key == "time_budget") {
          spec.time_budget = sc.number();
        } else if (key == "success_speed_cap") {
          spec.success_speed_cap = sc.number();
        } else {
          sc.fail("unknown meta key '" + key + "'");
        }
        sc.end_of_line();
        break;
      }
      case Section::lanes: {
        sc.expect_key("lane");
        Lane lane;
        lane.id = sc.word();
        lane.width = sc.keyed_number("width=");
        sc.expect_key("left=");
        lane.left_line = sc.enum_word(&line_type_from, "line type");
        sc.expect_key("right=");
        lane.right_line = sc.enum_word(&line_type_from, "line type");
        if (sc.peek_key("left_lane=")) {
          sc.expect_key("left_lane=");
          lane.left_neighbor = sc.word();
        }
        if (sc.peek_key("right_lane=")) {
          sc.expect_key("right_lane=");
          lane.right_neighbor = sc.word();
        }
        if (sc.peek_key("special=")) {
          sc.expect_key("special=");
          lane.special = sc.enum_word(&lane_special_from, "lane special");
        }
        sc.expect_key("points=");
        std::vector<Vec2> pts;
        for (const auto& t : sc.rest_tuples(2)) pts.push_back({t[0], t[1]});
        lane.centerline = Polyline(std::move(pts));
        spec.lane_graph.lanes.push_back(std::move(lane));
        break;
      }
      case Section::route: {
        const std::string key = sc.word();
        if (key == "lanes") {
          while (true) {
            sc.skip_spaces();
            if (sc.at_end()) break;
            spec.route.lane_ids.push_back(sc.word());
          }
          if (spec.route.lane_ids.empty()) sc.fail("route needs at least one lane id");
        } else if (key == "ego") {
          spec.ego.route_s = sc.keyed_number("s=");
          spec.ego.speed = sc.keyed_number("speed=");
          sc.expect_key("dims=");
          const auto d = sc.tuple(3);
          spec.ego.length = d[0];
          spec.ego.width = d[1];
          spec.ego.height = d[2];
          sc.end_of_line();
        } else if (key == "command") {
          NavigationCommand cmd;
          cmd.at_s = sc.number();
          cmd.kind = sc.enum_word(&nav_kind_from, "navigation command");
          sc.end_of_line();
          spec.route.commands.push_back(cmd);
        } else {
          sc.fail("unknown route record '" + key + "'");
        }
        break;
      }
      case Section::actors: {
        sc.expect_key("actor");
        ActorState a;
        a.id = sc.word();
        sc.expect_key("kind=");
        a.kind = sc.enum_word(&actor_kind_from, "actor kind");
        sc.expect_key("at=");
        const auto at = sc.tuple(2);
        a.pose.x = at[0];
        a.pose.y = at[1];
        a.pose.heading = sc.keyed_number("heading=");
        a.pose.speed = sc.keyed_number("speed=");
        sc.expect_key("dims=");
        const auto d = sc.tuple(3);
        a.length = d[0];
        a.width = d[1];
        a.height = d[2];
        if (sc.peek_key("trigger=")) {
          a.trigger_distance = sc.keyed_number("trigger=");
        }
        if (sc.peek_key("script=")) {
          sc.expect_key("script=");
          for (const auto& t : sc.rest_tuples(3)) {
            a.script.push_back(ScriptPoint{t[0], t[1], t[2]});
          }
        }
        sc.end_of_line();
        spec.actors.push_back(std::move(a));
        break;
      }
      case Section::lights: {
        sc.expect_key("light");
        TrafficLight l;
        l.id = sc.word();
        sc.expect_key("at=");
        const auto at = sc.tuple(2);
        l.position = {at[0], at[1]};
        l.stop_line_s = sc.keyed_number("stop_line_s=");
        sc.expect_key("cycle=");
        const auto c = sc.tuple(3);
        l.red_s = c[0];
        l.yellow_s = c[1];
        l.green_s = c[2];
        l.phase_clock = sc.keyed_number("clock=");
        sc.end_of_line();
        spec.lights.push_back(std::move(l));
        break;
      }
      case Section::signs: {
        sc.expect_key("sign");
        TrafficSign s;
        s.id = sc.word();
        sc.expect_key("kind=");
        s.kind = sc.enum_word(&sign_kind_from, "sign kind");
        if (s.kind == SignKind::speed_limit) {
          s.value = sc.keyed_number("value=");
        }
        sc.expect_key("at=");
        const auto at = sc.tuple(2);
        s.position = {at[0], at[1]};
        s.applies_from_s = sc.keyed_number("applies_from_s=");
        sc.end_of_line();
        spec.signs.push_back(std::move(s));
        break;
      }
    }
  }

  if (!have_name) semantic_error("scenario name is required");
  validate(spec);
  return spec;
}

// --- serializer --------------------------------------------------------

namespace {

std::string tuple_text(std::initializer_list<double> vals) {
  std::string out = "(";
  bool first = true;
  for (double v : vals) {
    if (!first) out += ", ";
    first = false;
    out += format_number(v);
  }
  return out + ")";
}

}  // namespace

std::string serialize_scenario(const ScenarioSpec& spec) {
  std::string out;
  out += "[meta]\n";
  out += "name " + spec.name + "\n";
  out += "time_budget " + format_number(spec.time_budget) + "\n";
  if (spec.success_speed_cap) {
    out += "success_speed_cap " + format_number(*spec.success_speed_cap) + "\n";
  }

  out += "\n[lanes]\n";
  for (const auto& lane : spec.lane_graph.lanes) {
    out += "lane " + lane.id + " width=" + format_number(lane.width);
    out += " left=" + std::string(to_string(lane.left_line));
    out += " right=" + std::string(to_string(lane.right_line));
    if (lane.left_neighbor) out += " left_lane=" + *lane.left_neighbor;
    if (lane.right_neighbor) out += " right_lane=" + *lane.right_neighbor;
    if (lane.special != LaneSpecial::none) {
      out += " special=" + std::string(to_string(lane.special));
    }
    out += " points=";
    for (std::size_t i = 0; i < lane.centerline.size(); ++i) {
      if (i > 0) out += " ";
      const Vec2& p = lane.centerline.points()[i];
      out += tuple_text({p.x, p.y});
    }
    out += "\n";
  }

  out += "\n[route]\n";
  out += "lanes";
  for (const auto& id : spec.route.lane_ids) out += " " + id;
  out += "\n";
  out += "ego s=" + format_number(spec.ego.route_s) + " speed=" + format_number(spec.ego.speed) +
         " dims=" + tuple_text({spec.ego.length, spec.ego.width, spec.ego.height}) + "\n";
  for (const auto& cmd : spec.route.commands) {
    out += "command " + format_number(cmd.at_s) + " " + std::string(to_string(cmd.kind)) + "\n";
  }

  if (!spec.actors.empty()) {
    out += "\n[actors]\n";
    for (const auto& a : spec.actors) {
      out += "actor " + a.id + " kind=" + std::string(to_string(a.kind));
      out += " at=" + tuple_text({a.pose.x, a.pose.y});
      out += " heading=" + format_number(a.pose.heading);
      out += " speed=" + format_number(a.pose.speed);
      out += " dims=" + tuple_text({a.length, a.width, a.height});
      if (a.trigger_distance) out += " trigger=" + format_number(*a.trigger_distance);
      if (!a.script.empty()) {
        out += " script=";
        for (std::size_t i = 0; i < a.script.size(); ++i) {
          if (i > 0) out += " ";
          out += tuple_text({a.script[i].t, a.script[i].x, a.script[i].y});
        }
      }
      out += "\n";
    }
  }

  if (!spec.lights.empty()) {
    out += "\n[lights]\n";
    for (const auto& l : spec.lights) {
      out += "light " + l.id + " at=" + tuple_text({l.position.x, l.position.y});
      out += " stop_line_s=" + format_number(l.stop_line_s);
      out += " cycle=" + tuple_text({l.red_s, l.yellow_s, l.green_s});
      out += " clock=" + format_number(l.phase_clock);
      out += "\n";
    }
  }

  if (!spec.signs.empty()) {
    out += "\n[signs]\n";
    for (const auto& s : spec.signs) {
      out += "sign " + s.id + " kind=" + std::string(to_string(s.kind));
      if (s.kind == SignKind::speed_limit) out += " value=" + format_number(s.value);
      out += " at=" + tuple_text({s.position.x, s.position.y});
      out += " applies_from_s=" + format_number(s.applies_from_s);
      out += "\n";
    }
  }
  return out;
}

// --- world construction ----------------------------------------------------

WorldState make_world(const ScenarioSpec& spec) {
  WorldState w;
  w.lane_graph = spec.lane_graph;
  w.route = spec.route;
  w.actors = spec.actors;
  w.lights = spec.lights;
  w.signs = spec.signs;
  w.time_budget = spec.time_budget;
  w.success_speed_cap = spec.success_speed_cap;

  w.ego.length = spec.ego.length;
  w.ego.width = spec.ego.width;
  w.ego.height = spec.ego.height;
  const Vec2 start = w.route.centerline.point_at(spec.ego.route_s);
  w.ego.pose.x = start.x;
  w.ego.pose.y = start.y;
  w.ego.pose.heading = w.route.centerline.heading_at(spec.ego.route_s);
  w.ego.pose.speed = spec.ego.speed;
  w.progress_s = spec.ego.route_s;

  // Starting lane: nearest lane footprint.
  double best = 1e18;
  for (const auto& lane : w.lane_graph.lanes) {
    const auto proj = lane.centerline.project(start);
    if (proj.dist < best) {
      best = proj.dist;
      w.ego.current_lane_id = lane.id;
    }
  }

  // Cruising actors start with their scripted/constant velocity visible.
  for (auto& a : w.actors) {
    if (a.script.empty() && a.pose.speed > 0) {
      a.velocity = {a.pose.speed * std::cos(a.pose.heading),
                    a.pose.speed * std::sin(a.pose.heading)};
    }
  }
  return w;
}

const ScenarioSpec* find_catalog_scenario(const std::string& name) {
  for (const auto& spec : catalog()) {
    if (spec.name == name) return &spec;
  }
  return nullptr;
}

}  // namespace xdrive
