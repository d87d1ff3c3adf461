// Scenario text format, validating parser, canonical serializer, and the
// built-in ten-archetype catalog. The format is line-oriented and sectioned
// ([meta], [lanes], [route], [actors], [lights], [signs]); one record per
// line; '#' starts a comment. See docs/scenario_format.md for the grammar.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "xdrive/world.hpp"

namespace xdrive {

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(int line, int col, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(col) + ": " +
                           message),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

struct EgoInit {
  double route_s = 0.0;  // start arc position on the route
  double speed = 0.0;
  double length = 4.5, width = 1.8, height = 1.5;
  bool operator==(const EgoInit&) const = default;
};

struct ScenarioSpec {
  std::string name;
  LaneGraph lane_graph;
  Route route;  // centerline built during validation
  EgoInit ego;
  std::vector<ActorState> actors;
  std::vector<TrafficLight> lights;
  std::vector<TrafficSign> signs;
  double time_budget = 120.0;
  std::optional<double> success_speed_cap;
  bool operator==(const ScenarioSpec&) const = default;
};

// Parses and fully validates a scenario document. Throws ScenarioError with
// line/column on syntax errors and with the violated invariant on semantic
// errors.
ScenarioSpec parse_scenario(const std::string& text);

// Canonical text form; parse_scenario(serialize_scenario(s)) is structurally
// equal to s.
std::string serialize_scenario(const ScenarioSpec& spec);

// Instantiates the simulator state: ego placed on the route at ego.route_s,
// actors at their spawn poses, progress watermark initialized.
WorldState make_world(const ScenarioSpec& spec);

// The ten built-in archetype scenarios.
const std::vector<ScenarioSpec>& catalog();
const ScenarioSpec* find_catalog_scenario(const std::string& name);

}  // namespace xdrive
