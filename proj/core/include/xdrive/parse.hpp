// Grammar for the structured text the pipeline emits and consumes: numeric
// tuple lists (3D boxes, waypoints), the ten instruction templates with
// [bracketed] slots, and the four stage reports. The serializers here are the
// single canonical emitters; prompts, history tokens, logs and the wire
// protocol all carry this exact text.
//
// Numbers are locale-independent ('.' decimal, no exponent) and serialize
// with three decimal places. Parsers throw ParseError and never abort.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "xdrive/reports.hpp"

namespace xdrive {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : std::runtime_error(message + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// --- numbers & tuples -------------------------------------------------------

// Canonical float text, three decimals, '.' separator.
std::string format_number(double v);

// Parses a list of parenthesized numeric tuples of the given arity, e.g.
// "(1, 2), (3, 4)". Whitespace (including newlines) between tokens is
// ignored. Empty input yields an empty list. When `offsets` is given it
// receives the byte offset of each tuple's '('.
std::vector<std::vector<double>> parse_tuple_list(const std::string& text, int arity,
                                                  std::vector<std::size_t>* offsets = nullptr);

// --- boxes -------------------------------------------------------------

// "(x, y, z, length, width, height)" 6-tuples; extents must be > 0.
std::vector<Box3> parse_boxes(const std::string& text);
std::string serialize_boxes(const std::vector<Box3>& boxes);
std::string serialize_box(const Box3& box);

// --- waypoints ---------------------------------------------------------

std::vector<Vec2> parse_points(const std::string& text);
// Requires exactly WaypointPlan::kCount points.
WaypointPlan parse_waypoint_plan(const std::string& text);
std::string serialize_waypoints(const WaypointPlan& plan);

// --- decision templates ------------------------------------------------

// A template is literal text interleaved with [slot] segments. Slots keep
// their brackets in the filled text; slot content may not contain brackets
// or newlines.
struct TemplatePattern {
  TemplateId id;
  std::vector<std::string> segments;  // literal parts; slots sit between them
  int slot_count() const { return static_cast<int>(segments.size()) - 1; }
  std::string pattern_text() const;   // literals joined with "[...]"
};

const std::vector<TemplatePattern>& decision_templates();
const TemplatePattern& template_pattern(TemplateId id);

// Substitutes slot values into a template. Throws std::invalid_argument on
// slot-count mismatch or bracket/newline characters inside a slot value.
std::string fill_template(TemplateId id, const std::vector<std::string>& slots);

struct DecisionMatch {
  TemplateId id;
  std::vector<std::string> slots;
};

// Matches instruction text against the ten templates. Literal segments must
// match exactly up to whitespace runs; bracketed segments are the slots.
// No match raises ParseError naming the nearest template.
DecisionMatch parse_decision_text(const std::string& text);

// --- stage reports & decision records ----------------------------------

std::string serialize_object_report(const ObjectReport& r);
ObjectReport parse_object_report(const std::string& text);

std::string serialize_light_report(const LightReport& r);
LightReport parse_light_report(const std::string& text);

std::string serialize_sign_report(const SignReport& r);
SignReport parse_sign_report(const std::string& text);

std::string serialize_lane_report(const LaneReport& r);
LaneReport parse_lane_report(const std::string& text);

std::string serialize_decision(const Decision& d);
Decision parse_decision(const std::string& text);

}  // namespace xdrive
