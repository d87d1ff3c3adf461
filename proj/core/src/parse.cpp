#include "xdrive/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace xdrive {

namespace {

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

// Minimal scanning cursor over a byte string; all offsets are absolute.
struct Cursor {
  const std::string& s;
  std::size_t pos = 0;

  bool at_end() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }

  void skip_ws() {
    while (!at_end() && is_ws(s[pos])) ++pos;
  }

  void skip_spaces() {  // same-line whitespace only
    while (!at_end() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  void expect(char c, const char* what) {
    if (at_end() || s[pos] != c) {
      throw ParseError(pos, std::string("expected '") + c + "' (" + what + ")");
    }
    ++pos;
  }

  // float: optional sign, digits, optional fraction; no exponent.
  double number() {
    const std::size_t start = pos;
    if (!at_end() && (s[pos] == '+' || s[pos] == '-')) ++pos;
    std::size_t digits = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      ++pos;
      ++digits;
    }
    if (digits == 0) throw ParseError(start, "expected number");
    if (!at_end() && s[pos] == '.') {
      ++pos;
      std::size_t frac = 0;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        ++pos;
        ++frac;
      }
      if (frac == 0) throw ParseError(pos, "digits required after decimal point");
    }
    double v = 0.0;
    const char* first = s.data() + start;
    const char* last = s.data() + pos;
    auto [p, ec] = std::from_chars(first, last, v, std::chars_format::fixed);
    if (ec != std::errc() || p != last) throw ParseError(start, "malformed number");
    return v;
  }
};

std::string collapse_ws(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  bool in_ws = false;
  for (char c : in) {
    if (is_ws(c)) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out.push_back(' ');
    in_ws = false;
    out.push_back(c);
  }
  return out;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::string format_number(double v) {
  // to_chars is locale-independent; fixed, three decimals.
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
  if (ec != std::errc()) return "0.000";
  // Normalize negative zero so canonical text is unique.
  std::string out(buf, p);
  if (out == "-0.000") out = "0.000";
  return out;
}

std::vector<std::vector<double>> parse_tuple_list(const std::string& text, int arity,
                                                  std::vector<std::size_t>* offsets) {
  std::vector<std::vector<double>> tuples;
  Cursor c{text};
  c.skip_ws();
  while (!c.at_end()) {
    const std::size_t tuple_start = c.pos;
    c.expect('(', "tuple start");
    std::vector<double> fields;
    c.skip_ws();
    if (!c.at_end() && c.peek() != ')') {
      for (;;) {
        c.skip_ws();
        fields.push_back(c.number());
        c.skip_ws();
        if (c.at_end()) throw ParseError(c.pos, "unterminated tuple");
        if (c.peek() == ',') {
          ++c.pos;
          continue;
        }
        break;
      }
    }
    c.expect(')', "tuple end");
    if (static_cast<int>(fields.size()) != arity) {
      throw ParseError(tuple_start, "tuple expects " + std::to_string(arity) +
                                        " fields, found " + std::to_string(fields.size()));
    }
    tuples.push_back(std::move(fields));
    if (offsets) offsets->push_back(tuple_start);
    c.skip_ws();
    if (!c.at_end() && c.peek() == ',') {
      ++c.pos;
      c.skip_ws();
      if (c.at_end()) throw ParseError(c.pos, "trailing comma");
    }
  }
  return tuples;
}

std::vector<Box3> parse_boxes(const std::string& text) {
  std::vector<std::size_t> offsets;
  const auto tuples = parse_tuple_list(text, 6, &offsets);
  std::vector<Box3> boxes;
  boxes.reserve(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto& t = tuples[i];
    Box3 b{t[0], t[1], t[2], t[3], t[4], t[5]};
    if (b.length <= 0.0 || b.width <= 0.0 || b.height <= 0.0) {
      throw ParseError(offsets[i], "box extents must be positive");
    }
    boxes.push_back(b);
  }
  return boxes;
}

std::string serialize_box(const Box3& b) {
  return "(" + format_number(b.x) + ", " + format_number(b.y) + ", " + format_number(b.z) +
         ", " + format_number(b.length) + ", " + format_number(b.width) + ", " +
         format_number(b.height) + ")";
}

std::string serialize_boxes(const std::vector<Box3>& boxes) {
  std::string out;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (i > 0) out += ", ";
    out += serialize_box(boxes[i]);
  }
  return out;
}

std::vector<Vec2> parse_points(const std::string& text) {
  const auto tuples = parse_tuple_list(text, 2);
  std::vector<Vec2> pts;
  pts.reserve(tuples.size());
  for (const auto& t : tuples) pts.push_back({t[0], t[1]});
  return pts;
}

WaypointPlan parse_waypoint_plan(const std::string& text) {
  const auto pts = parse_points(text);
  if (pts.size() != WaypointPlan::kCount) {
    throw ParseError(0, "waypoint count: expected " + std::to_string(WaypointPlan::kCount) +
                            ", found " + std::to_string(pts.size()));
  }
  WaypointPlan plan;
  std::copy(pts.begin(), pts.end(), plan.points.begin());
  return plan;
}

std::string serialize_waypoints(const WaypointPlan& plan) {
  std::string out;
  for (int i = 0; i < WaypointPlan::kCount; ++i) {
    if (i > 0) out += ", ";
    out += "(" + format_number(plan.points[i].x) + ", " + format_number(plan.points[i].y) + ")";
  }
  return out;
}

// --- decision templates ------------------------------------------------

std::string TemplatePattern::pattern_text() const {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i > 0) out += "[...]";
    out += segments[i];
  }
  return out;
}

const std::vector<TemplatePattern>& decision_templates() {
  static const std::vector<TemplatePattern> kPatterns = {
      {TemplateId::red_light_approach,
       {"Slow down to a complete stop and wait for the light to turn green."}},
      {TemplateId::red_light_stationary, {"Stop and wait for the light to turn green."}},
      {TemplateId::green_light_turn,
       {"With the green light, ", ", safely ", " and cross the intersection."}},
      {TemplateId::pedestrian_crossing,
       {"Stop and wait for pedestrians crossing the road ahead."}},
      {TemplateId::lead_vehicle_20m, {"", " Maintain a safe following distance."}},
      {TemplateId::junction_turn, {"", " and ", ""}},
      {TemplateId::lead_vehicle_lane_change,
       {"", " Reduce speed and maintain a safe following distance."}},
      {TemplateId::ego_lane_change,
       {"", " Ensure safe lane change conditions, considering speed and position of "
            "surrounding vehicles."}},
      {TemplateId::exit_ramp, {"", ""}},
      {TemplateId::default_driving,
       {"Normal driving behavior, maintaining vigilance and adhering to general traffic "
        "regulations."}},
  };
  return kPatterns;
}

const TemplatePattern& template_pattern(TemplateId id) {
  for (const auto& p : decision_templates()) {
    if (p.id == id) return p;
  }
  throw std::invalid_argument("unknown template id");
}

std::string fill_template(TemplateId id, const std::vector<std::string>& slots) {
  const TemplatePattern& p = template_pattern(id);
  if (static_cast<int>(slots.size()) != p.slot_count()) {
    throw std::invalid_argument("template " + std::string(to_string(id)) + " takes " +
                                std::to_string(p.slot_count()) + " slots, got " +
                                std::to_string(slots.size()));
  }
  std::string out = p.segments[0];
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].find_first_of("[]\n") != std::string::npos) {
      throw std::invalid_argument("slot text may not contain brackets or newlines");
    }
    out += "[" + slots[i] + "]";
    out += p.segments[i + 1];
  }
  return out;
}

namespace {

struct SplitDecision {
  std::vector<std::string> literals;  // size = slots + 1
  std::vector<std::string> slots;
};

SplitDecision split_brackets(const std::string& text) {
  SplitDecision out;
  std::string literal;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '[') {
      const std::size_t close = text.find_first_of("[]", i + 1);
      if (close == std::string::npos || text[close] == '[') {
        throw ParseError(i, "unbalanced '['");
      }
      out.literals.push_back(literal);
      literal.clear();
      out.slots.push_back(text.substr(i + 1, close - i - 1));
      i = close + 1;
    } else if (c == ']') {
      throw ParseError(i, "']' without matching '['");
    } else {
      literal.push_back(c);
      ++i;
    }
  }
  out.literals.push_back(literal);
  return out;
}

// Literal comparison: whitespace runs collapse to one space; edges of the
// whole text are trimmed.
bool literals_match(const std::vector<std::string>& got, const std::vector<std::string>& want) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    std::string g = collapse_ws(got[i]);
    std::string w = collapse_ws(want[i]);
    // collapse_ws trims leading whitespace; interior literals keep a canonical
    // single leading/trailing space when the template has one.
    const bool lead_space_want = !want[i].empty() && is_ws(want[i].front());
    const bool trail_space_want = !want[i].empty() && is_ws(want[i].back());
    const bool lead_space_got = !got[i].empty() && is_ws(got[i].front());
    const bool trail_space_got = !got[i].empty() && is_ws(got[i].back());
    if (i > 0 && lead_space_want != lead_space_got && !(g.empty() && w.empty())) return false;
    if (i + 1 < got.size() && trail_space_want != trail_space_got && !(g.empty() && w.empty()))
      return false;
    if (g != w) return false;
  }
  return true;
}

}  // namespace

DecisionMatch parse_decision_text(const std::string& text) {
  const SplitDecision split = split_brackets(text);
  for (const auto& p : decision_templates()) {
    if (static_cast<int>(split.slots.size()) != p.slot_count()) continue;
    if (literals_match(split.literals, p.segments)) {
      return DecisionMatch{p.id, split.slots};
    }
  }
  // No template matched: suggest the nearest by edit distance.
  const std::string norm = collapse_ws(text);
  std::size_t best = SIZE_MAX;
  TemplateId nearest = TemplateId::default_driving;
  for (const auto& p : decision_templates()) {
    const std::size_t d = levenshtein(norm, collapse_ws(p.pattern_text()));
    if (d < best) {
      best = d;
      nearest = p.id;
    }
  }
  throw ParseError(0, "no decision template matches; nearest is '" +
                          std::string(to_string(nearest)) + "'");
}

// --- stage reports -------------------------------------------------------

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

// Cursor over a single line for key=value tokens.
struct LineCursor {
  std::string line;
  std::size_t pos = 0;
  std::size_t base = 0;  // offset of line start in the enclosing text

  void skip_spaces() {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  }

  void expect_key(const std::string& key) {
    skip_spaces();
    if (line.compare(pos, key.size(), key) != 0) {
      throw ParseError(base + pos, "expected '" + key + "'");
    }
    pos += key.size();
  }

  // Value token: up to whitespace. May be empty.
  std::string word() {
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    return line.substr(start, pos - start);
  }

  // Parenthesized group, parens balanced textually.
  std::string paren_group() {
    skip_spaces();
    if (pos >= line.size() || line[pos] != '(') throw ParseError(base + pos, "expected '('");
    const std::size_t start = pos;
    const std::size_t close = line.find(')', pos);
    if (close == std::string::npos) throw ParseError(base + pos, "unterminated '('");
    pos = close + 1;
    return line.substr(start, close - start + 1);
  }

  std::string rest() {
    const std::string r = line.substr(pos);
    pos = line.size();
    return r;
  }

  double number_value() {
    skip_spaces();
    Cursor c{line};
    c.pos = pos;
    const double v = c.number();
    pos = c.pos;
    return v;
  }

  bool yesno(const std::string& what) {
    const std::string w = word();
    if (w == "yes") return true;
    if (w == "no") return false;
    throw ParseError(base + pos, "expected yes/no for " + what);
  }

  void end_of_line() {
    skip_spaces();
    if (pos != line.size()) throw ParseError(base + pos, "trailing text");
  }
};

template <typename E>
E enum_value(LineCursor& lc, std::optional<E> (*from)(std::string_view), const char* what) {
  const std::size_t at = lc.base + lc.pos;
  const std::string w = lc.word();
  const auto v = from(w);
  if (!v) throw ParseError(at, std::string("unknown ") + what + " '" + w + "'");
  return *v;
}

int parse_count_header(const std::string& text, const std::vector<std::string>& lines,
                       const std::string& key) {
  if (lines.empty()) throw ParseError(0, "empty report");
  LineCursor lc{lines[0], 0, 0};
  lc.expect_key(key);
  lc.skip_spaces();
  Cursor c{lc.line};
  c.pos = lc.pos;
  const double n = c.number();
  lc.pos = c.pos;
  lc.end_of_line();
  if (n < 0 || n != static_cast<int>(n)) throw ParseError(0, "count must be a nonnegative integer");
  (void)text;
  return static_cast<int>(n);
}

void require_no_newline(const std::string& s, const char* what) {
  if (s.find('\n') != std::string::npos || s.find('\r') != std::string::npos) {
    throw std::invalid_argument(std::string(what) + " may not contain newlines");
  }
}

}  // namespace

std::string serialize_object_report(const ObjectReport& r) {
  std::string out = "objects: " + std::to_string(r.objects.size());
  for (const auto& o : r.objects) {
    require_no_newline(o.reason, "object reason");
    out += "\n- category=" + std::string(to_string(o.category));
    out += " box=" + serialize_box(o.box);
    out += " motion=" + std::string(to_string(o.motion));
    out += std::string(" attend=") + (o.attend ? "yes" : "no");
    out += " reason=" + o.reason;
  }
  return out;
}

ObjectReport parse_object_report(const std::string& text) {
  const auto lines = split_lines(text);
  std::vector<std::string> body;
  for (const auto& l : lines) {
    if (!collapse_ws(l).empty()) body.push_back(l);
  }
  const int n = parse_count_header(text, body, "objects:");
  if (static_cast<int>(body.size()) != n + 1) {
    throw ParseError(0, "objects: declared " + std::to_string(n) + ", found " +
                            std::to_string(body.size() - 1) + " entries");
  }
  ObjectReport r;
  for (int i = 1; i <= n; ++i) {
    LineCursor lc{body[i], 0, 0};
    lc.expect_key("-");
    ReportedObject o;
    lc.expect_key("category=");
    o.category = enum_value(lc, &object_category_from, "category");
    lc.expect_key("box=");
    const auto boxes = parse_boxes(lc.paren_group());
    o.box = boxes.at(0);
    lc.expect_key("motion=");
    o.motion = enum_value(lc, &motion_kind_from, "motion");
    lc.expect_key("attend=");
    o.attend = lc.yesno("attend");
    lc.expect_key("reason=");
    o.reason = lc.rest();
    r.objects.push_back(std::move(o));
  }
  return r;
}

std::string serialize_light_report(const LightReport& r) {
  if (!r.visible) return "light: visible=no";
  return "light: visible=yes phase=" + std::string(to_string(r.phase)) +
         " distance=" + format_number(r.distance_to_stop_line);
}

LightReport parse_light_report(const std::string& text) {
  LineCursor lc{collapse_ws(text), 0, 0};
  lc.expect_key("light:");
  lc.skip_spaces();
  lc.expect_key("visible=");
  LightReport r;
  r.visible = lc.yesno("visible");
  if (r.visible) {
    lc.skip_spaces();
    lc.expect_key("phase=");
    r.phase = enum_value(lc, &light_phase_from, "phase");
    lc.skip_spaces();
    lc.expect_key("distance=");
    r.distance_to_stop_line = lc.number_value();
  }
  lc.end_of_line();
  return r;
}

std::string serialize_sign_report(const SignReport& r) {
  std::string out = "signs: " + std::to_string(r.signs.size());
  for (const auto& s : r.signs) {
    out += "\n- kind=" + std::string(to_string(s.kind));
    if (s.kind == SignKind::speed_limit) out += " value=" + format_number(s.value);
    out += " distance=" + format_number(s.distance);
  }
  return out;
}

SignReport parse_sign_report(const std::string& text) {
  const auto lines = split_lines(text);
  std::vector<std::string> body;
  for (const auto& l : lines) {
    if (!collapse_ws(l).empty()) body.push_back(l);
  }
  const int n = parse_count_header(text, body, "signs:");
  if (static_cast<int>(body.size()) != n + 1) {
    throw ParseError(0, "signs: declared " + std::to_string(n) + ", found " +
                            std::to_string(body.size() - 1) + " entries");
  }
  SignReport r;
  for (int i = 1; i <= n; ++i) {
    LineCursor lc{body[i], 0, 0};
    lc.expect_key("-");
    ReportedSign s;
    lc.expect_key("kind=");
    s.kind = enum_value(lc, &sign_kind_from, "sign kind");
    lc.skip_spaces();
    if (s.kind == SignKind::speed_limit) {
      lc.expect_key("value=");
      s.value = lc.number_value();
      lc.skip_spaces();
    }
    lc.expect_key("distance=");
    s.distance = lc.number_value();
    lc.end_of_line();
    r.signs.push_back(s);
  }
  return r;
}

std::string serialize_lane_report(const LaneReport& r) {
  require_no_newline(r.current_lane_id, "lane id");
  std::string out = "lane: id=" + r.current_lane_id;
  out += " left=" + std::string(to_string(r.left_line));
  out += " right=" + std::string(to_string(r.right_line));
  out += std::string(" legal_left=") + (r.legal_left ? "yes" : "no");
  out += std::string(" legal_right=") + (r.legal_right ? "yes" : "no");
  out += " special=" + std::string(to_string(r.special));
  return out;
}

LaneReport parse_lane_report(const std::string& text) {
  LineCursor lc{collapse_ws(text), 0, 0};
  lc.expect_key("lane:");
  lc.skip_spaces();
  lc.expect_key("id=");
  LaneReport r;
  r.current_lane_id = lc.word();
  lc.skip_spaces();
  lc.expect_key("left=");
  r.left_line = enum_value(lc, &line_type_from, "line type");
  lc.skip_spaces();
  lc.expect_key("right=");
  r.right_line = enum_value(lc, &line_type_from, "line type");
  lc.skip_spaces();
  lc.expect_key("legal_left=");
  r.legal_left = lc.yesno("legal_left");
  lc.skip_spaces();
  lc.expect_key("legal_right=");
  r.legal_right = lc.yesno("legal_right");
  lc.skip_spaces();
  lc.expect_key("special=");
  r.special = enum_value(lc, &lane_special_from, "lane special");
  lc.end_of_line();
  return r;
}

std::string serialize_decision(const Decision& d) {
  require_no_newline(d.filled_text, "decision text");
  require_no_newline(d.rationale, "decision rationale");
  std::string out = "decision: template=" + std::string(to_string(d.template_id)) +
                    " target_speed=" + format_number(d.target_speed);
  out += "\ntext: " + d.filled_text;
  out += d.rationale.empty() ? "\nrationale:" : "\nrationale: " + d.rationale;
  return out;
}

Decision parse_decision(const std::string& text) {
  const auto lines = split_lines(text);
  std::vector<std::string> body;
  for (const auto& l : lines) {
    if (!collapse_ws(l).empty() || l.rfind("rationale:", 0) == 0) body.push_back(l);
  }
  if (body.size() < 3) throw ParseError(0, "decision record needs 3 lines");
  Decision d;
  {
    LineCursor lc{body[0], 0, 0};
    lc.expect_key("decision:");
    lc.skip_spaces();
    lc.expect_key("template=");
    d.template_id = enum_value(lc, &template_id_from, "template");
    lc.skip_spaces();
    lc.expect_key("target_speed=");
    d.target_speed = lc.number_value();
    lc.end_of_line();
  }
  {
    LineCursor lc{body[1], 0, 0};
    lc.expect_key("text:");
    if (lc.pos < lc.line.size() && lc.line[lc.pos] == ' ') ++lc.pos;
    d.filled_text = lc.rest();
  }
  {
    LineCursor lc{body[2], 0, 0};
    lc.expect_key("rationale:");
    if (lc.pos < lc.line.size() && lc.line[lc.pos] == ' ') ++lc.pos;
    d.rationale = lc.rest();
  }
  const DecisionMatch m = parse_decision_text(d.filled_text);
  if (m.id != d.template_id) {
    throw ParseError(0, "filled text matches template '" + std::string(to_string(m.id)) +
                            "', record claims '" + std::string(to_string(d.template_id)) + "'");
  }
  if (d.target_speed < 0.0) throw ParseError(0, "target_speed must be >= 0");
  return d;
}

}  // namespace xdrive
