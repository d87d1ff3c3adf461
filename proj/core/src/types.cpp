#include "xdrive/types.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace xdrive {

bool Action::finite() const {
  return std::isfinite(steer) && std::isfinite(throttle) && std::isfinite(brake);
}

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<std::string_view, E>, N>& table,
                        std::string_view s) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

constexpr std::array<std::pair<std::string_view, ActorKind>, 3> kActorKinds{{
    {"vehicle", ActorKind::vehicle},
    {"pedestrian", ActorKind::pedestrian},
    {"static_obstacle", ActorKind::static_obstacle},
}};

constexpr std::array<std::pair<std::string_view, LightPhase>, 3> kPhases{{
    {"red", LightPhase::red},
    {"yellow", LightPhase::yellow},
    {"green", LightPhase::green},
}};

constexpr std::array<std::pair<std::string_view, SignKind>, 5> kSignKinds{{
    {"stop", SignKind::stop},
    {"yield", SignKind::yield},
    {"speed_limit", SignKind::speed_limit},
    {"pedestrian_crossing", SignKind::pedestrian_crossing},
    {"exit_ramp", SignKind::exit_ramp},
}};

constexpr std::array<std::pair<std::string_view, LineType>, 2> kLineTypes{{
    {"solid", LineType::solid},
    {"dashed", LineType::dashed},
}};

constexpr std::array<std::pair<std::string_view, LaneSpecial>, 4> kSpecials{{
    {"none", LaneSpecial::none},
    {"bus", LaneSpecial::bus},
    {"bicycle", LaneSpecial::bicycle},
    {"turn_only", LaneSpecial::turn_only},
}};

constexpr std::array<std::pair<std::string_view, NavKind>, 7> kNavKinds{{
    {"follow", NavKind::follow},
    {"turn_left", NavKind::turn_left},
    {"turn_right", NavKind::turn_right},
    {"go_straight", NavKind::go_straight},
    {"lane_change_left", NavKind::lane_change_left},
    {"lane_change_right", NavKind::lane_change_right},
    {"exit_ramp", NavKind::exit_ramp},
}};

constexpr std::array<std::pair<std::string_view, InfractionKind>, 6> kInfractions{{
    {"collision_pedestrian", InfractionKind::collision_pedestrian},
    {"collision_vehicle", InfractionKind::collision_vehicle},
    {"collision_static", InfractionKind::collision_static},
    {"red_light_violation", InfractionKind::red_light_violation},
    {"route_deviation", InfractionKind::route_deviation},
    {"timeout", InfractionKind::timeout},
}};

constexpr std::array<std::pair<std::string_view, ObjectCategory>, 4> kCategories{{
    {"vehicle", ObjectCategory::vehicle},
    {"pedestrian", ObjectCategory::pedestrian},
    {"cyclist", ObjectCategory::cyclist},
    {"static", ObjectCategory::static_obstacle},
}};

constexpr std::array<std::pair<std::string_view, MotionKind>, 5> kMotions{{
    {"stationary", MotionKind::stationary},
    {"toward_ego", MotionKind::toward_ego},
    {"away", MotionKind::away},
    {"crossing_left", MotionKind::crossing_left},
    {"crossing_right", MotionKind::crossing_right},
}};

constexpr std::array<std::pair<std::string_view, TemplateId>, 10> kTemplates{{
    {"red_light_approach", TemplateId::red_light_approach},
    {"red_light_stationary", TemplateId::red_light_stationary},
    {"green_light_turn", TemplateId::green_light_turn},
    {"pedestrian_crossing", TemplateId::pedestrian_crossing},
    {"lead_vehicle_20m", TemplateId::lead_vehicle_20m},
    {"junction_turn", TemplateId::junction_turn},
    {"lead_vehicle_lane_change", TemplateId::lead_vehicle_lane_change},
    {"ego_lane_change", TemplateId::ego_lane_change},
    {"exit_ramp", TemplateId::exit_ramp},
    {"default_driving", TemplateId::default_driving},
}};

constexpr std::array<std::pair<std::string_view, Stage>, 6> kStages{{
    {"objects", Stage::objects},
    {"light", Stage::light},
    {"sign", Stage::sign},
    {"lane", Stage::lane},
    {"decision", Stage::decision},
    {"waypoints", Stage::waypoints},
}};

constexpr std::array<std::pair<std::string_view, TerminalCause>, 4> kCauses{{
    {"destination", TerminalCause::destination},
    {"timeout", TerminalCause::timeout},
    {"fatal_collision", TerminalCause::fatal_collision},
    {"policy_failure", TerminalCause::policy_failure},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, E>, N>& table, E v) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

}  // namespace

std::string_view to_string(ActorKind k) { return name_of(kActorKinds, k); }
std::string_view to_string(LightPhase p) { return name_of(kPhases, p); }
std::string_view to_string(SignKind k) { return name_of(kSignKinds, k); }
std::string_view to_string(LineType t) { return name_of(kLineTypes, t); }
std::string_view to_string(LaneSpecial s) { return name_of(kSpecials, s); }
std::string_view to_string(NavKind k) { return name_of(kNavKinds, k); }
std::string_view to_string(InfractionKind k) { return name_of(kInfractions, k); }
std::string_view to_string(ObjectCategory c) { return name_of(kCategories, c); }
std::string_view to_string(MotionKind m) { return name_of(kMotions, m); }
std::string_view to_string(TemplateId id) { return name_of(kTemplates, id); }
std::string_view to_string(Stage s) { return name_of(kStages, s); }
std::string_view to_string(TerminalCause c) { return name_of(kCauses, c); }

std::optional<ActorKind> actor_kind_from(std::string_view s) { return lookup(kActorKinds, s); }
std::optional<LightPhase> light_phase_from(std::string_view s) { return lookup(kPhases, s); }
std::optional<SignKind> sign_kind_from(std::string_view s) { return lookup(kSignKinds, s); }
std::optional<LineType> line_type_from(std::string_view s) { return lookup(kLineTypes, s); }
std::optional<LaneSpecial> lane_special_from(std::string_view s) { return lookup(kSpecials, s); }
std::optional<NavKind> nav_kind_from(std::string_view s) { return lookup(kNavKinds, s); }
std::optional<InfractionKind> infraction_kind_from(std::string_view s) {
  return lookup(kInfractions, s);
}
std::optional<ObjectCategory> object_category_from(std::string_view s) {
  return lookup(kCategories, s);
}
std::optional<MotionKind> motion_kind_from(std::string_view s) { return lookup(kMotions, s); }
std::optional<TemplateId> template_id_from(std::string_view s) { return lookup(kTemplates, s); }
std::optional<Stage> stage_from(std::string_view s) { return lookup(kStages, s); }
std::optional<TerminalCause> terminal_cause_from(std::string_view s) { return lookup(kCauses, s); }

}  // namespace xdrive
