#include "xdrive/cot.hpp"

#include <cstdio>

#include "xdrive/parse.hpp"
#include "xdrive/policy.hpp"

namespace xdrive {

void HistoryBuffer::push(std::string token) {
  items_.push_back(std::move(token));
  while (items_.size() > capacity_) items_.pop_front();
}

namespace {

std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string render_scene_text(const Observation& obs) {
  std::string out = "speed: " + one_decimal(obs.ego_speed) + " m/s\n";
  if (obs.scene) {
    const SceneTruth& s = *obs.scene;
    std::string boxes;
    std::vector<Box3> raw;
    raw.reserve(s.objects.size());
    for (const auto& o : s.objects) raw.push_back(o.box);
    out += "visible boxes: " + (raw.empty() ? std::string("none") : serialize_boxes(raw)) + "\n";
    out += "speed limit: " + one_decimal(s.speed_limit) + " m/s";
  } else {
    out += "images attached: " + std::to_string(obs.image_refs.size());
  }
  return out;
}

std::string stage_question(Stage stage) {
  switch (stage) {
    case Stage::objects:
      return "List every object relevant to driving. For each, give its category, 3D box "
             "(x, y, z, length, width, height), motion direction, whether it warrants "
             "attention, and why.";
    case Stage::light:
      return "Report the nearest traffic light ahead: visibility, phase, and distance to "
             "its stop line.";
    case Stage::sign:
      return "List the traffic signs that currently apply, with distances.";
    case Stage::lane:
      return "Describe the current lane: id, line types, legal lane changes, and any "
             "special lane kind.";
    case Stage::decision:
      return "Given the reports above, choose the driving instruction and a target speed.";
    case Stage::waypoints:
      return "Predict the next 6 waypoints at 0.5 s intervals as (x1, y1), ..., (x6, y6).";
  }
  return {};
}

}  // namespace

PromptBundle render_prompts(const Observation& obs, const StageReports& prior, Stage stage) {
  PromptBundle b;
  b.system_prompt =
      "You are the driving reasoner. Answer only in the exact report format for the "
      "requested stage.";
  b.nav_text = "navigation: " + std::string(to_string(obs.nav.kind));
  b.scene_text = render_scene_text(obs);

  std::string q = stage_question(stage);
  if (stage == Stage::decision || stage == Stage::waypoints) {
    std::string context;
    context += serialize_object_report(prior.objects) + "\n";
    context += serialize_light_report(prior.light) + "\n";
    context += serialize_sign_report(prior.sign) + "\n";
    context += serialize_lane_report(prior.lane) + "\n";
    q = context + q;
  }
  b.stage_prompt = std::move(q);
  return b;
}

std::string history_token(const StageReports& reports, const Decision& decision) {
  std::string out;
  out += serialize_object_report(reports.objects) + "\n";
  out += serialize_light_report(reports.light) + "\n";
  out += serialize_sign_report(reports.sign) + "\n";
  out += serialize_lane_report(reports.lane) + "\n";
  out += serialize_decision(decision);
  return out;
}

void update_history(HistoryBuffer& buffer, const TickOutput& tick) {
  buffer.push(history_token(tick.reports, tick.decision));
}

TickOutput run_pipeline(Policy& policy, const Observation& obs) {
  TickOutput out;
  int seq = 0;
  auto record = [&](Stage stage, const PromptBundle& prompt, std::string output) {
    out.trace.stages.push_back(StageTrace{stage, seq++, prompt, std::move(output)});
  };

  {
    const PromptBundle p = render_prompts(obs, out.reports, Stage::objects);
    out.reports.objects = policy.objects(obs, p);
    record(Stage::objects, p, serialize_object_report(out.reports.objects));
  }
  {
    const PromptBundle p = render_prompts(obs, out.reports, Stage::light);
    out.reports.light = policy.light(obs, p, out.reports.objects);
    record(Stage::light, p, serialize_light_report(out.reports.light));
  }
  {
    const PromptBundle p = render_prompts(obs, out.reports, Stage::sign);
    out.reports.sign = policy.sign(obs, p, out.reports.objects, out.reports.light);
    record(Stage::sign, p, serialize_sign_report(out.reports.sign));
  }
  {
    const PromptBundle p = render_prompts(obs, out.reports, Stage::lane);
    out.reports.lane =
        policy.lane(obs, p, out.reports.objects, out.reports.light, out.reports.sign);
    record(Stage::lane, p, serialize_lane_report(out.reports.lane));
  }
  {
    const PromptBundle p = render_prompts(obs, out.reports, Stage::decision);
    out.decision = policy.decide(obs, p, out.reports);
    record(Stage::decision, p, serialize_decision(out.decision));
  }
  {
    const PromptBundle p = render_prompts(obs, out.reports, Stage::waypoints);
    out.plan = policy.plan(obs, p, out.decision);
    record(Stage::waypoints, p, serialize_waypoints(out.plan));
  }
  return out;
}

}  // namespace xdrive
