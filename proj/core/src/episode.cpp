#include "xdrive/episode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>

#include "json.hpp"
#include "xdrive/parse.hpp"
#include "xdrive/policy.hpp"
#include "xdrive/remote.hpp"

namespace xdrive {

namespace fs = std::filesystem;
using nlohmann::json;

std::string default_out_dir() {
  const char* env = std::getenv("XDRIVE_OUT");
  return env && *env ? env : "out";
}

EpisodeOutcome EpisodeLog::outcome() const {
  EpisodeOutcome o;
  o.scenario = scenario;
  o.policy = policy;
  o.route_completion = route_completion;
  o.end_t = end_t;
  o.time_budget = time_budget;
  o.cause = cause;
  o.ledger = ledger;
  return o;
}

namespace {

json pose_json(const Pose& p) {
  return json{{"x", p.x}, {"y", p.y}, {"heading", p.heading}, {"speed", p.speed}};
}

json infraction_json(const Infraction& e) {
  return json{{"kind", std::string(to_string(e.kind))}, {"t", e.t}, {"note", e.note}};
}

json tick_json(const TickRecord& r) {
  json j;
  j["type"] = "tick";
  j["v"] = 1;
  j["t"] = r.t;
  j["ego"] = pose_json(r.ego);
  j["route_s"] = r.route_s;
  j["lane"] = r.lane_id;
  j["nav"] = std::string(to_string(r.nav));
  j["degraded"] = r.degraded;
  if (r.degraded) {
    j["error"] = json{{"stage", r.error_stage},
                      {"message", r.error_message},
                      {"raw", r.error_raw}};
  } else {
    j["reports"] = json{{"objects", r.objects_text},
                        {"light", r.light_text},
                        {"sign", r.sign_text},
                        {"lane", r.lane_text}};
    j["decision"] = json{{"template", std::string(to_string(r.decision.template_id))},
                         {"text", r.decision.filled_text},
                         {"rationale", r.decision.rationale},
                         {"target_speed", r.decision.target_speed}};
    j["plan"] = r.plan_text;
    json trace = json::array();
    for (const auto& st : r.trace.stages) {
      trace.push_back(json{{"stage", std::string(to_string(st.stage))},
                           {"seq", st.seq},
                           {"prompt", json{{"system", st.prompt.system_prompt},
                                           {"nav", st.prompt.nav_text},
                                           {"scene", st.prompt.scene_text},
                                           {"stage", st.prompt.stage_prompt}}},
                           {"output", st.output}});
    }
    j["trace"] = std::move(trace);
  }
  j["gt"] = json{{"boxes", r.gt_boxes_text}, {"plan", r.gt_plan_text}};
  j["action"] =
      json{{"steer", r.action.steer}, {"throttle", r.action.throttle}, {"brake", r.action.brake}};
  json inf = json::array();
  for (const auto& e : r.new_infractions) inf.push_back(infraction_json(e));
  j["infractions"] = std::move(inf);
  return j;
}

std::unique_ptr<Policy> make_policy(const RunConfig& cfg, const std::string& session) {
  if (cfg.policy == "oracle") return std::make_unique<OraclePolicy>();
  if (cfg.policy == "no-cot") return std::make_unique<AblationPolicy>();
  if (cfg.policy == "remote") {
    RemoteConfig rc;
    rc.endpoint = cfg.endpoint;
    rc.timeout_ms = cfg.timeout_ms;
    return std::make_unique<RemotePolicy>(rc, session);
  }
  throw std::invalid_argument("unknown policy '" + cfg.policy + "'");
}

ScenarioSpec load_scenario(const std::string& ref) {
  if (const ScenarioSpec* spec = find_catalog_scenario(ref)) return *spec;
  std::ifstream in(ref, std::ios::binary);
  if (!in) throw ScenarioError(0, 0, "cannot open scenario '" + ref + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario(text);
}

std::string frame_attachment(const SceneTruth& scene, double t) {
  // Stand-in for a camera frame: an opaque snapshot blob the harness does
  // not interpret on the remote path.
  json frame;
  frame["t"] = t;
  frame["speed"] = scene.ego_speed;
  std::vector<Box3> boxes;
  for (const auto& o : scene.objects) boxes.push_back(o.box);
  frame["boxes"] = serialize_boxes(boxes);
  return base64_encode(frame.dump());
}

}  // namespace

EpisodeLog run_episode(const RunConfig& cfg) {
  const ScenarioSpec spec = load_scenario(cfg.scenario);
  const std::string session = spec.name + "/" + std::to_string(cfg.seed);
  std::unique_ptr<Policy> policy = make_policy(cfg, session);
  const bool remote = cfg.policy == "remote";

  WorldState world = make_world(spec);
  HistoryBuffer history(cfg.history_depth);

  EpisodeLog log;
  log.scenario = spec.name;
  log.policy = policy->name();
  log.seed = cfg.seed;
  log.dt = cfg.dt;
  log.time_budget = spec.time_budget;
  log.route_length = world.route.length();

  std::ofstream out;
  if (cfg.write_log) {
    const fs::path dir = cfg.out_dir.empty() ? default_out_dir() : cfg.out_dir;
    fs::create_directories(dir);
    const fs::path path =
        dir / (spec.name + "__" + log.policy + "__seed" + std::to_string(cfg.seed) + ".jsonl");
    out.open(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open log file " + path.string());
    log.log_path = path.string();
    json meta;
    meta["type"] = "meta";
    meta["v"] = 1;
    meta["scenario"] = spec.name;
    meta["policy"] = log.policy;
    meta["seed"] = cfg.seed;
    meta["dt"] = cfg.dt;
    meta["detect_range"] = cfg.detect_range;
    meta["history_depth"] = cfg.history_depth;
    meta["time_budget"] = spec.time_budget;
    meta["route_length"] = log.route_length;
    out << meta.dump() << "\n";
    out.flush();
  }

  const int max_ticks =
      cfg.ticks_max > 0 ? cfg.ticks_max
                        : static_cast<int>(std::ceil(spec.time_budget / cfg.dt)) + 2;

  std::optional<TerminalCause> cause;
  for (int tick = 0; tick < max_ticks && !cause; ++tick) {
    const SceneTruth scene = ground_truth_scene(world, cfg.detect_range);
    const NavigationCommand nav = world.route.active_command(scene.route_s);

    Observation obs;
    obs.t = world.t;
    obs.ego_speed = world.ego.pose.speed;
    obs.nav = nav;
    obs.history = &history;
    if (remote) {
      obs.image_refs.push_back(frame_attachment(scene, world.t));
    } else {
      obs.scene = scene;
    }

    TickRecord rec;
    rec.t = world.t;
    rec.ego = world.ego.pose;
    rec.route_s = scene.route_s;
    rec.lane_id = world.ego.current_lane_id;
    rec.nav = nav.kind;

    // Logged ground truth: the scene boxes and a stateless reference plan.
    {
      std::vector<Box3> gt_boxes;
      for (const auto& o : scene.objects) gt_boxes.push_back(o.box);
      rec.gt_boxes_text = serialize_boxes(gt_boxes);
      Observation ref_obs = obs;
      ref_obs.scene = scene;
      ref_obs.image_refs.clear();
      StageReports ref_reports;
      ref_reports.objects = scene_object_report(scene, true);
      ref_reports.light = scene_light_report(scene);
      ref_reports.sign = scene_sign_report(scene);
      ref_reports.lane = scene_lane_report(scene);
      const Decision ref_decision = oracle_decide(ref_reports, ref_obs, nullptr);
      rec.gt_plan_text = serialize_waypoints(oracle_plan(ref_decision, ref_obs));
    }

    Action action;
    bool tick_ok = true;
    try {
      TickOutput result = run_pipeline(*policy, obs);
      action = compute_action(result.plan, result.decision, world.ego.pose.speed);
      rec.objects_text = serialize_object_report(result.reports.objects);
      rec.light_text = serialize_light_report(result.reports.light);
      rec.sign_text = serialize_sign_report(result.reports.sign);
      rec.lane_text = serialize_lane_report(result.reports.lane);
      rec.decision = result.decision;
      rec.plan_text = serialize_waypoints(result.plan);
      rec.trace = std::move(result.trace);
      update_history(history, result);
    } catch (const PipelineError& e) {
      // Degraded tick: brake to a stop, keep the episode alive.
      tick_ok = false;
      rec.degraded = true;
      rec.error_stage = std::string(to_string(e.stage()));
      rec.error_message = e.what();
      rec.error_raw = e.raw_payload();
      action = Action{0.0, 0.0, 1.0};
    } catch (const RemoteError& e) {
      rec.degraded = true;
      rec.error_stage = "transport";
      rec.error_message = e.what();
      action = Action{0.0, 0.0, 1.0};
      cause = TerminalCause::policy_failure;
    }
    (void)tick_ok;

    const std::size_t ledger_before = world.ledger.events.size();
    step(world, action, cfg.dt);
    rec.action = action;
    for (std::size_t i = ledger_before; i < world.ledger.events.size(); ++i) {
      rec.new_infractions.push_back(world.ledger.events[i]);
    }

    bool fatal_collision = false;
    for (const auto& e : rec.new_infractions) {
      if (e.kind == InfractionKind::collision_pedestrian ||
          e.kind == InfractionKind::collision_vehicle ||
          e.kind == InfractionKind::collision_static) {
        fatal_collision = true;
      }
    }

    if (cfg.write_log) {
      out << tick_json(rec).dump() << "\n";
      out.flush();
    }
    log.ticks.push_back(std::move(rec));

    if (!cause) {
      if (fatal_collision) {
        cause = TerminalCause::fatal_collision;
      } else if (route_progress(world) >= 1.0 - 1e-9) {
        cause = TerminalCause::destination;
      } else if (world.t >= spec.time_budget - 1e-9) {
        world.ledger.add(InfractionKind::timeout, world.t, "time budget exhausted");
        cause = TerminalCause::timeout;
      }
    }
  }
  if (!cause) {
    world.ledger.add(InfractionKind::timeout, world.t, "tick limit reached");
    cause = TerminalCause::timeout;
  }

  log.cause = *cause;
  log.end_t = world.t;
  log.route_completion = route_progress(world);
  log.ledger = world.ledger;

  if (cfg.write_log) {
    json end;
    end["type"] = "end";
    end["v"] = 1;
    end["cause"] = std::string(to_string(log.cause));
    end["t"] = log.end_t;
    end["route_completion"] = log.route_completion;
    json events = json::array();
    for (const auto& e : log.ledger.events) events.push_back(infraction_json(e));
    end["infractions"] = std::move(events);
    out << end.dump() << "\n";
    out.flush();
  }
  return log;
}

std::vector<EpisodeLog> run_suite(const RunConfig& cfg) {
  std::vector<EpisodeLog> logs;
  for (const auto& spec : catalog()) {
    RunConfig one = cfg;
    one.scenario = spec.name;
    logs.push_back(run_episode(one));
  }
  return logs;
}

EpisodeLog load_episode_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open log " + path);
  EpisodeLog log;
  log.log_path = path;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const std::string type = j.value("type", "");
    if (type == "meta") {
      log.scenario = j.value("scenario", "");
      log.policy = j.value("policy", "");
      log.seed = j.value("seed", 0ULL);
      log.dt = j.value("dt", kTickSeconds);
      log.time_budget = j.value("time_budget", 0.0);
      log.route_length = j.value("route_length", 0.0);
    } else if (type == "tick") {
      TickRecord r;
      r.t = j.value("t", 0.0);
      const auto& ego = j.at("ego");
      r.ego = Pose{ego.value("x", 0.0), ego.value("y", 0.0), ego.value("heading", 0.0),
                   ego.value("speed", 0.0)};
      r.route_s = j.value("route_s", 0.0);
      r.lane_id = j.value("lane", "");
      if (auto nav = nav_kind_from(j.value("nav", "follow"))) r.nav = *nav;
      r.degraded = j.value("degraded", false);
      if (!r.degraded) {
        const auto& reports = j.at("reports");
        r.objects_text = reports.value("objects", "");
        r.light_text = reports.value("light", "");
        r.sign_text = reports.value("sign", "");
        r.lane_text = reports.value("lane", "");
        const auto& d = j.at("decision");
        if (auto id = template_id_from(d.value("template", ""))) r.decision.template_id = *id;
        r.decision.filled_text = d.value("text", "");
        r.decision.rationale = d.value("rationale", "");
        r.decision.target_speed = d.value("target_speed", 0.0);
        r.plan_text = j.value("plan", "");
      } else if (j.contains("error")) {
        r.error_stage = j["error"].value("stage", "");
        r.error_message = j["error"].value("message", "");
        r.error_raw = j["error"].value("raw", "");
      }
      if (j.contains("gt")) {
        r.gt_boxes_text = j["gt"].value("boxes", "");
        r.gt_plan_text = j["gt"].value("plan", "");
      }
      if (j.contains("action")) {
        r.action = Action{j["action"].value("steer", 0.0), j["action"].value("throttle", 0.0),
                          j["action"].value("brake", 0.0)};
      }
      for (const auto& e : j.value("infractions", json::array())) {
        Infraction inf;
        if (auto k = infraction_kind_from(e.value("kind", ""))) inf.kind = *k;
        inf.t = e.value("t", 0.0);
        inf.note = e.value("note", "");
        r.new_infractions.push_back(std::move(inf));
      }
      log.ticks.push_back(std::move(r));
    } else if (type == "end") {
      if (auto c = terminal_cause_from(j.value("cause", ""))) log.cause = *c;
      log.end_t = j.value("t", 0.0);
      log.route_completion = j.value("route_completion", 0.0);
      for (const auto& e : j.value("infractions", json::array())) {
        Infraction inf;
        if (auto k = infraction_kind_from(e.value("kind", ""))) inf.kind = *k;
        inf.t = e.value("t", 0.0);
        inf.note = e.value("note", "");
        log.ledger.events.push_back(std::move(inf));
      }
    }
  }
  return log;
}

ReportOutput report_logs(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      paths.push_back(entry.path().string());
    }
  }
  if (paths.empty()) throw std::runtime_error("no .jsonl logs under " + dir);
  std::sort(paths.begin(), paths.end());

  struct PolicyData {
    std::vector<EpisodeResult> results;
    std::vector<SampleMatches> samples;
    std::vector<WaypointPlan> pred_plans, gt_plans;
  };
  std::map<std::string, PolicyData> by_policy;

  ReportOutput output;
  for (const auto& path : paths) {
    EpisodeLog log = load_episode_log(path);
    PolicyData& data = by_policy[log.policy];
    data.results.push_back(score_episode(log.outcome()));

    std::string traj_csv = "t,x,y,heading,speed\n";
    for (const auto& tick : log.ticks) {
      char row[160];
      std::snprintf(row, sizeof(row), "%.3f,%.6f,%.6f,%.6f,%.6f\n", tick.t, tick.ego.x,
                    tick.ego.y, tick.ego.heading, tick.ego.speed);
      traj_csv += row;
      if (tick.degraded) continue;
      SampleMatches sample;
      std::vector<Box3> preds;
      for (const auto& o : parse_object_report(tick.objects_text).objects) {
        preds.push_back(o.box);
      }
      const std::vector<Box3> gts = parse_boxes(tick.gt_boxes_text);
      sample.pred_count = static_cast<int>(preds.size());
      sample.gt_count = static_cast<int>(gts.size());
      for (const auto& pair : match_boxes(preds, gts).pairs) {
        sample.matched_ious.push_back(pair.iou);
      }
      data.samples.push_back(std::move(sample));
      if (!tick.plan_text.empty() && !tick.gt_plan_text.empty()) {
        data.pred_plans.push_back(parse_waypoint_plan(tick.plan_text));
        data.gt_plans.push_back(parse_waypoint_plan(tick.gt_plan_text));
      }
    }
    const fs::path traj_path = fs::path(path).replace_extension(".traj.csv");
    std::ofstream traj(traj_path, std::ios::binary | std::ios::trunc);
    traj << traj_csv;
    output.files.push_back(traj_path.string());
  }

  std::string text;
  std::vector<ClosedLoopRow> rows;
  for (const auto& [policy, data] : by_policy) {
    const DetectionSummary det = detection_summary(data.samples);
    const TrajectorySummary traj = ade_fde_mean(data.pred_plans, data.gt_plans);
    text += render_detection_table(policy, det) + "\n";
    text += render_trajectory_table(policy, traj) + "\n";
    rows.push_back(ClosedLoopRow{policy, aggregate_suite(data.results)});

    const fs::path det_path = fs::path(dir) / ("report_detection_" + policy + ".csv");
    std::ofstream(det_path, std::ios::binary | std::ios::trunc) << detection_csv(policy, det);
    output.files.push_back(det_path.string());
    const fs::path traj_path = fs::path(dir) / ("report_waypoints_" + policy + ".csv");
    std::ofstream(traj_path, std::ios::binary | std::ios::trunc) << trajectory_csv(policy, traj);
    output.files.push_back(traj_path.string());
  }
  text += render_closed_loop_table(rows);
  const fs::path cl_path = fs::path(dir) / "report_closedloop.csv";
  std::ofstream(cl_path, std::ios::binary | std::ios::trunc) << closed_loop_csv(rows);
  output.files.push_back(cl_path.string());

  output.text = std::move(text);
  return output;
}

}  // namespace xdrive
