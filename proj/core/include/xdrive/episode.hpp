// Closed-loop episode runner and log analysis. Each episode writes a JSON-
// lines trace (one meta record, one record per tick, one end record; see
// docs/trace_schema.md) that report_logs() later turns into the detection,
// waypoint and closed-loop tables.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xdrive/control.hpp"
#include "xdrive/cot.hpp"
#include "xdrive/metrics.hpp"
#include "xdrive/scenario.hpp"

namespace xdrive {

struct RunConfig {
  std::string scenario;           // catalog name or scenario file path
  std::string policy = "oracle";  // oracle | no-cot | remote
  std::string endpoint;           // remote policy endpoint
  unsigned long long seed = 0;
  std::string out_dir;  // empty: $XDRIVE_OUT, else "out"
  double dt = kTickSeconds;
  int ticks_max = 0;  // 0: derived from the scenario time budget
  double detect_range = kDefaultDetectRange;
  std::size_t history_depth = 4;
  int timeout_ms = 2000;
  bool write_log = true;
};

struct TickRecord {
  double t = 0.0;
  Pose ego;
  double route_s = 0.0;
  std::string lane_id;
  NavKind nav = NavKind::follow;
  bool degraded = false;
  std::string error_stage;
  std::string error_message;
  std::string error_raw;
  // Canonical serialized stage outputs.
  std::string objects_text, light_text, sign_text, lane_text;
  Decision decision;
  std::string plan_text;
  std::string gt_boxes_text;  // ground-truth ego-frame boxes
  std::string gt_plan_text;   // stateless oracle reference plan
  Action action;
  std::vector<Infraction> new_infractions;
  TickTrace trace;
};

struct EpisodeLog {
  std::string scenario;
  std::string policy;
  unsigned long long seed = 0;
  double dt = kTickSeconds;
  double time_budget = 0.0;
  double route_length = 0.0;
  std::vector<TickRecord> ticks;
  TerminalCause cause = TerminalCause::timeout;
  double end_t = 0.0;
  double route_completion = 0.0;
  InfractionLedger ledger;
  std::string log_path;  // empty when not written

  EpisodeOutcome outcome() const;
};

// Runs one closed-loop episode; writes the JSONL trace incrementally when
// cfg.write_log. Throws ScenarioError for bad scenarios and RemoteError when
// a remote endpoint cannot be reached at all.
EpisodeLog run_episode(const RunConfig& cfg);

// Runs every catalog scenario with the configured policy.
std::vector<EpisodeLog> run_suite(const RunConfig& cfg);

// Reads an episode trace back from disk.
EpisodeLog load_episode_log(const std::string& path);

struct ReportOutput {
  std::string text;                      // rendered tables
  std::vector<std::string> files;        // CSVs written next to the logs
};

// Aggregates every *.jsonl under dir: closed-loop table per policy, plus
// detection and waypoint summaries of policy outputs against logged ground
// truth. Writes CSV files (tables + one ego-trajectory CSV per episode).
ReportOutput report_logs(const std::string& dir);

std::string default_out_dir();

}  // namespace xdrive
