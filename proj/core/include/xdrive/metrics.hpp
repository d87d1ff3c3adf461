// Evaluation metrics: volumetric IoU with greedy matching and
// precision/recall, displacement errors over the waypoint horizon, and the
// closed-loop driving score / success rate, plus the plain-text and CSV
// table renderers for all three.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "xdrive/reports.hpp"
#include "xdrive/world.hpp"

namespace xdrive {

inline constexpr double kIouMatchThreshold = 0.5;

// Axis-aligned volumetric intersection over union.
double iou3d(const Box3& a, const Box3& b);

struct MatchResult {
  struct Pair {
    int pred = 0;
    int gt = 0;
    double iou = 0.0;
  };
  std::vector<Pair> pairs;  // one-to-one, all with iou >= threshold
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

// Greedy one-to-one matching by descending IoU; ties broken by lower pred
// then gt index.
MatchResult match_boxes(const std::vector<Box3>& preds, const std::vector<Box3>& gts,
                        double threshold = kIouMatchThreshold);

struct DetectionSummary {
  double iou_sample = 0.0;  // mean over samples of per-sample mean matched IoU
  double iou_box = 0.0;     // mean over all matched pairs
  double precision = 0.0;
  double recall = 0.0;
  long pred_total = 0;
  long gt_total = 0;
};

struct SampleMatches {
  std::vector<double> matched_ious;
  int pred_count = 0;
  int gt_count = 0;
};

DetectionSummary detection_summary(const std::vector<SampleMatches>& samples);

struct TrajectorySummary {
  std::map<double, double> ade_by_horizon;  // {0.5, 1, 2, 3} s -> meters
  double fde = 0.0;                         // at the 3.0 s point
};

TrajectorySummary ade_fde(const WaypointPlan& pred, const WaypointPlan& gt);
// Aggregate over many plan pairs (horizon-wise means).
TrajectorySummary ade_fde_mean(const std::vector<WaypointPlan>& preds,
                               const std::vector<WaypointPlan>& gts);

struct PenaltyConfig {
  double collision_pedestrian = 0.50;
  double collision_vehicle = 0.60;
  double collision_static = 0.65;
  double red_light = 0.70;
  double route_deviation = 0.80;
};

struct EpisodeOutcome {
  std::string scenario;
  std::string policy;
  double route_completion = 0.0;  // [0, 1]
  double end_t = 0.0;
  double time_budget = 0.0;
  TerminalCause cause = TerminalCause::timeout;
  InfractionLedger ledger;
};

struct EpisodeResult {
  double driving_score = 0.0;  // [0, 100]
  bool success = false;
  double route_completion = 0.0;
  int infraction_count = 0;
};

// driving_score = 100 * route_completion * product of per-event penalties;
// success requires full completion, no collision, no red-light violation,
// inside the time budget.
EpisodeResult score_episode(const EpisodeOutcome& outcome, const PenaltyConfig& penalties = {});

struct SuiteAggregate {
  double mean_driving_score = 0.0;
  double success_rate_pct = 0.0;
  int episodes = 0;
};

SuiteAggregate aggregate_suite(const std::vector<EpisodeResult>& results);

// --- table rendering -----------------------------------------------------

struct ClosedLoopRow {
  std::string label;
  SuiteAggregate aggregate;
};

std::string render_detection_table(const std::string& label, const DetectionSummary& s);
std::string render_trajectory_table(const std::string& label, const TrajectorySummary& s);
std::string render_closed_loop_table(const std::vector<ClosedLoopRow>& rows);

std::string detection_csv(const std::string& label, const DetectionSummary& s);
std::string trajectory_csv(const std::string& label, const TrajectorySummary& s);
std::string closed_loop_csv(const std::vector<ClosedLoopRow>& rows);

}  // namespace xdrive
