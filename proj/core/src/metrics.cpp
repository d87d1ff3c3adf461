#include "xdrive/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace xdrive {

namespace {

double axis_overlap(double c1, double e1, double c2, double e2) {
  const double lo = std::max(c1 - 0.5 * e1, c2 - 0.5 * e2);
  const double hi = std::min(c1 + 0.5 * e1, c2 + 0.5 * e2);
  return std::max(0.0, hi - lo);
}

std::string fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return buf;
}

}  // namespace

double iou3d(const Box3& a, const Box3& b) {
  const double ix = axis_overlap(a.x, a.length, b.x, b.length);
  const double iy = axis_overlap(a.y, a.width, b.y, b.width);
  const double iz = axis_overlap(a.z, a.height, b.z, b.height);
  const double inter = ix * iy * iz;
  const double uni = a.volume() + b.volume() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

MatchResult match_boxes(const std::vector<Box3>& preds, const std::vector<Box3>& gts,
                        double threshold) {
  struct Candidate {
    double iou;
    int pred;
    int gt;
  };
  std::vector<Candidate> candidates;
  for (int p = 0; p < static_cast<int>(preds.size()); ++p) {
    for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
      const double v = iou3d(preds[p], gts[g]);
      if (v >= threshold) candidates.push_back({v, p, g});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });

  MatchResult result;
  std::vector<bool> pred_used(preds.size(), false), gt_used(gts.size(), false);
  for (const auto& c : candidates) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = true;
    gt_used[c.gt] = true;
    result.pairs.push_back({c.pred, c.gt, c.iou});
  }
  result.tp = static_cast<int>(result.pairs.size());
  result.fp = static_cast<int>(preds.size()) - result.tp;
  result.fn = static_cast<int>(gts.size()) - result.tp;
  return result;
}

DetectionSummary detection_summary(const std::vector<SampleMatches>& samples) {
  DetectionSummary s;
  double sample_iou_sum = 0.0;
  int samples_with_matches = 0;
  double box_iou_sum = 0.0;
  long matched = 0;
  for (const auto& sm : samples) {
    s.pred_total += sm.pred_count;
    s.gt_total += sm.gt_count;
    if (!sm.matched_ious.empty()) {
      double local = 0.0;
      for (double v : sm.matched_ious) local += v;
      box_iou_sum += local;
      matched += static_cast<long>(sm.matched_ious.size());
      sample_iou_sum += local / static_cast<double>(sm.matched_ious.size());
      ++samples_with_matches;
    }
  }
  if (samples_with_matches > 0) s.iou_sample = sample_iou_sum / samples_with_matches;
  if (matched > 0) s.iou_box = box_iou_sum / static_cast<double>(matched);
  s.precision = s.pred_total > 0 ? static_cast<double>(matched) / s.pred_total : 0.0;
  s.recall = s.gt_total > 0 ? static_cast<double>(matched) / s.gt_total : 0.0;
  return s;
}

TrajectorySummary ade_fde(const WaypointPlan& pred, const WaypointPlan& gt) {
  TrajectorySummary s;
  const std::vector<double> horizons = {0.5, 1.0, 2.0, 3.0};
  for (double h : horizons) {
    double sum = 0.0;
    int n = 0;
    for (int i = 0; i < WaypointPlan::kCount; ++i) {
      if (WaypointPlan::time_at(i) > h + 1e-9) break;
      sum += distance(pred.points[i], gt.points[i]);
      ++n;
    }
    s.ade_by_horizon[h] = n > 0 ? sum / n : 0.0;
  }
  s.fde = distance(pred.points[WaypointPlan::kCount - 1], gt.points[WaypointPlan::kCount - 1]);
  return s;
}

TrajectorySummary ade_fde_mean(const std::vector<WaypointPlan>& preds,
                               const std::vector<WaypointPlan>& gts) {
  TrajectorySummary mean;
  const std::size_t n = std::min(preds.size(), gts.size());
  for (double h : {0.5, 1.0, 2.0, 3.0}) mean.ade_by_horizon[h] = 0.0;
  if (n == 0) return mean;
  for (std::size_t i = 0; i < n; ++i) {
    const TrajectorySummary one = ade_fde(preds[i], gts[i]);
    for (const auto& [h, v] : one.ade_by_horizon) mean.ade_by_horizon[h] += v;
    mean.fde += one.fde;
  }
  for (auto& [h, v] : mean.ade_by_horizon) v /= static_cast<double>(n);
  mean.fde /= static_cast<double>(n);
  return mean;
}

EpisodeResult score_episode(const EpisodeOutcome& outcome, const PenaltyConfig& penalties) {
  EpisodeResult r;
  r.route_completion = std::clamp(outcome.route_completion, 0.0, 1.0);
  double factor = 1.0;
  for (const auto& e : outcome.ledger.events) {
    switch (e.kind) {
      case InfractionKind::collision_pedestrian:
        factor *= penalties.collision_pedestrian;
        break;
      case InfractionKind::collision_vehicle:
        factor *= penalties.collision_vehicle;
        break;
      case InfractionKind::collision_static:
        factor *= penalties.collision_static;
        break;
      case InfractionKind::red_light_violation:
        factor *= penalties.red_light;
        break;
      case InfractionKind::route_deviation:
        factor *= penalties.route_deviation;
        break;
      case InfractionKind::timeout:
        break;
    }
  }
  r.driving_score = 100.0 * r.route_completion * factor;
  r.infraction_count = static_cast<int>(outcome.ledger.events.size());
  const bool completed = r.route_completion >= 1.0 - 1e-9 &&
                         outcome.cause == TerminalCause::destination &&
                         outcome.end_t <= outcome.time_budget + 1e-9;
  r.success = completed && !outcome.ledger.any_collision() &&
              outcome.ledger.count(InfractionKind::red_light_violation) == 0;
  return r;
}

SuiteAggregate aggregate_suite(const std::vector<EpisodeResult>& results) {
  SuiteAggregate agg;
  agg.episodes = static_cast<int>(results.size());
  if (results.empty()) return agg;
  int successes = 0;
  for (const auto& r : results) {
    agg.mean_driving_score += r.driving_score;
    if (r.success) ++successes;
  }
  agg.mean_driving_score /= results.size();
  agg.success_rate_pct = 100.0 * successes / results.size();
  return agg;
}

// --- rendering -----------------------------------------------------------

std::string render_detection_table(const std::string& label, const DetectionSummary& s) {
  std::ostringstream out;
  out << "Results of Object Recognition\n";
  out << "Dataset | 3D IoU >= 0.5\n";
  out << "        | IoU(sample) | IoU(box) | Precision | Recall | pred(total) | gt(total)\n";
  out << label << " | " << fixed(s.iou_sample, 3) << " | " << fixed(s.iou_box, 3) << " | "
      << fixed(s.precision, 3) << " | " << fixed(s.recall, 3) << " | " << s.pred_total << " | "
      << s.gt_total << "\n";
  return out.str();
}

std::string render_trajectory_table(const std::string& label, const TrajectorySummary& s) {
  std::ostringstream out;
  out << "Results of Waypoints Accuracy\n";
  out << "Dataset | ADE | | | | FDE\n";
  out << "        | 0.5s | 1s | 2s | 3s |\n";
  out << label;
  for (double h : {0.5, 1.0, 2.0, 3.0}) {
    out << " | " << fixed(s.ade_by_horizon.at(h), 3);
  }
  out << " | " << fixed(s.fde, 3) << "\n";
  return out.str();
}

std::string render_closed_loop_table(const std::vector<ClosedLoopRow>& rows) {
  std::ostringstream out;
  out << "Results of Closed-loop Experiments\n";
  out << "Policy | Driving Score↑ | Success Rate(%)↑\n";
  for (const auto& row : rows) {
    out << row.label << " | " << fixed(row.aggregate.mean_driving_score, 1) << " | "
        << fixed(row.aggregate.success_rate_pct, 1) << "\n";
  }
  return out.str();
}

std::string detection_csv(const std::string& label, const DetectionSummary& s) {
  std::ostringstream out;
  out << "dataset,iou_sample,iou_box,precision,recall,pred_total,gt_total\n";
  out << label << "," << fixed(s.iou_sample, 6) << "," << fixed(s.iou_box, 6) << ","
      << fixed(s.precision, 6) << "," << fixed(s.recall, 6) << "," << s.pred_total << ","
      << s.gt_total << "\n";
  return out.str();
}

std::string trajectory_csv(const std::string& label, const TrajectorySummary& s) {
  std::ostringstream out;
  out << "dataset,ade_0.5s,ade_1s,ade_2s,ade_3s,fde\n";
  out << label;
  for (double h : {0.5, 1.0, 2.0, 3.0}) out << "," << fixed(s.ade_by_horizon.at(h), 6);
  out << "," << fixed(s.fde, 6) << "\n";
  return out.str();
}

std::string closed_loop_csv(const std::vector<ClosedLoopRow>& rows) {
  std::ostringstream out;
  out << "policy,driving_score,success_rate_pct,episodes\n";
  for (const auto& row : rows) {
    out << row.label << "," << fixed(row.aggregate.mean_driving_score, 3) << ","
        << fixed(row.aggregate.success_rate_pct, 3) << "," << row.aggregate.episodes << "\n";
  }
  return out.str();
}

}  // namespace xdrive
