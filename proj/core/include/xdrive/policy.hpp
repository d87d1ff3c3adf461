// Policy seam: the six stage handlers a decision backend must provide, plus
// the two local implementations (ground-truth oracle and the no-reasoning
// ablation).

#pragma once

#include <memory>
#include <string>

#include "xdrive/cot.hpp"
#include "xdrive/reports.hpp"

namespace xdrive {

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;

  virtual ObjectReport objects(const Observation& obs, const PromptBundle& prompt) = 0;
  virtual LightReport light(const Observation& obs, const PromptBundle& prompt,
                            const ObjectReport& objects) = 0;
  virtual SignReport sign(const Observation& obs, const PromptBundle& prompt,
                          const ObjectReport& objects, const LightReport& light) = 0;
  virtual LaneReport lane(const Observation& obs, const PromptBundle& prompt,
                          const ObjectReport& objects, const LightReport& light,
                          const SignReport& sign) = 0;
  virtual Decision decide(const Observation& obs, const PromptBundle& prompt,
                          const StageReports& reports) = 0;
  virtual WaypointPlan plan(const Observation& obs, const PromptBundle& prompt,
                            const Decision& decision) = 0;
};

// Stop decisions latch until their hazard has been clear for this many
// consecutive ticks, so stop/go chatter cannot develop at a boundary.
inline constexpr int kStopClearTicks = 5;

struct StopHysteresis {
  std::optional<TemplateId> active;  // red_light_* or pedestrian_crossing
  int clear_count = 0;
};

// Rule-table decision from completed stage reports. Priority: red light >
// crossing pedestrian > vehicle cutting in > same-lane lead within 20 m >
// navigation maneuver > green light > default driving. `hysteresis` may be
// null for a stateless decision.
Decision oracle_decide(const StageReports& reports, const Observation& obs,
                       StopHysteresis* hysteresis);

// Samples the route ahead under a trapezoidal speed profile toward the
// decision's target speed (accel 2, decel 4 m/s^2), clipped to stop short of
// a red-light stop line or a crossing pedestrian.
WaypointPlan oracle_plan(const Decision& decision, const Observation& obs);

// Decision without object-attention reasoning: only the nearest same-lane
// vehicle and the light phase are considered, so crossing pedestrians and
// cut-ins go unhandled.
Decision ablation_decide(const Observation& obs, const LightReport& light,
                         StopHysteresis* hysteresis);

// Ground-truth policy implementing the full staged rule table.
class OraclePolicy : public Policy {
 public:
  std::string name() const override { return "oracle"; }

  ObjectReport objects(const Observation& obs, const PromptBundle&) override;
  LightReport light(const Observation& obs, const PromptBundle&, const ObjectReport&) override;
  SignReport sign(const Observation& obs, const PromptBundle&, const ObjectReport&,
                  const LightReport&) override;
  LaneReport lane(const Observation& obs, const PromptBundle&, const ObjectReport&,
                  const LightReport&, const SignReport&) override;
  Decision decide(const Observation& obs, const PromptBundle&, const StageReports&) override;
  WaypointPlan plan(const Observation& obs, const PromptBundle&, const Decision&) override;

 private:
  StopHysteresis hysteresis_;
};

// No-reasoning arm: the object stage reports nothing and the decision uses
// the raw scene only.
class AblationPolicy : public Policy {
 public:
  std::string name() const override { return "no-cot"; }

  ObjectReport objects(const Observation&, const PromptBundle&) override { return {}; }
  LightReport light(const Observation& obs, const PromptBundle&, const ObjectReport&) override;
  SignReport sign(const Observation& obs, const PromptBundle&, const ObjectReport&,
                  const LightReport&) override;
  LaneReport lane(const Observation& obs, const PromptBundle&, const ObjectReport&,
                  const LightReport&, const SignReport&) override;
  Decision decide(const Observation& obs, const PromptBundle&, const StageReports&) override;
  WaypointPlan plan(const Observation& obs, const PromptBundle&, const Decision&) override;

 private:
  StopHysteresis hysteresis_;
};

// Stage reports straight from ground truth (shared by both local policies).
ObjectReport scene_object_report(const SceneTruth& scene, bool with_attention);
LightReport scene_light_report(const SceneTruth& scene);
SignReport scene_sign_report(const SceneTruth& scene);
LaneReport scene_lane_report(const SceneTruth& scene);

}  // namespace xdrive
