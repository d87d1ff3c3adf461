// Staged reasoning pipeline. Each tick runs six stages in fixed order
// (objects -> light -> sign -> lane -> decision -> waypoints); every stage
// sees the current observation, all prior stage outputs of the tick, and the
// rolling history of recent ticks serialized as text tokens.

#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xdrive/reports.hpp"
#include "xdrive/world.hpp"

namespace xdrive {

class Policy;

// Ring of serialized (reports, decision) tokens from the most recent ticks,
// oldest first.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(std::size_t capacity = 4) : capacity_(capacity) {}

  void push(std::string token);
  void clear() { items_.clear(); }
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::string& at(std::size_t i) const { return items_.at(i); }
  std::vector<std::string> tokens() const { return {items_.begin(), items_.end()}; }

 private:
  std::size_t capacity_;
  std::deque<std::string> items_;
};

// What a policy sees for one tick. Exactly one of `scene` (ground-truth
// path) or `image_refs` (remote path) is populated.
struct Observation {
  double t = 0.0;
  double ego_speed = 0.0;
  NavigationCommand nav;
  std::optional<SceneTruth> scene;
  std::vector<std::string> image_refs;  // opaque base64 attachments
  const HistoryBuffer* history = nullptr;
};

struct PromptBundle {
  std::string system_prompt;
  std::string nav_text;
  std::string scene_text;
  std::string stage_prompt;
};

// Raised when a stage cannot produce its output (remote parse failure or
// timeout); carries the stage and the raw payload for the log.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(Stage stage, const std::string& message, std::string raw_payload)
      : std::runtime_error(std::string(to_string(stage)) + " stage: " + message),
        stage_(stage),
        raw_(std::move(raw_payload)) {}

  Stage stage() const { return stage_; }
  const std::string& raw_payload() const { return raw_; }

 private:
  Stage stage_;
  std::string raw_;
};

struct StageTrace {
  Stage stage = Stage::objects;
  int seq = 0;  // strictly increasing within a tick
  PromptBundle prompt;
  std::string output;  // canonical serialized stage output
};

struct TickTrace {
  std::vector<StageTrace> stages;
};

struct TickOutput {
  StageReports reports;
  Decision decision;
  WaypointPlan plan;
  TickTrace trace;
};

// Renders the deterministic prompt text for one stage. `prior` must hold the
// outputs of every earlier stage of this tick (unused fields ignored).
PromptBundle render_prompts(const Observation& obs, const StageReports& prior, Stage stage);

// Runs all six stages in order. Stage failures abort the tick by rethrowing
// PipelineError.
TickOutput run_pipeline(Policy& policy, const Observation& obs);

// Canonical history token for one completed tick.
std::string history_token(const StageReports& reports, const Decision& decision);

void update_history(HistoryBuffer& buffer, const TickOutput& tick);

}  // namespace xdrive
