// Remote-policy bridge: newline-delimited JSON over TCP or a child process's
// stdio. One request line per stage, one response line, same order.
//
// Request:  {"v":1,"session":str,"stage":str,"prompt":str,
//            "images":[base64,...],"history":[str,...]}
// Response: {"v":1,"stage":str,"text":str}

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "xdrive/policy.hpp"

namespace xdrive {

struct RemoteConfig {
  // "host:port" for TCP, or "cmd:<shell command>" for a child process.
  std::string endpoint;
  int timeout_ms = 2000;
  int max_retries = 1;
};

class RemoteError : public std::runtime_error {
 public:
  enum class Kind { connect, timeout, closed, protocol };

  RemoteError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Line-oriented request/response transport.
class LineTransport {
 public:
  virtual ~LineTransport() = default;
  virtual void send_line(const std::string& line) = 0;
  // Blocks up to timeout_ms for one full line (without the newline).
  virtual std::string recv_line(int timeout_ms) = 0;

  static std::unique_ptr<LineTransport> connect(const RemoteConfig& cfg);
};

std::string base64_encode(const std::string& bytes);

// One stage round trip; resends once per allowed retry on timeout. Stale
// responses (stage mismatch after a timed-out request) are discarded.
std::string remote_call(LineTransport& transport, const RemoteConfig& cfg,
                        const std::string& session, Stage stage, const PromptBundle& bundle,
                        const std::vector<std::string>& images,
                        const std::vector<std::string>& history);

// Policy backed by a remote stage server. Stage responses are parsed with
// the canonical report grammar; malformed text or an exhausted retry budget
// surfaces as PipelineError for that stage. Transport loss (connection
// refused/closed) propagates as RemoteError.
class RemotePolicy : public Policy {
 public:
  RemotePolicy(RemoteConfig cfg, std::string session);

  std::string name() const override { return "remote"; }

  ObjectReport objects(const Observation& obs, const PromptBundle& prompt) override;
  LightReport light(const Observation& obs, const PromptBundle& prompt,
                    const ObjectReport&) override;
  SignReport sign(const Observation& obs, const PromptBundle& prompt, const ObjectReport&,
                  const LightReport&) override;
  LaneReport lane(const Observation& obs, const PromptBundle& prompt, const ObjectReport&,
                  const LightReport&, const SignReport&) override;
  Decision decide(const Observation& obs, const PromptBundle& prompt,
                  const StageReports&) override;
  WaypointPlan plan(const Observation& obs, const PromptBundle& prompt,
                    const Decision&) override;

 private:
  std::string call(const Observation& obs, const PromptBundle& prompt, Stage stage);

  RemoteConfig cfg_;
  std::string session_;
  std::unique_ptr<LineTransport> transport_;
};

}  // namespace xdrive
