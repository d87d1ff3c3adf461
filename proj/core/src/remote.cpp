#include "xdrive/remote.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

#include "json.hpp"
#include "xdrive/parse.hpp"

namespace xdrive {

namespace {

using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
  const auto left =
      std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left > 0 ? static_cast<int>(left) : 0;
}

// Shared fd-based line IO with poll() timeouts.
class FdTransport : public LineTransport {
 public:
  FdTransport(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

  ~FdTransport() override {
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  }

  void send_line(const std::string& line) override {
    std::string payload = line;
    payload.push_back('\n');
    std::size_t sent = 0;
    while (sent < payload.size()) {
      const ssize_t n = ::write(write_fd_, payload.data() + sent, payload.size() - sent);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw RemoteError(RemoteError::Kind::closed,
                          std::string("write failed: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::string recv_line(int timeout_ms) override {
    const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
      const std::size_t nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      struct pollfd pfd{read_fd_, POLLIN, 0};
      const int pr = ::poll(&pfd, 1, remaining_ms(deadline));
      if (pr == 0) throw RemoteError(RemoteError::Kind::timeout, "response timed out");
      if (pr < 0) {
        if (errno == EINTR) continue;
        throw RemoteError(RemoteError::Kind::closed,
                          std::string("poll failed: ") + std::strerror(errno));
      }
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n == 0) throw RemoteError(RemoteError::Kind::closed, "connection closed");
      if (n < 0) {
        if (errno == EINTR) continue;
        throw RemoteError(RemoteError::Kind::closed,
                          std::string("read failed: ") + std::strerror(errno));
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 protected:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

class ChildTransport : public FdTransport {
 public:
  ChildTransport(int read_fd, int write_fd, pid_t pid)
      : FdTransport(read_fd, write_fd), pid_(pid) {}

  ~ChildTransport() override {
    if (pid_ > 0) {
      ::kill(pid_, SIGTERM);
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

 private:
  pid_t pid_;
};

std::unique_ptr<LineTransport> connect_tcp(const std::string& host, const std::string& port,
                                           int timeout_ms) {
  struct addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  struct addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || !res) {
    throw RemoteError(RemoteError::Kind::connect, "cannot resolve " + host + ":" + port);
  }
  int fd = -1;
  for (struct addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) {
    throw RemoteError(RemoteError::Kind::connect, "connection refused: " + host + ":" + port);
  }
  (void)timeout_ms;
  return std::make_unique<FdTransport>(fd, fd);
}

std::unique_ptr<LineTransport> spawn_child(const std::string& command) {
  int to_child[2];   // parent writes -> child stdin
  int from_child[2]; // child stdout -> parent reads
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
    throw RemoteError(RemoteError::Kind::connect, "pipe() failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw RemoteError(RemoteError::Kind::connect, "fork() failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::make_unique<ChildTransport>(from_child[0], to_child[1], pid);
}

}  // namespace

std::unique_ptr<LineTransport> LineTransport::connect(const RemoteConfig& cfg) {
  if (cfg.endpoint.rfind("cmd:", 0) == 0) {
    return spawn_child(cfg.endpoint.substr(4));
  }
  const std::size_t colon = cfg.endpoint.rfind(':');
  if (colon == std::string::npos) {
    throw RemoteError(RemoteError::Kind::connect,
                      "endpoint must be host:port or cmd:<command>, got '" + cfg.endpoint + "'");
  }
  return connect_tcp(cfg.endpoint.substr(0, colon), cfg.endpoint.substr(colon + 1),
                     cfg.timeout_ms);
}

std::string base64_encode(const std::string& bytes) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 2 < bytes.size()) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back(alphabet[v & 63]);
    i += 3;
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string remote_call(LineTransport& transport, const RemoteConfig& cfg,
                        const std::string& session, Stage stage, const PromptBundle& bundle,
                        const std::vector<std::string>& images,
                        const std::vector<std::string>& history) {
  nlohmann::json request;
  request["v"] = 1;
  request["session"] = session;
  request["stage"] = std::string(to_string(stage));
  request["prompt"] = bundle.system_prompt + "\n\n" + bundle.nav_text + "\n" +
                      bundle.scene_text + "\n\n" + bundle.stage_prompt;
  request["images"] = images;
  request["history"] = history;
  const std::string line = request.dump();

  const int attempts = 1 + std::max(0, cfg.max_retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    transport.send_line(line);
    try {
      // Discard stale responses left over from previously timed-out calls.
      for (int drain = 0; drain < 8; ++drain) {
        const std::string reply = transport.recv_line(cfg.timeout_ms);
        nlohmann::json parsed;
        try {
          parsed = nlohmann::json::parse(reply);
        } catch (const nlohmann::json::exception&) {
          throw RemoteError(RemoteError::Kind::protocol, "response is not JSON: " + reply);
        }
        if (parsed.value("v", 0) != 1) {
          throw RemoteError(RemoteError::Kind::protocol, "unsupported protocol version");
        }
        if (parsed.value("stage", "") != std::string(to_string(stage))) continue;
        if (!parsed.contains("text") || !parsed["text"].is_string()) {
          throw RemoteError(RemoteError::Kind::protocol, "response missing text field");
        }
        return parsed["text"].get<std::string>();
      }
      throw RemoteError(RemoteError::Kind::protocol, "no response for stage after draining");
    } catch (const RemoteError& e) {
      if (e.kind() == RemoteError::Kind::timeout && attempt + 1 < attempts) continue;
      throw;
    }
  }
  throw RemoteError(RemoteError::Kind::timeout, "retries exhausted");
}

RemotePolicy::RemotePolicy(RemoteConfig cfg, std::string session)
    : cfg_(std::move(cfg)), session_(std::move(session)) {
  transport_ = LineTransport::connect(cfg_);
}

std::string RemotePolicy::call(const Observation& obs, const PromptBundle& prompt, Stage stage) {
  std::vector<std::string> history;
  if (obs.history) history = obs.history->tokens();
  try {
    return remote_call(*transport_, cfg_, session_, stage, prompt, obs.image_refs, history);
  } catch (const RemoteError& e) {
    if (e.kind() == RemoteError::Kind::timeout || e.kind() == RemoteError::Kind::protocol) {
      throw PipelineError(stage, e.what(), "");
    }
    throw;  // connect/closed: the transport is gone, the episode cannot continue
  }
}

ObjectReport RemotePolicy::objects(const Observation& obs, const PromptBundle& prompt) {
  const std::string text = call(obs, prompt, Stage::objects);
  try {
    return parse_object_report(text);
  } catch (const ParseError& e) {
    throw PipelineError(Stage::objects, e.what(), text);
  }
}

LightReport RemotePolicy::light(const Observation& obs, const PromptBundle& prompt,
                                const ObjectReport&) {
  const std::string text = call(obs, prompt, Stage::light);
  try {
    return parse_light_report(text);
  } catch (const ParseError& e) {
    throw PipelineError(Stage::light, e.what(), text);
  }
}

SignReport RemotePolicy::sign(const Observation& obs, const PromptBundle& prompt,
                              const ObjectReport&, const LightReport&) {
  const std::string text = call(obs, prompt, Stage::sign);
  try {
    return parse_sign_report(text);
  } catch (const ParseError& e) {
    throw PipelineError(Stage::sign, e.what(), text);
  }
}

LaneReport RemotePolicy::lane(const Observation& obs, const PromptBundle& prompt,
                              const ObjectReport&, const LightReport&, const SignReport&) {
  const std::string text = call(obs, prompt, Stage::lane);
  try {
    return parse_lane_report(text);
  } catch (const ParseError& e) {
    throw PipelineError(Stage::lane, e.what(), text);
  }
}

Decision RemotePolicy::decide(const Observation& obs, const PromptBundle& prompt,
                              const StageReports&) {
  const std::string text = call(obs, prompt, Stage::decision);
  try {
    return parse_decision(text);
  } catch (const ParseError& e) {
    throw PipelineError(Stage::decision, e.what(), text);
  }
}

WaypointPlan RemotePolicy::plan(const Observation& obs, const PromptBundle& prompt,
                                const Decision&) {
  const std::string text = call(obs, prompt, Stage::waypoints);
  try {
    return parse_waypoint_plan(text);
  } catch (const ParseError& e) {
    throw PipelineError(Stage::waypoints, e.what(), text);
  }
}

}  // namespace xdrive
