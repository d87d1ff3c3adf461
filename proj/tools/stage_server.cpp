// Canned-response stage server for protocol self-tests. Speaks the
// newline-delimited JSON protocol on stdio (child-process mode) or on a
// single accepted TCP connection (--listen). Fault flags inject dropped,
// delayed or malformed responses for timeout/fallback testing.

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

const char* canned_text(const std::string& stage, bool fixture_objects) {
  if (stage == "objects") {
    if (fixture_objects) {
      return "objects: 2\n"
             "- category=vehicle box=(18.000, 0.000, 0.750, 4.500, 1.800, 1.500) motion=away "
             "attend=no reason=\n"
             "- category=pedestrian box=(12.000, -1.500, 0.900, 0.500, 0.500, 1.800) "
             "motion=crossing_left attend=yes reason=crossing ahead";
    }
    return "objects: 0";
  }
  if (stage == "light") return "light: visible=no";
  if (stage == "sign") return "signs: 0";
  if (stage == "lane") {
    return "lane: id=L0 left=solid right=solid legal_left=no legal_right=no special=none";
  }
  if (stage == "decision") {
    return "decision: template=default_driving target_speed=6.000\n"
           "text: Normal driving behavior, maintaining vigilance and adhering to general "
           "traffic regulations.\n"
           "rationale: canned response";
  }
  if (stage == "waypoints") {
    return "(3.000, 0.000), (6.000, 0.000), (9.000, 0.000), (12.000, 0.000), (15.000, 0.000), "
           "(18.000, 0.000)";
  }
  return "";
}

struct Faults {
  std::string drop_stage;
  int drop_times = 0;
  std::string delay_stage;
  int delay_ms = 0;
  int delay_times = 0;
  std::string garble_stage;
  int garble_times = 0;
};

class LineIo {
 public:
  explicit LineIo(int fd) : fd_(fd) {}

  bool read_line(std::string& line) {
    for (;;) {
      const std::size_t nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return true;
      }
      char chunk[4096];
      const ssize_t n = ::read(fd_, chunk, sizeof(chunk));
      if (n <= 0) return false;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void write_line(int out_fd, const std::string& line) {
    std::string payload = line + "\n";
    std::size_t sent = 0;
    while (sent < payload.size()) {
      const ssize_t n = ::write(out_fd, payload.data() + sent, payload.size() - sent);
      if (n <= 0) return;
      sent += static_cast<std::size_t>(n);
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

void serve(int in_fd, int out_fd, Faults& faults, bool fixture_objects) {
  LineIo io(in_fd);
  std::string line;
  while (io.read_line(line)) {
    if (line.empty()) continue;
    nlohmann::json request;
    try {
      request = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      continue;  // not a request; ignore
    }
    const std::string stage = request.value("stage", "");

    if (stage == faults.drop_stage && faults.drop_times > 0) {
      --faults.drop_times;
      continue;  // swallow the request: the client must time out
    }
    if (stage == faults.delay_stage && faults.delay_times > 0) {
      --faults.delay_times;
      std::this_thread::sleep_for(std::chrono::milliseconds(faults.delay_ms));
    }

    nlohmann::json response;
    response["v"] = 1;
    response["stage"] = stage;
    if (stage == faults.garble_stage && faults.garble_times > 0) {
      --faults.garble_times;
      response["text"] = "### not a stage report ###";
    } else {
      response["text"] = canned_text(stage, fixture_objects);
    }
    io.write_line(out_fd, response.dump());
  }
}

int listen_and_serve(int port, Faults& faults, bool fixture_objects) {
  const int server_fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (server_fd < 0) {
    std::cerr << "socket() failed\n";
    return 1;
  }
  int yes = 1;
  ::setsockopt(server_fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::bind(server_fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    std::cerr << "bind() failed: " << std::strerror(errno) << "\n";
    return 1;
  }
  socklen_t len = sizeof(addr);
  ::getsockname(server_fd, reinterpret_cast<sockaddr*>(&addr), &len);
  std::cout << "PORT " << ntohs(addr.sin_port) << std::endl;
  if (::listen(server_fd, 1) != 0) {
    std::cerr << "listen() failed\n";
    return 1;
  }
  const int client = ::accept(server_fd, nullptr, nullptr);
  if (client < 0) {
    std::cerr << "accept() failed\n";
    return 1;
  }
  serve(client, client, faults, fixture_objects);
  ::close(client);
  ::close(server_fd);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Canned-response stage server for protocol tests"};
  int listen_port = -1;
  bool fixture_objects = false;
  Faults faults;
  app.add_option("--listen", listen_port, "Serve one TCP connection on this port (0 = pick)");
  app.add_flag("--fixture-objects", fixture_objects,
               "Answer the objects stage with the two-object test fixture");
  app.add_option("--drop-stage", faults.drop_stage, "Swallow requests for this stage");
  app.add_option("--drop-times", faults.drop_times, "How many requests to swallow");
  app.add_option("--delay-stage", faults.delay_stage, "Delay responses for this stage");
  app.add_option("--delay-ms", faults.delay_ms, "Delay in milliseconds");
  app.add_option("--delay-times", faults.delay_times, "How many responses to delay");
  app.add_option("--garble-stage", faults.garble_stage, "Respond with non-report text");
  app.add_option("--garble-times", faults.garble_times, "How many responses to garble");
  CLI11_PARSE(app, argc, argv);

  if (listen_port >= 0) {
    return listen_and_serve(listen_port, faults, fixture_objects);
  }
  serve(STDIN_FILENO, STDOUT_FILENO, faults, fixture_objects);
  return 0;
}
