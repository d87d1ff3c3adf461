// xdrive CLI: closed-loop episode runner, catalog suite, log reports, and
// the remote-protocol self test.
//
// Exit codes: 0 ok, 1 usage, 2 scenario error, 3 policy failure.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "xdrive/episode.hpp"
#include "xdrive/parse.hpp"
#include "xdrive/remote.hpp"

namespace fs = std::filesystem;
using namespace xdrive;

namespace {

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--policy", cfg.policy, "Policy: oracle | no-cot | remote")
      ->check(CLI::IsMember({"oracle", "no-cot", "remote"}));
  cmd->add_option("--endpoint", cfg.endpoint,
                  "Remote endpoint: host:port or cmd:<command> (remote policy)");
  cmd->add_option("--seed", cfg.seed, "Run seed recorded in logs");
  cmd->add_option("--out", cfg.out_dir, "Output directory (default $XDRIVE_OUT or ./out)");
  cmd->add_option("--dt", cfg.dt, "Tick length in seconds");
  cmd->add_option("--ticks-max", cfg.ticks_max, "Hard tick limit (0 = from time budget)");
  cmd->add_option("--detect-range", cfg.detect_range, "Perception range in meters");
  cmd->add_option("--history-depth", cfg.history_depth, "History buffer depth in ticks");
  cmd->add_option("--timeout-ms", cfg.timeout_ms, "Remote stage timeout in milliseconds");
  cmd->set_config("--config", "", "Config file (flag values win)");
}

int print_episode(const EpisodeLog& log) {
  const EpisodeResult result = score_episode(log.outcome());
  std::cout << log.scenario << " [" << log.policy << "] -> " << to_string(log.cause)
            << " t=" << log.end_t << "s completion=" << log.route_completion
            << " score=" << result.driving_score << (result.success ? " success" : " fail");
  if (!log.log_path.empty()) std::cout << "  log: " << log.log_path;
  std::cout << "\n";
  return log.cause == TerminalCause::policy_failure ? 3 : 0;
}

std::string bundled_server_command(const char* argv0) {
  fs::path self(argv0);
  fs::path dir = self.has_parent_path() ? self.parent_path() : fs::path(".");
  return "cmd:" + (dir / "xdrive_stage_server").string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop staged-reasoning driving harness"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  CLI::App* run = app.add_subcommand("run", "Run one closed-loop episode");
  run->add_option("--scenario", run_cfg.scenario, "Catalog scenario name or scenario file path")
      ->required();
  add_common_flags(run, run_cfg);

  RunConfig suite_cfg;
  CLI::App* suite = app.add_subcommand("suite", "Run the full ten-scenario catalog");
  add_common_flags(suite, suite_cfg);

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "Render metric tables from logs");
  report->add_option("--dir", report_dir, "Directory holding .jsonl episode logs");

  std::string export_dir;
  CLI::App* cat = app.add_subcommand("catalog", "List built-in scenarios");
  cat->add_option("--export", export_dir, "Write canonical .scn files to this directory");

  RunConfig echo_cfg;
  echo_cfg.scenario = "default_driving";
  echo_cfg.policy = "remote";
  CLI::App* echo = app.add_subcommand("protocol-echo",
                                      "Self-test the wire protocol against a stage server");
  echo->add_option("--scenario", echo_cfg.scenario, "Scenario for the echo run");
  add_common_flags(echo, echo_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      return print_episode(run_episode(run_cfg));
    }
    if (*suite) {
      const std::vector<EpisodeLog> logs = run_suite(suite_cfg);
      std::vector<EpisodeResult> results;
      int rc = 0;
      for (const auto& log : logs) {
        rc = std::max(rc, print_episode(log));
        results.push_back(score_episode(log.outcome()));
      }
      const SuiteAggregate agg = aggregate_suite(results);
      std::cout << "suite: episodes=" << agg.episodes
                << " mean_driving_score=" << agg.mean_driving_score
                << " success_rate=" << agg.success_rate_pct << "%\n";
      return rc;
    }
    if (*report) {
      if (report_dir.empty()) report_dir = default_out_dir();
      const ReportOutput out = report_logs(report_dir);
      std::cout << out.text;
      for (const auto& f : out.files) std::cout << "wrote " << f << "\n";
      return 0;
    }
    if (*cat) {
      for (const auto& spec : catalog()) {
        std::cout << spec.name << "  (lanes=" << spec.lane_graph.lanes.size()
                  << ", actors=" << spec.actors.size() << ", lights=" << spec.lights.size()
                  << ", budget=" << spec.time_budget << "s)\n";
        if (!export_dir.empty()) {
          fs::create_directories(export_dir);
          const fs::path path = fs::path(export_dir) / (spec.name + ".scn");
          std::ofstream(path, std::ios::binary | std::ios::trunc) << serialize_scenario(spec);
          std::cout << "  wrote " << path.string() << "\n";
        }
      }
      return 0;
    }
    if (*echo) {
      if (echo_cfg.endpoint.empty()) echo_cfg.endpoint = bundled_server_command(argv[0]);
      std::cout << "protocol-echo against " << echo_cfg.endpoint << "\n";
      const EpisodeLog log = run_episode(echo_cfg);
      int degraded = 0;
      for (const auto& t : log.ticks) degraded += t.degraded ? 1 : 0;
      std::cout << "ticks=" << log.ticks.size() << " degraded=" << degraded << "\n";
      return print_episode(log);
    }
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const RemoteError& e) {
    std::cerr << "remote policy failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
