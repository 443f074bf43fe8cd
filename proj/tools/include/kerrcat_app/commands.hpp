#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kerrcat_app/config.hpp"

namespace kerrcat::app {

/// One internal cross-check reported in summary.json.
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
};

struct CommandResult {
  std::vector<std::string> files;  ///< written data files, relative to out
  std::vector<Check> checks;
  nlohmann::json results = nlohmann::json::object();
};

using Command = std::function<CommandResult(const RunConfig&)>;

CommandResult cmd_spectrum(const RunConfig& cfg);
CommandResult cmd_ep_map(const RunConfig& cfg);
CommandResult cmd_lep3(const RunConfig& cfg);
CommandResult cmd_winding(const RunConfig& cfg);
CommandResult cmd_fidelity(const RunConfig& cfg);
CommandResult cmd_wigner(const RunConfig& cfg);
CommandResult cmd_steady_state(const RunConfig& cfg);

/// Validates cfg, runs the command, and writes summary.json next to the data.
nlohmann::json run_command(const std::string& name, const RunConfig& cfg);

/// Full command line entry point; returns the process exit code: 0 when the
/// run completes (failed cross-checks are reported in summary.json), 2 config,
/// 3 numeric, 4 I/O, 1 anything else.
int run_cli(int argc, const char* const* argv);

}  // namespace kerrcat::app
