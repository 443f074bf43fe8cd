#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "common.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/version.hpp"
#include "kerrcat_app/commands.hpp"
#include "kerrcat_app/output.hpp"

namespace kerrcat::app {

using nlohmann::json;

namespace {

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table = {
      {"spectrum", cmd_spectrum},   {"ep-map", cmd_ep_map},     {"lep3", cmd_lep3},
      {"winding", cmd_winding},     {"fidelity", cmd_fidelity}, {"wigner", cmd_wigner},
      {"steady-state", cmd_steady_state},
  };
  return table;
}

void log_line(const std::string& msg) { std::cerr << "[kerrcat] " << msg << '\n'; }

}  // namespace

json run_command(const std::string& name, const RunConfig& cfg) {
  const auto& table = command_table();
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown command " + name);
  validate(cfg);
  ensure_directory(cfg.out);

  std::vector<std::string> warnings;
  set_warning_sink([&](const std::string& w) {
    warnings.push_back(w);
    log_line("warning: " + w);
  });
  const auto t0 = std::chrono::steady_clock::now();
  CommandResult res;
  try {
    res = it->second(cfg);
  } catch (...) {
    set_warning_sink(nullptr);
    throw;
  }
  set_warning_sink(nullptr);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json checks = json::array();
  bool all = true;
  for (const auto& c : res.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"passed", c.passed}});
    all = all && c.passed;
    if (!c.passed) log_line("cross-check failed: " + c.name);
  }
  json summary = {{"command", name},
                  {"version", kVersion},
                  {"config_hash", detail::config_hash_hex(cfg)},
                  {"config", cfg},
                  {"files", res.files},
                  {"checks", checks},
                  {"all_checks_passed", all},
                  {"results", res.results},
                  {"warnings", warnings},
                  {"timings", {{"seconds", seconds}}},
                  {"tolerances",
                   {{"numeric_crosscheck", cfg.tolerances.numeric_crosscheck},
                    {"winding_quantization", cfg.tolerances.winding_quantization},
                    {"winding_max_samples", cfg.tolerances.winding_max_samples}}}};
  write_json(std::filesystem::path(cfg.out) / "summary.json", summary);
  for (const auto& f : res.files) log_line(name + ": wrote " + (std::filesystem::path(cfg.out) / f).string());
  return summary;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Kerr-cat Liouvillian spectra, exceptional points and dynamics", "kerrcat"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  int workers = 0;
  int dim = 0;
  bool kappa_angular = false;
  bool numeric = false;
  bool full_spectrum = false;
  std::string state;
  std::vector<std::string> overrides;

  const std::map<std::string, std::string> help = {
      {"spectrum", "closed-form eigenvalues over the (eps, Delta) grid"},
      {"ep-map", "LEP2 curves and LEP3 points"},
      {"lep3", "closed-form LEP3 checked against a Newton search"},
      {"winding", "resultant winding numbers on closed contours"},
      {"fidelity", "full vs reduced dynamics fidelity over (Delta, t)"},
      {"wigner", "Wigner function of a cat, coherent or steady state"},
      {"steady-state", "full-space steady state and optional Liouvillian spectrum"},
  };
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--dim", dim, "Fock truncation")->check(CLI::PositiveNumber);
    sub->add_flag("--kappa-angular", kappa_angular, "read kappa as cyclic MHz (multiply by 2 pi)");
    sub->add_option("--set", overrides, "override a config entry, /json/pointer=value");
    if (name == "spectrum") sub->add_flag("--numeric", numeric, "add dense eigensolver columns");
    if (name == "steady-state") sub->add_flag("--full-spectrum", full_spectrum, "dump the Liouvillian spectrum");
    if (name == "wigner") sub->add_option("--state", state, "cat_plus, cat_minus, coherent or steady_state");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out.empty()) cfg.out = out;
    if (workers > 0) cfg.workers = workers;
    if (dim > 0) cfg.dim = dim;
    if (kappa_angular) cfg.model.kappa_angular = true;
    if (numeric) cfg.numeric = true;
    if (full_spectrum) cfg.full_spectrum = true;
    if (!state.empty()) cfg.wigner.state = state;
    for (const auto& o : overrides) apply_override(cfg, o);
    const json summary = run_command(command, cfg);
    log_line(command + ": done in " + std::to_string(summary["timings"]["seconds"].get<double>()) + " s, checks " +
             (summary["all_checks_passed"].get<bool>() ? "passed" : "FAILED"));
    return 0;
  } catch (const ConfigError& e) {
    log_line(std::string("config error: ") + e.what() + " (see kerrcat " + command + " --help)");
    return 2;
  } catch (const DomainError& e) {
    log_line(std::string("invalid input: ") + e.what());
    return 2;
  } catch (const NumericError& e) {
    log_line(std::string("numeric failure: ") + e.what());
    return 3;
  } catch (const IoError& e) {
    log_line(std::string("I/O error: ") + e.what());
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    log_line(std::string("I/O error: ") + e.what());
    return 4;
  } catch (const std::exception& e) {
    log_line(std::string("error: ") + e.what());
    return 1;
  }
}

}  // namespace kerrcat::app
