#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kerrcat/model.hpp"

namespace kerrcat::app {

/// Config problems surface as exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment-side parameters in cyclic MHz; kappa is a rate in 1/us unless
/// kappa_angular is set.
struct ModelConfig {
  double kerr_mhz = 6.7;
  double two_photon_mhz = 15.5;
  double kappa = 1.0 / 15.5;
  double drive_mhz = 0.74;
  double delta_mhz = 0.0;
  bool kappa_angular = false;

  model::ModelParams params() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Uniform grid. units: "lep3" (multiples of the closed-form LEP3
/// coordinates), "rad_per_us", "mhz" or "us".
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  std::string units = "lep3";

  std::vector<double> values() const;
  bool operator==(const GridSpec&) const = default;
};

struct ContourSpec {
  std::string name;
  /// "enclosing", "excluding", "lep2" or "custom"
  std::string preset = "custom";
  double center_eps = 0.0;
  double center_delta = 0.0;
  double radius = 0.3;
  std::string units = "lep3";
  int samples = 720;

  bool operator==(const ContourSpec&) const = default;
};

struct WignerConfig {
  /// "cat_plus", "cat_minus", "coherent" or "steady_state"
  std::string state = "cat_plus";
  GridSpec x{-3.5, 3.5, 71, "quadrature"};
  GridSpec p{-3.5, 3.5, 71, "quadrature"};

  bool operator==(const WignerConfig&) const = default;
};

struct FidelityConfig {
  std::vector<std::string> initials = {"catplus", "coherent"};
  std::vector<bool> eps_on = {true, false};
  GridSpec delta{-0.5, 0.5, 21, "mhz"};
  GridSpec t{0.0, 60.0, 121, "us"};
  double min_fidelity_bound = 0.93;
  double final_fidelity_bound = 0.99;

  bool operator==(const FidelityConfig&) const = default;
};

struct ToleranceConfig {
  double numeric_crosscheck = 1e-9;  ///< closed form vs dense 4x4 eigensolve
  double winding_quantization = 1e-3;
  int winding_max_samples = 46080;

  bool operator==(const ToleranceConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  int dim = 40;
  GridSpec eps{-2.0, 2.0, 101, "lep3"};
  GridSpec delta{-2.0, 2.0, 101, "lep3"};
  int lep2_slices = 201;
  std::vector<ContourSpec> contours = default_contours();
  FidelityConfig fidelity;
  WignerConfig wigner;
  bool numeric = false;       ///< spectrum: add dense-eigensolver columns
  bool full_spectrum = false;  ///< steady-state: dump the Liouvillian spectrum
  std::uint64_t seed = 20240917ULL;
  ToleranceConfig tolerances;
  int workers = 1;
  std::string out = "out";

  static std::vector<ContourSpec> default_contours();
  bool operator==(const RunConfig&) const = default;
};

void to_json(nlohmann::json& j, const GridSpec& g);
void from_json(const nlohmann::json& j, GridSpec& g);
void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

RunConfig load_config(const std::string& path);
/// Applies "/json/pointer=value" overrides; value is parsed as JSON when
/// possible, else taken as a string.
void apply_override(RunConfig& c, const std::string& assignment);
void validate(const RunConfig& c);

/// FNV-1a of the canonical config JSON without workers and out.
std::uint64_t config_hash(const RunConfig& c);
std::string hex(std::uint64_t v);

/// Scale of a grid in rad/us given the LEP3 magnitudes for lep3 units.
double unit_scale(const std::string& units, double lep3_value);

}  // namespace kerrcat::app
