#include "kerrcat_app/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "kerrcat/linalg.hpp"

namespace kerrcat::app {

using nlohmann::json;

model::ModelParams ModelConfig::params() const {
  return model::params_from_experiment(
      kerr_mhz, two_photon_mhz, kappa, drive_mhz, delta_mhz,
      kappa_angular ? model::KappaConvention::Angular : model::KappaConvention::Rate);
}

std::vector<double> GridSpec::values() const { return linspace(lo, hi, n); }

std::vector<ContourSpec> RunConfig::default_contours() {
  return {
      {"enclosing", "enclosing", 1.0, 1.0, 0.3, "lep3", 720},
      {"excluding", "excluding", 1.5, 0.0, 0.3, "lep3", 720},
      {"lep2", "lep2", 0.0, 0.0, 0.1, "lep3", 720},
  };
}

void to_json(json& j, const GridSpec& g) {
  j = json{{"lo", g.lo}, {"hi", g.hi}, {"n", g.n}, {"units", g.units}};
}

void from_json(const json& j, GridSpec& g) {
  g.lo = j.value("lo", g.lo);
  g.hi = j.value("hi", g.hi);
  g.n = j.value("n", g.n);
  g.units = j.value("units", g.units);
}

namespace {

json contour_json(const ContourSpec& c) {
  return {{"name", c.name},         {"preset", c.preset},
          {"center_eps", c.center_eps}, {"center_delta", c.center_delta},
          {"radius", c.radius},     {"units", c.units},
          {"samples", c.samples}};
}

ContourSpec contour_from(const json& j) {
  ContourSpec c;
  c.name = j.value("name", c.name);
  c.preset = j.value("preset", c.preset);
  c.center_eps = j.value("center_eps", c.center_eps);
  c.center_delta = j.value("center_delta", c.center_delta);
  c.radius = j.value("radius", c.radius);
  c.units = j.value("units", c.units);
  c.samples = j.value("samples", c.samples);
  if (c.name.empty()) c.name = c.preset;
  return c;
}

}  // namespace

void to_json(json& j, const RunConfig& c) {
  json contours = json::array();
  for (const auto& s : c.contours) contours.push_back(contour_json(s));
  j = json{
      {"model",
       {{"kerr_mhz", c.model.kerr_mhz},
        {"two_photon_mhz", c.model.two_photon_mhz},
        {"kappa", c.model.kappa},
        {"drive_mhz", c.model.drive_mhz},
        {"delta_mhz", c.model.delta_mhz},
        {"kappa_angular", c.model.kappa_angular}}},
      {"dim", c.dim},
      {"eps", c.eps},
      {"delta", c.delta},
      {"lep2_slices", c.lep2_slices},
      {"contours", contours},
      {"fidelity",
       {{"initials", c.fidelity.initials},
        {"eps_on", c.fidelity.eps_on},
        {"delta", c.fidelity.delta},
        {"t", c.fidelity.t},
        {"min_fidelity_bound", c.fidelity.min_fidelity_bound},
        {"final_fidelity_bound", c.fidelity.final_fidelity_bound}}},
      {"wigner", {{"state", c.wigner.state}, {"x", c.wigner.x}, {"p", c.wigner.p}}},
      {"numeric", c.numeric},
      {"full_spectrum", c.full_spectrum},
      {"seed", c.seed},
      {"tolerances",
       {{"numeric_crosscheck", c.tolerances.numeric_crosscheck},
        {"winding_quantization", c.tolerances.winding_quantization},
        {"winding_max_samples", c.tolerances.winding_max_samples}}},
      {"workers", c.workers},
      {"out", c.out},
  };
}

void from_json(const json& j, RunConfig& c) {
  static const std::set<std::string> known = {
      "model",  "dim",     "eps",           "delta", "lep2_slices", "contours",
      "fidelity", "wigner", "numeric", "full_spectrum", "seed",  "tolerances",
      "workers", "out"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    c.model.kerr_mhz = m.value("kerr_mhz", c.model.kerr_mhz);
    c.model.two_photon_mhz = m.value("two_photon_mhz", c.model.two_photon_mhz);
    c.model.kappa = m.value("kappa", c.model.kappa);
    c.model.drive_mhz = m.value("drive_mhz", c.model.drive_mhz);
    c.model.delta_mhz = m.value("delta_mhz", c.model.delta_mhz);
    c.model.kappa_angular = m.value("kappa_angular", c.model.kappa_angular);
  }
  c.dim = j.value("dim", c.dim);
  if (j.contains("eps")) j.at("eps").get_to(c.eps);
  if (j.contains("delta")) j.at("delta").get_to(c.delta);
  c.lep2_slices = j.value("lep2_slices", c.lep2_slices);
  if (j.contains("contours")) {
    c.contours.clear();
    for (const auto& s : j.at("contours")) c.contours.push_back(contour_from(s));
  }
  if (j.contains("fidelity")) {
    const json& f = j.at("fidelity");
    c.fidelity.initials = f.value("initials", c.fidelity.initials);
    c.fidelity.eps_on = f.value("eps_on", c.fidelity.eps_on);
    if (f.contains("delta")) f.at("delta").get_to(c.fidelity.delta);
    if (f.contains("t")) f.at("t").get_to(c.fidelity.t);
    c.fidelity.min_fidelity_bound = f.value("min_fidelity_bound", c.fidelity.min_fidelity_bound);
    c.fidelity.final_fidelity_bound =
        f.value("final_fidelity_bound", c.fidelity.final_fidelity_bound);
  }
  if (j.contains("wigner")) {
    const json& w = j.at("wigner");
    c.wigner.state = w.value("state", c.wigner.state);
    if (w.contains("x")) w.at("x").get_to(c.wigner.x);
    if (w.contains("p")) w.at("p").get_to(c.wigner.p);
  }
  c.numeric = j.value("numeric", c.numeric);
  c.full_spectrum = j.value("full_spectrum", c.full_spectrum);
  c.seed = j.value("seed", c.seed);
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    c.tolerances.numeric_crosscheck = t.value("numeric_crosscheck", c.tolerances.numeric_crosscheck);
    c.tolerances.winding_quantization =
        t.value("winding_quantization", c.tolerances.winding_quantization);
    c.tolerances.winding_max_samples =
        t.value("winding_max_samples", c.tolerances.winding_max_samples);
  }
  c.workers = j.value("workers", c.workers);
  c.out = j.value("out", c.out);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  RunConfig c;
  try {
    json::parse(in).get_to(c);
  } catch (const json::exception& e) {
    throw ConfigError("invalid config " + path + ": " + e.what());
  }
  return c;
}

void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0 || assignment[0] != '/') {
    throw ConfigError("override must look like /path/to/key=value, got '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json doc = c;
  try {
    json::json_pointer ptr(path);
    if (!doc.contains(ptr)) throw ConfigError("override targets unknown key " + path);
    doc[ptr] = value;
    RunConfig updated;
    doc.get_to(updated);
    c = updated;
  } catch (const json::exception& e) {
    throw ConfigError("bad override '" + assignment + "': " + e.what());
  }
}

namespace {

void check_grid(const GridSpec& g, const std::string& what,
                const std::set<std::string>& units) {
  if (g.n < 1) {
    throw ConfigError(what + " grid is empty (n = " + std::to_string(g.n) +
                      "); set e.g. --set /" + what + "/n=21");
  }
  if (!std::isfinite(g.lo) || !std::isfinite(g.hi)) throw ConfigError(what + " grid bounds must be finite");
  if (g.n > 1 && !(g.hi > g.lo)) throw ConfigError(what + " grid needs hi > lo");
  if (!units.count(g.units)) throw ConfigError(what + " grid has unknown units '" + g.units + "'");
}

}  // namespace

void validate(const RunConfig& c) {
  try {
    c.model.params();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  if (c.dim < 4) throw ConfigError("dim must be >= 4");
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  const std::set<std::string> plane = {"lep3", "rad_per_us", "mhz"};
  check_grid(c.eps, "eps", plane);
  check_grid(c.delta, "delta", plane);
  check_grid(c.fidelity.delta, "fidelity/delta", {"mhz", "rad_per_us"});
  check_grid(c.fidelity.t, "fidelity/t", {"us"});
  if (c.fidelity.t.lo != 0.0) throw ConfigError("fidelity/t must start at 0");
  check_grid(c.wigner.x, "wigner/x", {"quadrature"});
  check_grid(c.wigner.p, "wigner/p", {"quadrature"});
  if (c.lep2_slices < 3) throw ConfigError("lep2_slices must be >= 3");
  for (const auto& s : c.fidelity.initials) {
    if (s != "catplus" && s != "coherent") throw ConfigError("unknown initial state '" + s + "'");
  }
  if (c.fidelity.initials.empty() || c.fidelity.eps_on.empty()) {
    throw ConfigError("fidelity needs at least one initial state and drive setting");
  }
  static const std::set<std::string> states = {"cat_plus", "cat_minus", "coherent", "steady_state"};
  if (!states.count(c.wigner.state)) throw ConfigError("unknown wigner state '" + c.wigner.state + "'");
  static const std::set<std::string> presets = {"enclosing", "excluding", "lep2", "custom"};
  std::set<std::string> names;
  for (const auto& s : c.contours) {
    if (!presets.count(s.preset)) throw ConfigError("unknown contour preset '" + s.preset + "'");
    if (!plane.count(s.units)) throw ConfigError("contour " + s.name + " has unknown units");
    if (!(s.radius > 0.0) || s.samples < 8) throw ConfigError("contour " + s.name + " needs radius > 0 and samples >= 8");
    if (!names.insert(s.name).second) throw ConfigError("duplicate contour name " + s.name);
  }
  if (c.tolerances.winding_max_samples < 8 || !(c.tolerances.winding_quantization > 0.0) ||
      !(c.tolerances.numeric_crosscheck > 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
}

std::uint64_t config_hash(const RunConfig& c) {
  json j = c;
  j.erase("workers");
  j.erase("out");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double unit_scale(const std::string& units, double lep3_value) {
  if (units == "lep3") return lep3_value;
  if (units == "mhz") return model::kTwoPi;
  if (units == "rad_per_us" || units == "us" || units == "quadrature") return 1.0;
  throw ConfigError("unknown units '" + units + "'");
}

}  // namespace kerrcat::app
