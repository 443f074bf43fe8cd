#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "common.hpp"
#include "kerrcat/catspace.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/exceptional.hpp"
#include "kerrcat/winding.hpp"
#include "kerrcat_app/output.hpp"

namespace kerrcat::app {

using nlohmann::json;

namespace detail {

Lep3Units lep3_units(const model::ModelParams& p) {
  if (!(p.kappa > 0.0)) throw ConfigError("lep3 grid units need kappa > 0");
  const auto cf = exceptional::lep3_closed_form(p.alpha(), p.kappa);
  return {std::abs(cf[0].eps), std::abs(cf[0].delta)};
}

std::vector<double> plane_values(const GridSpec& g, double lep3_value) {
  std::vector<double> v = g.values();
  const double s = unit_scale(g.units, lep3_value);
  for (double& x : v) x *= s;
  return v;
}

std::string config_hash_hex(const RunConfig& cfg) { return hex(config_hash(cfg)); }

std::string provenance(const model::ModelParams& p, int dim) {
  std::ostringstream s;
  s << "params kerr=" << format_double(p.kerr) << " two_photon=" << format_double(p.two_photon)
    << " kappa=" << format_double(p.kappa) << " drive=" << format_double(p.drive)
    << " delta=" << format_double(p.delta) << " alpha=" << format_double(p.alpha())
    << " dim=" << dim << " (angular units rad/us)";
  return s.str();
}

Check make_check(std::string name, double value, double bound, bool passed) {
  return {std::move(name), value, bound, passed};
}
Check below(std::string name, double value, double bound) {
  return make_check(std::move(name), value, bound, value < bound);
}
Check above(std::string name, double value, double bound) {
  return make_check(std::move(name), value, bound, value > bound);
}

}  // namespace detail

namespace {

using detail::above;
using detail::below;

// permutation of `numeric` closest to `closed` in the max norm
std::array<Complex, 4> match_to(const std::array<Complex, 4>& closed,
                                std::array<Complex, 4> numeric) {
  std::array<int, 4> perm{0, 1, 2, 3};
  std::array<int, 4> best = perm;
  double best_err = std::numeric_limits<double>::infinity();
  do {
    double err = 0.0;
    for (int k = 0; k < 4; ++k) err = std::max(err, std::abs(closed[k] - numeric[perm[k]]));
    if (err < best_err) {
      best_err = err;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::array<Complex, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = numeric[best[k]];
  return out;
}

double min_pair_gap(const std::array<Complex, 3>& e) {
  return std::min({std::abs(e[0] - e[1]), std::abs(e[0] - e[2]), std::abs(e[1] - e[2])});
}

}  // namespace

CommandResult cmd_spectrum(const RunConfig& cfg) {
  const auto params = cfg.model.params();
  const auto base = model::ReducedModel::from(params);
  const auto units = detail::lep3_units(params);
  const auto eps = detail::plane_values(cfg.eps, units.eps);
  const auto delta = detail::plane_values(cfg.delta, units.delta);
  const std::size_t n = eps.size() * delta.size();

  std::vector<Row> rows(n);
  std::vector<double> rel(n, 0.0);
  std::vector<char> degenerate(n, 0);
  detail::parallel_for(n, cfg.workers, [&](std::size_t idx) {
    const double e = eps[idx / delta.size()];
    const double d = delta[idx % delta.size()];
    const auto md = base.at(e, d);
    const auto inv = catspace::cubic_invariants(md);
    const auto spec = catspace::cardano_eigenvalues(inv);
    Row r{e, d};
    for (int k = 1; k < 4; ++k) {
      r.emplace_back(spec.E[k].real());
      r.emplace_back(spec.E[k].imag());
    }
    r.emplace_back(inv.q);
    r.emplace_back(inv.m);
    if (cfg.numeric) {
      const auto num = match_to(spec.E, catspace::numeric_eigenvalues(catspace::reduced_liouvillian(md)));
      double diff = 0.0, size = 0.0;
      for (int k = 0; k < 4; ++k) {
        diff = std::max(diff, std::abs(num[k] - spec.E[k]));
        size = std::max(size, std::abs(spec.E[k]));
      }
      rel[idx] = size > 0.0 ? diff / size : diff;
      for (int k = 1; k < 4; ++k) {
        r.emplace_back(num[k].real());
        r.emplace_back(num[k].imag());
      }
      r.emplace_back(rel[idx]);
    }
    degenerate[idx] = spec.degenerate;
    r.emplace_back(std::string(spec.degenerate ? "degenerate" : "ok"));
    rows[idx] = std::move(r);
  });
  sort_rows(rows);

  CsvTable t;
  t.columns = {"eps", "delta", "re_E2", "im_E2", "re_E3", "im_E3", "re_E4", "im_E4", "q", "m"};
  if (cfg.numeric) {
    for (const char* c : {"re_N2", "im_N2", "re_N3", "im_N3", "re_N4", "im_N4", "numeric_rel_diff"}) {
      t.columns.push_back(c);
    }
  }
  t.columns.push_back("status");
  t.rows = std::move(rows);
  write_csv(std::filesystem::path(cfg.out) / "spectrum.csv", t, detail::config_hash_hex(cfg),
            {detail::provenance(params, 4)});

  CommandResult res;
  res.files = {"spectrum.csv"};
  res.results["rows"] = n;
  res.results["lep3_units"] = {{"eps", units.eps}, {"delta", units.delta}};
  if (cfg.numeric) {
    // a dense eigensolve loses half (LEP2) or two thirds (LEP3) of the digits
    // at a degenerate point, so those rows are reported but not checked
    double worst = 0.0, worst_degenerate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double& slot = degenerate[i] ? worst_degenerate : worst;
      slot = std::max(slot, rel[i]);
    }
    res.results["max_closed_vs_numeric"] = worst;
    res.results["max_closed_vs_numeric_degenerate_rows"] = worst_degenerate;
    res.checks.push_back(below("closed_form_vs_numeric", worst, cfg.tolerances.numeric_crosscheck));
  }
  return res;
}

CommandResult cmd_ep_map(const RunConfig& cfg) {
  const auto params = cfg.model.params();
  const double alpha = params.alpha();
  const double kappa = params.kappa;
  const double scale = kappa * alpha * alpha;
  const auto units = detail::lep3_units(params);
  const auto eps = detail::plane_values(cfg.eps, units.eps);
  const model::ReducedModel base{alpha, kappa, 0.0, 0.0};

  exceptional::Lep2Options opts;
  opts.eps_lo = eps.front();
  opts.eps_hi = eps.back();
  opts.n_eps = cfg.lep2_slices;
  const auto trace = exceptional::lep2_trace(alpha, kappa, opts);

  std::vector<Row> rows;
  std::vector<Row> curve_rows;
  double worst_gap = 0.0;
  double worst_coalescence = 1.0;
  long long point_count = 0;
  for (std::size_t c = 0; c < trace.curves.size(); ++c) {
    const auto& pts = trace.curves[c].points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      rows.push_back({p.eps, p.delta, static_cast<long long>(p.order), p.disc_residual, p.q, p.m,
                      p.coalescence, std::string("lep2")});
      curve_rows.push_back({static_cast<long long>(c), static_cast<long long>(i), p.eps, p.delta});
      if (p.order != 2) continue;
      ++point_count;
      const auto spec = catspace::cardano_eigenvalues(base.at(p.eps, p.delta));
      worst_gap = std::max(worst_gap, min_pair_gap(spec.nonzero()) / scale);
      worst_coalescence = std::min(worst_coalescence, p.coalescence);
    }
  }

  const auto cf = exceptional::lep3_closed_form(alpha, kappa);
  const double h = opts.n_eps > 1 ? (opts.eps_hi - opts.eps_lo) / (opts.n_eps - 1) : 0.0;
  double worst_closure = 0.0;
  int in_range = 0;
  for (const auto& p : cf) {
    rows.push_back({p.eps, p.delta, static_cast<long long>(p.order), p.disc_residual, p.q, p.m,
                    p.coalescence, std::string("lep3")});
    if (p.eps < opts.eps_lo || p.eps > opts.eps_hi) continue;
    ++in_range;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& curve : trace.curves) {
      for (const auto& q : curve.points) {
        nearest = std::min(nearest, std::hypot((q.eps - p.eps) / units.eps,
                                               (q.delta - p.delta) / units.delta));
      }
    }
    worst_closure = std::max(worst_closure, nearest);
  }
  sort_rows(rows);

  const std::string hash = detail::config_hash_hex(cfg);
  const auto prov = detail::provenance(params, 4);
  write_csv(std::filesystem::path(cfg.out) / "ep_map.csv",
            {{"eps", "delta", "order", "disc_residual", "q", "m", "coalescence", "kind"}, rows},
            hash, {prov});
  write_csv(std::filesystem::path(cfg.out) / "lep2_curves.csv",
            {{"curve", "index", "eps", "delta"}, curve_rows}, hash, {prov});

  CommandResult res;
  res.files = {"ep_map.csv", "lep2_curves.csv"};
  json curves = json::array();
  for (const auto& c : trace.curves) {
    curves.push_back({{"points", c.points.size()},
                      {"start", exceptional::to_string(c.start)},
                      {"end", exceptional::to_string(c.end)}});
  }
  json vertices = json::array();
  for (const auto& v : trace.vertices) vertices.push_back({{"eps", v.eps}, {"delta", v.delta}, {"order", v.order}});
  json lep3 = json::array();
  for (const auto& p : cf) lep3.push_back({{"eps", p.eps}, {"delta", p.delta}, {"order", p.order}});
  res.results = {{"curves", curves},
                 {"traced_vertices", vertices},
                 {"lep3_closed_form", lep3},
                 {"lep2_points", point_count}};
  res.checks.push_back(below("lep2_min_eigenvalue_gap_over_kappa_alpha2", worst_gap, 1e-7));
  res.checks.push_back(below("lep2_one_minus_min_coalescence", 1.0 - worst_coalescence, 1e-4));
  res.checks.push_back(detail::make_check("traced_vertices_match_closed_form_count",
                                          static_cast<double>(trace.vertices.size()), in_range,
                                          static_cast<int>(trace.vertices.size()) == in_range));
  res.checks.push_back(detail::make_check("lep3_distance_to_curves_in_lep3_units", worst_closure,
                                          h / units.eps, worst_closure <= h / units.eps));
  return res;
}

CommandResult cmd_lep3(const RunConfig& cfg) {
  const auto params = cfg.model.params();
  const double alpha = params.alpha();
  const double kappa = params.kappa;
  if (!(kappa > 0.0)) throw ConfigError("lep3 needs kappa > 0");
  const double scale = kappa * alpha * alpha;
  const model::ReducedModel base{alpha, kappa, 0.0, 0.0};
  const auto cf = exceptional::lep3_closed_form(alpha, kappa);

  std::vector<Row> rows;
  double worst_rel = 0.0, worst_spread = 0.0, worst_coal = 0.0;
  for (const auto& p : cf) {
    const auto num = exceptional::lep3_numeric(alpha, kappa, 1.1 * p.eps, 1.1 * p.delta);
    const double re = std::abs(num.eps - p.eps) / std::abs(p.eps);
    const double rd = std::abs(num.delta - p.delta) / std::abs(p.delta);
    worst_rel = std::max({worst_rel, re, rd});
    const auto spec = catspace::cardano_eigenvalues(base.at(p.eps, p.delta));
    const auto e = spec.nonzero();
    const double spread =
        std::max({std::abs(e[0] - e[1]), std::abs(e[0] - e[2]), std::abs(e[1] - e[2])}) / scale;
    worst_spread = std::max(worst_spread, spread);
    worst_coal = std::max(worst_coal, 1.0 - std::min(p.coalescence, p.coalescence_second));
    rows.push_back({p.eps, p.delta, static_cast<long long>(p.order), p.disc_residual, p.q, p.m,
                    p.coalescence, p.coalescence_second, num.eps, num.delta, re, rd,
                    e[0].real()});
  }
  sort_rows(rows);
  write_csv(std::filesystem::path(cfg.out) / "lep3.csv",
            {{"eps", "delta", "order", "disc_residual", "q", "m", "coalescence",
              "coalescence_second", "newton_eps", "newton_delta", "rel_err_eps", "rel_err_delta",
              "triple_eigenvalue"},
             rows},
            detail::config_hash_hex(cfg), {detail::provenance(params, 4)});

  CommandResult res;
  res.files = {"lep3.csv"};
  res.results = {{"eps_mhz", model::angular_to_mhz(std::abs(cf[0].eps))},
                 {"delta_mhz", model::angular_to_mhz(std::abs(cf[0].delta))},
                 {"eps", std::abs(cf[0].eps)},
                 {"delta", std::abs(cf[0].delta)}};
  res.checks.push_back(below("closed_form_vs_newton_relative", worst_rel, 1e-8));
  res.checks.push_back(below("triple_root_spread_over_kappa_alpha2", worst_spread, 1e-8));
  res.checks.push_back(below("one_minus_coalescence", worst_coal, 1e-3));
  return res;
}

CommandResult cmd_winding(const RunConfig& cfg) {
  const auto params = cfg.model.params();
  const double alpha = params.alpha();
  const double kappa = params.kappa;
  const auto units = detail::lep3_units(params);
  const auto sc = model::subspace_constants(alpha);
  const std::string hash = detail::config_hash_hex(cfg);

  winding::WindingOptions opts;
  opts.max_samples = cfg.tolerances.winding_max_samples;
  opts.quantization_tol = cfg.tolerances.winding_quantization;

  CommandResult res;
  json contours = json::array();
  for (const auto& spec : cfg.contours) {
    const double se = unit_scale(spec.units, units.eps);
    const double sd = unit_scale(spec.units, units.delta);
    double eps0 = spec.center_eps * se;
    double delta0 = spec.center_delta * sd;
    if (spec.preset == "lep2") {
      eps0 = 0.0;
      delta0 = kappa / sc.pj_minus[2];
    }
    const auto contour = winding::Contour::scaled_circle(eps0, delta0, spec.radius, se, sd, spec.samples);

    json routes = json::object();
    winding::WindingResult main;
    bool agree = true;
    for (auto [route, label] : {std::pair{winding::Route::Eigenvalues, "eigenvalues"},
                                std::pair{winding::Route::Invariants, "invariants"},
                                std::pair{winding::Route::NumericEigensolver, "numeric"}}) {
      opts.route = route;
      const auto w = winding::winding_number(contour, alpha, kappa, opts);
      routes[label] = {{"W", w.winding}, {"raw", w.raw}, {"samples", w.samples}};
      if (route == winding::Route::Eigenvalues) {
        main = w;
      } else if (w.winding != main.winding) {
        agree = false;
      }
    }

    auto refined = contour;
    refined.samples = main.samples;
    const auto traj = winding::winding_trajectory(refined, alpha, kappa);
    std::vector<Row> rows;
    rows.reserve(traj.size());
    for (const auto& p : traj) rows.push_back({p.phi, p.r1_norm, p.r2_norm});
    const std::string traj_file = "trajectory_" + spec.name + ".csv";
    write_csv(std::filesystem::path(cfg.out) / traj_file, {{"phi", "r1_norm", "r2_norm"}, rows},
              hash, {detail::provenance(params, 4), "contour " + spec.name});

    const json out = {{"center", {eps0, delta0}},
                      {"radius", spec.radius},
                      {"units", spec.units},
                      {"semi_axes", {spec.radius * se, spec.radius * sd}},
                      {"samples", main.samples},
                      {"raw", main.raw},
                      {"W", main.winding},
                      {"routes", routes}};
    const std::string json_file = "winding_" + spec.name + ".json";
    write_json(std::filesystem::path(cfg.out) / json_file, out);
    res.files.push_back(json_file);
    res.files.push_back(traj_file);
    json entry = {{"name", spec.name}, {"preset", spec.preset}};
    entry.update(out);
    contours.push_back(entry);

    const double dev = std::abs(main.raw - main.winding);
    res.checks.push_back(below(spec.name + "_quantization", dev, opts.quantization_tol));
    res.checks.push_back(detail::make_check(spec.name + "_routes_agree", agree ? 1.0 : 0.0, 1.0, agree));
    if (spec.preset == "enclosing") {
      res.checks.push_back(detail::make_check(spec.name + "_abs_W", std::abs(main.winding), 1.0,
                                              std::abs(main.winding) == 1));
    } else if (spec.preset != "custom") {
      res.checks.push_back(detail::make_check(spec.name + "_abs_W", std::abs(main.winding), 0.0,
                                              main.winding == 0));
    }
  }
  res.results["contours"] = contours;
  res.results["lep3_units"] = {{"eps", units.eps}, {"delta", units.delta}};
  return res;
}

}  // namespace kerrcat::app
