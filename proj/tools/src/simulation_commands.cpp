#include <algorithm>
#include <cmath>
#include <limits>

#include "common.hpp"
#include "kerrcat/catspace.hpp"
#include "kerrcat/dynamics.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"
#include "kerrcat/liouville.hpp"
#include "kerrcat_app/output.hpp"

namespace kerrcat::app {

using nlohmann::json;
using detail::above;
using detail::below;

CommandResult cmd_fidelity(const RunConfig& cfg) {
  const auto params = cfg.model.params();
  const auto& fc = cfg.fidelity;
  std::vector<double> delta = fc.delta.values();
  for (double& d : delta) d *= unit_scale(fc.delta.units, 1.0);
  const auto t = fc.t.values();

  std::vector<dynamics::InitialState> initials;
  for (const auto& s : fc.initials) {
    initials.push_back(s == "catplus" ? dynamics::InitialState::CatPlus
                                      : dynamics::InitialState::Coherent);
  }

  dynamics::FidelityMapOptions opts;
  opts.dim = cfg.dim;
  opts.workers = cfg.workers;

  CommandResult res;
  json runs = json::array();
  const std::string hash = detail::config_hash_hex(cfg);
  double worst_drift = 0.0, worst_herm = 0.0, worst_eig = 0.0;
  for (bool eps_on : fc.eps_on) {
    const auto map = dynamics::fidelity_map(initials, params, delta, t, eps_on, opts);
    for (auto init : initials) {
      std::vector<Row> rows;
      for (const auto& r : map.records) {
        if (r.initial != init) continue;
        rows.push_back({model::angular_to_mhz(r.delta), r.t, r.fidelity, r.leakage});
      }
      sort_rows(rows);
      const std::string name = "fidelity_" + dynamics::to_string(init) + (eps_on ? "_eps_on" : "_eps_off");
      auto p = params;
      if (!eps_on) p.drive = 0.0;
      write_csv(std::filesystem::path(cfg.out) / (name + ".csv"),
                {{"delta_MHz", "t_us", "fidelity", "leakage"}, rows}, hash,
                {detail::provenance(p, cfg.dim), "initial " + dynamics::to_string(init)});
      res.files.push_back(name + ".csv");

      double min_f = 1.0, min_final = 1.0;
      json cols = json::array();
      for (const auto& c : map.columns) {
        if (c.initial != init) continue;
        min_f = std::min(min_f, c.min_fidelity);
        min_final = std::min(min_final, c.final_fidelity);
        worst_drift = std::max(worst_drift, c.diagnostics.max_trace_drift);
        worst_herm = std::max(worst_herm, c.diagnostics.max_hermiticity_residual);
        worst_eig = std::min(worst_eig, c.diagnostics.min_eigenvalue);
        cols.push_back({{"delta_MHz", model::angular_to_mhz(c.delta)},
                        {"min_fidelity", c.min_fidelity},
                        {"final_fidelity", c.final_fidelity},
                        {"eigenmodes", c.used_eigenmodes}});
      }
      runs.push_back({{"file", name + ".csv"},
                      {"initial", dynamics::to_string(init)},
                      {"eps_on", eps_on},
                      {"min_fidelity", min_f},
                      {"min_final_fidelity", min_final},
                      {"columns", cols}});
      res.checks.push_back(above(name + "_min_fidelity", min_f, fc.min_fidelity_bound));
      res.checks.push_back(above(name + "_final_fidelity", min_final, fc.final_fidelity_bound));
    }
  }
  res.results["runs"] = runs;
  res.results["diagnostics"] = {{"max_trace_drift", worst_drift},
                                {"max_hermiticity_residual", worst_herm},
                                {"min_eigenvalue", worst_eig}};
  res.checks.push_back(below("trace_drift", worst_drift, 1e-8));
  res.checks.push_back(below("hermiticity_residual", worst_herm, 1e-10));
  res.checks.push_back(detail::make_check("min_state_eigenvalue", worst_eig, -1e-8, worst_eig >= -1e-8));
  return res;
}

CommandResult cmd_wigner(const RunConfig& cfg) {
  const auto params = cfg.model.params();
  const double alpha = params.alpha();
  const int dim = cfg.dim;
  ComplexMatrix rho;
  const auto& st = cfg.wigner.state;
  if (st == "cat_plus" || st == "cat_minus") {
    rho = fock::cat_state(alpha, st == "cat_plus" ? fock::Parity::Even : fock::Parity::Odd, dim)
              .projector();
  } else if (st == "coherent") {
    rho = fock::coherent_state(alpha, dim).projector();
  } else {
    rho = liouville::steady_state(liouville::build_liouvillian(params, dim)).matrix();
  }
  const auto xs = cfg.wigner.x.values();
  const auto ps = cfg.wigner.p.values();
  const RealMatrix w = fock::wigner(rho, xs, ps);

  std::vector<Row> rows;
  rows.reserve(xs.size() * ps.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t k = 0; k < ps.size(); ++k) rows.push_back({xs[i], ps[k], w(i, k)});
  }
  sort_rows(rows);
  write_csv(std::filesystem::path(cfg.out) / "wigner.csv", {{"x", "p", "w"}, rows},
            detail::config_hash_hex(cfg), {detail::provenance(params, dim), "state " + st});

  // trapezoidal integral over the grid
  auto weights = [](const std::vector<double>& g) {
    std::vector<double> wt(g.size(), 0.0);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const double h = 0.5 * (g[i + 1] - g[i]);
      wt[i] += h;
      wt[i + 1] += h;
    }
    return wt;
  };
  const auto wx = weights(xs);
  const auto wp = weights(ps);
  double integral = 0.0;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t k = 0; k < ps.size(); ++k) {
      integral += wx[i] * wp[k] * w(i, k);
      max_abs = std::max(max_abs, std::abs(w(i, k)));
    }
  }

  CommandResult res;
  res.files = {"wigner.csv"};
  res.results = {{"state", st}, {"integral", integral}, {"max_abs_w", max_abs}};
  if (xs.size() > 1 && ps.size() > 1) {
    res.checks.push_back(below("normalization_error", std::abs(integral - 1.0), 1e-3));
  }
  return res;
}

CommandResult cmd_steady_state(const RunConfig& cfg) {
  const auto params = cfg.model.params();
  const double alpha = params.alpha();
  const int dim = cfg.dim;
  const auto l = liouville::build_liouvillian(params, dim);
  const auto rho = liouville::steady_state(l);
  const ComplexMatrix& r = rho.matrix();

  const double n_photon = rho.expectation(fock::number_operator(dim)).real();
  const double parity = rho.expectation(fock::parity_operator(dim)).real();
  const auto basis = fock::cat_basis(alpha, dim);
  const auto v = dynamics::project_to_cat(r, basis);
  const double in_subspace = (v(0) + v(3)).real();
  const double residual = l.apply(liouville::vectorize(r)).cwiseAbs().maxCoeff();

  std::vector<Row> rows;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      rows.push_back({static_cast<long long>(i), static_cast<long long>(j), r(i, j).real(),
                      r(i, j).imag()});
    }
  }
  const std::string hash = detail::config_hash_hex(cfg);
  const auto prov = detail::provenance(params, dim);
  write_csv(std::filesystem::path(cfg.out) / "steady_state.csv", {{"i", "j", "re", "im"}, rows},
            hash, {prov});

  CommandResult res;
  res.files = {"steady_state.csv"};
  res.results = {{"photon_number", n_photon},
                 {"alpha_squared", alpha * alpha},
                 {"parity", parity},
                 {"purity", rho.purity()},
                 {"cat_subspace_population", in_subspace},
                 {"residual", residual},
                 {"poisson_tail", fock::poisson_tail(alpha, dim)}};
  res.checks.push_back(below("residual", residual, 1e-8 * std::max(1.0, l.matrix.cwiseAbs().maxCoeff())));

  if (cfg.full_spectrum) {
    const auto spec = liouville::spectrum(l, false);
    std::vector<Row> srows;
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
      srows.push_back({spec.eigenvalues(i).real(), spec.eigenvalues(i).imag(), static_cast<long long>(i)});
    }
    write_csv(std::filesystem::path(cfg.out) / "spectrum_full.csv", {{"re_E", "im_E", "index"}, srows},
              hash, {prov});
    res.files.push_back("spectrum_full.csv");

    // each closed-form eigenvalue against its nearest full-space partner
    const auto reduced = catspace::cardano_eigenvalues(params);
    double worst = 0.0;
    json pairs = json::array();
    for (const auto& e : reduced.E) {
      double best = std::numeric_limits<double>::infinity();
      Complex partner;
      for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
        const double d = std::abs(spec.eigenvalues(i) - e);
        if (d < best) {
          best = d;
          partner = spec.eigenvalues(i);
        }
      }
      const double rel = std::abs(e) > 0.0 ? best / std::abs(e) : best;
      if (std::abs(e) > 0.0) worst = std::max(worst, rel);
      pairs.push_back({{"reduced", {e.real(), e.imag()}}, {"full", {partner.real(), partner.imag()}}, {"rel", rel}});
    }
    res.results["reduced_vs_full"] = pairs;
    res.checks.push_back(below("reduced_vs_full_relative", worst, 1e-3));
  }
  return res;
}

}  // namespace kerrcat::app
