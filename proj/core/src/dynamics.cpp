#include "kerrcat/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "kerrcat/errors.hpp"

namespace kerrcat::dynamics {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// fifth- minus fourth-order weights
constexpr double kE[7] = {71.0 / 57600,      0.0,         -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

void require_grid(const std::vector<double>& t) {
  if (t.empty()) throw DomainError("time grid is empty");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) throw DomainError("time grid has a non-finite value");
    if (i > 0 && t[i] < t[i - 1]) throw DomainError("time grid must be non-decreasing");
  }
}

struct Observer {
  int n = 0;
  Complex trace0;
  ComplexMatrix number;
  ComplexMatrix parity;
  ComplexMatrix cat_projector;  // empty when alpha <= 0

  Observer(int dim, double alpha, Complex tr0) : n(dim), trace0(tr0) {
    number = fock::number_operator(dim);
    parity = fock::parity_operator(dim);
    if (alpha > 0.0) {
      const auto b = fock::cat_basis(alpha, dim, fock::TruncationPolicy::Ignore).matrix();
      cat_projector = b * b.adjoint();
    }
  }

  void record(Trajectory& tr, double t, const ComplexVector& v) const {
    const ComplexMatrix raw = liouville::devectorize(v);
    auto& d = tr.diagnostics;
    d.max_trace_drift = std::max(d.max_trace_drift, std::abs(raw.trace() - trace0));
    d.max_hermiticity_residual = std::max(d.max_hermiticity_residual, hermiticity_residual(raw));
    ComplexMatrix rho = hermitian_part(raw);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    d.min_eigenvalue = tr.states.empty() ? lo : std::min(d.min_eigenvalue, lo);
    tr.times.push_back(t);
    tr.photon_number.push_back((rho * number).trace().real());
    tr.parity.push_back((rho * parity).trace().real());
    tr.subspace_population.push_back(
        cat_projector.size() ? (rho * cat_projector).trace().real() : 0.0);
    tr.states.push_back(std::move(rho));
  }
};

double error_norm(const ComplexVector& err, const ComplexVector& y0, const ComplexVector& y1,
                  double rtol, double atol) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    worst = std::max(worst, std::abs(err(i)) / sc);
  }
  return worst;
}

Trajectory evolve_rk(const ComplexMatrix& rho0, const liouville::LiouvillianMatrix& l,
                     const std::vector<double>& t_grid, double alpha, const EvolveOptions& opts) {
  const int n = l.hilbert_dim;
  Observer obs(n, alpha, rho0.trace());
  Trajectory tr;
  ComplexVector y = liouville::vectorize(rho0);
  obs.record(tr, t_grid[0], y);

  const ComplexMatrix& a = l.matrix;
  ComplexVector k[7];
  k[0] = a * y;
  double t = t_grid[0];
  // initial step from the size of the derivative
  const double d0 = y.cwiseAbs().maxCoeff();
  const double d1 = k[0].cwiseAbs().maxCoeff();
  double h = (d1 > 0.0) ? 0.01 * std::max(d0, opts.atol) / d1 : 1e-3;
  long steps = 0;

  for (std::size_t out = 1; out < t_grid.size(); ++out) {
    const double t_end = t_grid[out];
    while (t < t_end) {
      if (steps >= opts.max_steps) {
        std::ostringstream msg;
        msg << "evolve_full: " << steps << " Runge-Kutta steps reached t=" << t
            << " of " << t_grid.back()
            << "; the problem is stiff, use a smaller dim or the propagator method";
        throw NumericError(msg.str());
      }
      const bool last = t + h >= t_end;
      const double step = last ? t_end - t : h;
      if (step < 1e-14 * std::max(1.0, std::abs(t))) {
        throw NumericError(
            "evolve_full: step size underflow; the problem is stiff, use a smaller dim or the "
            "propagator method");
      }
      for (int s = 1; s < 7; ++s) {
        ComplexVector ys = y;
        for (int j = 0; j < s; ++j) {
          if (kA[s][j] != 0.0) ys += (step * kA[s][j]) * k[j];
        }
        k[s] = a * ys;
      }
      ComplexVector y_new = y;
      for (int j = 0; j < 6; ++j) {
        if (kA[6][j] != 0.0) y_new += (step * kA[6][j]) * k[j];
      }
      // k[6] was evaluated at y_new (FSAL)
      ComplexVector err = ComplexVector::Zero(y.size());
      for (int j = 0; j < 7; ++j) {
        if (kE[j] != 0.0) err += (step * kE[j]) * k[j];
      }
      ++steps;
      const double en = error_norm(err, y, y_new, opts.rtol, opts.atol);
      const double factor =
          en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      if (en <= 1.0) {
        t = last ? t_end : t + step;
        y = std::move(y_new);
        k[0] = k[6];
        if (!last) h = step * factor;
      } else {
        h = step * factor;
      }
    }
    obs.record(tr, t_end, y);
  }
  tr.diagnostics.steps = steps;
  return tr;
}

std::vector<double> distinct_steps(const std::vector<double>& t_grid) {
  std::vector<double> out;
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double dt = t_grid[i] - t_grid[i - 1];
    if (dt == 0.0) continue;
    bool known = false;
    for (double d : out) known = known || std::abs(d - dt) <= 1e-9 * d;
    if (!known) out.push_back(dt);
  }
  return out;
}

std::vector<std::shared_ptr<const Propagator>> build_propagators(
    const liouville::LiouvillianMatrix& l, const std::vector<double>& t_grid, bool sectors) {
  std::vector<std::shared_ptr<const Propagator>> out;
  for (double dt : distinct_steps(t_grid)) {
    out.push_back(std::make_shared<const Propagator>(l, dt, sectors));
  }
  return out;
}

ComplexMatrix initial_state(InitialState s, double alpha, int dim) {
  switch (s) {
    case InitialState::CatPlus:
      return fock::cat_state(alpha, fock::Parity::Even, dim).projector();
    case InitialState::Coherent:
      return fock::coherent_state(alpha, dim).projector();
  }
  throw DomainError("unknown initial state");
}

}  // namespace

bool parity_sectors_decouple(const liouville::LiouvillianMatrix& l) {
  const int n = l.hilbert_dim;
  const Eigen::Index nn = l.matrix.rows();
  for (Eigen::Index c = 0; c < nn; ++c) {
    const int sc = static_cast<int>((c / n + c % n) % 2);
    for (Eigen::Index r = 0; r < nn; ++r) {
      if (static_cast<int>((r / n + r % n) % 2) != sc && l.matrix(r, c) != 0.0) return false;
    }
  }
  return true;
}

Propagator::Propagator(const liouville::LiouvillianMatrix& l, double dt, bool use_sectors)
    : n_(l.hilbert_dim), dt_(dt) {
  if (!std::isfinite(dt) || dt < 0.0) throw DomainError("Propagator: dt must be finite and >= 0");
  sectored_ = use_sectors && parity_sectors_decouple(l);
  if (!sectored_) {
    full_ = expm(l.matrix * dt);
    return;
  }
  const Eigen::Index nn = l.matrix.rows();
  for (Eigen::Index i = 0; i < nn; ++i) index_[(i / n_ + i % n_) % 2].push_back(i);
  for (int s = 0; s < 2; ++s) {
    block_[s] = expm(ComplexMatrix(l.matrix(index_[s], index_[s])) * dt);
  }
}

ComplexVector Propagator::apply(const ComplexVector& v) const {
  if (!sectored_) return full_ * v;
  ComplexVector out(v.size());
  for (int s = 0; s < 2; ++s) {
    const ComplexVector part = v(index_[s]);
    out(index_[s]) = block_[s] * part;
  }
  return out;
}

Trajectory evolve_with_propagators(const ComplexMatrix& rho0,
                                   const std::vector<std::shared_ptr<const Propagator>>& steps,
                                   const std::vector<double>& t_grid, double alpha) {
  require_grid(t_grid);
  if (rho0.rows() != rho0.cols()) throw DomainError("evolve: rho0 must be square");
  const int n = static_cast<int>(rho0.rows());
  Observer obs(n, alpha, rho0.trace());
  Trajectory tr;
  ComplexVector y = liouville::vectorize(rho0);
  obs.record(tr, t_grid[0], y);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double dt = t_grid[i] - t_grid[i - 1];
    if (dt != 0.0) {
      const Propagator* u = nullptr;
      for (const auto& p : steps) {
        if (std::abs(p->dt() - dt) <= 1e-9 * p->dt()) u = p.get();
      }
      if (!u) throw DomainError("evolve: no propagator for step " + std::to_string(dt));
      if (u->hilbert_dim() != n) throw DomainError("evolve: propagator dimension mismatch");
      y = u->apply(y);
      ++tr.diagnostics.steps;
    }
    obs.record(tr, t_grid[i], y);
  }
  return tr;
}

Trajectory evolve_full(const ComplexMatrix& rho0, const liouville::LiouvillianMatrix& l,
                       const std::vector<double>& t_grid, double alpha, const EvolveOptions& opts) {
  require_grid(t_grid);
  if (rho0.rows() != l.hilbert_dim || rho0.cols() != l.hilbert_dim) {
    throw DomainError("evolve_full: rho0 dimension does not match the Liouvillian");
  }
  if (opts.method == FullMethod::RungeKutta) return evolve_rk(rho0, l, t_grid, alpha, opts);
  return evolve_with_propagators(rho0, build_propagators(l, t_grid, opts.use_sectors), t_grid,
                                 alpha);
}

Trajectory evolve_full(const DensityMatrix& rho0, const model::ModelParams& params,
                       const std::vector<double>& t_grid, int dim, const EvolveOptions& opts) {
  const auto l = liouville::build_liouvillian(params, dim);
  return evolve_full(rho0.matrix(), l, t_grid, params.alpha(), opts);
}

ModeDecomposition decompose(const catspace::ReducedLiouvillian& l, const Eigen::Vector4cd& v0) {
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(l, true);
  if (es.info() != Eigen::Success) throw NumericError("decompose: eigensolver failed");
  ModeDecomposition d;
  d.eigenvalues = es.eigenvalues();
  d.modes = es.eigenvectors();
  d.condition = condition_number(ComplexMatrix(d.modes));
  d.coefficients = d.modes.partialPivLu().solve(v0);
  return d;
}

ReducedTrajectory evolve_reduced(const Eigen::Vector4cd& v0, const model::ReducedModel& m,
                                 const std::vector<double>& t_grid, ReducedMethod method) {
  require_grid(t_grid);
  const auto l = catspace::reduced_liouvillian(m);
  ReducedTrajectory out;
  out.times = t_grid;
  ModeDecomposition d;
  bool modes = false;
  if (method != ReducedMethod::Expm) {
    d = decompose(l, v0);
    out.condition = d.condition;
    modes = method == ReducedMethod::Eigenmodes || d.condition < kModeConditionLimit;
  }
  out.used_eigenmodes = modes;
  const ComplexMatrix ld = l;
  for (double t : t_grid) {
    const double tau = t - t_grid[0];
    if (tau == 0.0) {
      out.states.push_back(v0);
      continue;
    }
    if (modes) {
      Eigen::Vector4cd c = d.coefficients;
      for (int i = 0; i < 4; ++i) c(i) *= std::exp(d.eigenvalues(i) * tau);
      out.states.push_back(d.modes * c);
    } else {
      out.states.push_back(expm(ld * tau) * v0);
    }
  }
  return out;
}

Eigen::Vector4cd project_to_cat(const ComplexMatrix& rho, const fock::CatBasis& basis) {
  if (rho.rows() != basis.dim || rho.cols() != basis.dim) {
    throw DomainError("project_to_cat: dimension mismatch");
  }
  const ComplexMatrix b = basis.matrix();
  const Eigen::Matrix2cd r = b.adjoint() * rho * b;
  return {r(0, 0), r(0, 1), r(1, 0), r(1, 1)};
}

Eigen::Vector4cd project_to_cat(const ComplexMatrix& rho, double alpha, int dim) {
  return project_to_cat(rho, fock::cat_basis(alpha, dim));
}

ComplexMatrix embed_from_cat(const Eigen::Vector4cd& v, const fock::CatBasis& basis) {
  Eigen::Matrix2cd r;
  r << v(0), v(1), v(2), v(3);
  const ComplexMatrix b = basis.matrix();
  return b * r * b.adjoint();
}

ComplexMatrix embed_from_cat(const Eigen::Vector4cd& v, double alpha, int dim) {
  return embed_from_cat(v, fock::cat_basis(alpha, dim));
}

catspace::ReducedLiouvillian project_generator(const liouville::LiouvillianMatrix& l,
                                               const fock::CatBasis& basis) {
  if (l.hilbert_dim != basis.dim) throw DomainError("project_generator: dimension mismatch");
  catspace::ReducedLiouvillian out;
  for (int col = 0; col < 4; ++col) {
    Eigen::Vector4cd e = Eigen::Vector4cd::Zero();
    e(col) = 1.0;
    const ComplexVector image = l.apply(liouville::vectorize(embed_from_cat(e, basis)));
    out.col(col) = project_to_cat(liouville::devectorize(image), basis);
  }
  return out;
}

std::string to_string(InitialState s) {
  return s == InitialState::CatPlus ? "catplus" : "coherent";
}

FidelityMap fidelity_map(const std::vector<InitialState>& initials,
                         const model::ModelParams& params, const std::vector<double>& delta_grid,
                         const std::vector<double>& t_grid, bool eps_on,
                         const FidelityMapOptions& opts) {
  params.validate();
  require_grid(t_grid);
  if (initials.empty() || delta_grid.empty()) throw DomainError("fidelity_map: empty grid");
  for (double d : delta_grid) {
    if (!std::isfinite(d)) throw DomainError("fidelity_map: non-finite delta");
  }
  const double alpha = params.alpha();
  const int dim = opts.dim;
  const auto basis = fock::cat_basis(alpha, dim);
  std::vector<ComplexMatrix> rho0;
  std::vector<Eigen::Vector4cd> v0;
  for (auto s : initials) {
    rho0.push_back(initial_state(s, alpha, dim));
    v0.push_back(project_to_cat(rho0.back(), basis));
  }

  struct ColumnResult {
    std::vector<FidelityRecord> records;
    std::vector<FidelityColumn> columns;
  };
  std::vector<ColumnResult> results(delta_grid.size());

  auto run_column = [&](std::size_t j) {
    model::ModelParams pj = params.with_delta(delta_grid[j]);
    if (!eps_on) pj.drive = 0.0;
    const auto l = liouville::build_liouvillian(pj, dim);
    // shared by every initial state of this column
    const auto steps = build_propagators(l, t_grid, opts.evolve.use_sectors);
    const auto md = model::ReducedModel::from(pj);
    ColumnResult& res = results[j];
    for (std::size_t s = 0; s < initials.size(); ++s) {
      const Trajectory full = opts.evolve.method == FullMethod::Propagator
                                  ? evolve_with_propagators(rho0[s], steps, t_grid, alpha)
                                  : evolve_full(rho0[s], l, t_grid, alpha, opts.evolve);
      const ReducedTrajectory red = evolve_reduced(v0[s], md, t_grid);
      FidelityColumn col;
      col.initial = initials[s];
      col.eps_on = eps_on;
      col.delta = delta_grid[j];
      col.diagnostics = full.diagnostics;
      col.used_eigenmodes = red.used_eigenmodes;
      col.min_fidelity = 1.0;
      for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const ComplexMatrix sigma = hermitian_part(embed_from_cat(red.states[k], basis));
        FidelityRecord r;
        r.initial = initials[s];
        r.eps_on = eps_on;
        r.delta = delta_grid[j];
        r.t = t_grid[k];
        r.fidelity = fidelity(full.states[k], sigma);
        r.leakage = 1.0 - full.subspace_population[k];
        col.min_fidelity = std::min(col.min_fidelity, r.fidelity);
        col.final_fidelity = r.fidelity;
        res.records.push_back(r);
      }
      res.columns.push_back(col);
    }
  };

  const int workers = std::max(1, std::min<int>(opts.workers, static_cast<int>(delta_grid.size())));
  if (workers == 1) {
    for (std::size_t j = 0; j < delta_grid.size(); ++j) run_column(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t j = next++; j < delta_grid.size(); j = next++) run_column(j);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  FidelityMap map;
  for (auto& r : results) {
    map.records.insert(map.records.end(), r.records.begin(), r.records.end());
    map.columns.insert(map.columns.end(), r.columns.begin(), r.columns.end());
  }
  auto key = [](const auto& r) {
    return std::make_tuple(static_cast<int>(r.initial), r.eps_on, r.delta);
  };
  std::stable_sort(map.records.begin(), map.records.end(), [&](const auto& a, const auto& b) {
    return std::tuple_cat(key(a), std::make_tuple(a.t)) < std::tuple_cat(key(b), std::make_tuple(b.t));
  });
  std::stable_sort(map.columns.begin(), map.columns.end(),
                   [&](const auto& a, const auto& b) { return key(a) < key(b); });
  return map;
}

RelaxationCheck check_relaxation(const Trajectory& traj, const ComplexMatrix& reference,
                                 double transient_time, double tol) {
  RelaxationCheck out;
  double prev = INFINITY;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] < transient_time) continue;
    const double d = trace_distance(traj.states[k], reference);
    if (d > prev + tol && d - prev > out.worst_increase) {
      out.monotone = false;
      out.worst_increase = d - prev;
      out.at_time = traj.times[k];
    }
    prev = d;
  }
  return out;
}

}  // namespace kerrcat::dynamics
