#include "kerrcat/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kerrcat/errors.hpp"

namespace kerrcat::fock {

namespace {

void require_dim(int dim, int min_dim = 2) {
  if (dim < min_dim) {
    throw DomainError("Fock dimension must be >= " + std::to_string(min_dim) + ", got " +
                      std::to_string(dim));
  }
}

// e^{-a^2} a^{2n} / n!
double poisson_weight(double alpha, int n) {
  if (alpha == 0.0) return n == 0 ? 1.0 : 0.0;
  const double a2 = alpha * alpha;
  return std::exp(-a2 + 2.0 * n * std::log(std::abs(alpha)) - std::lgamma(n + 1.0));
}

void report_tail(double tail, double alpha, int dim, TruncationPolicy policy) {
  if (policy == TruncationPolicy::Ignore || !(tail > kTailTolerance)) return;
  std::ostringstream msg;
  msg << "Fock truncation dim=" << dim << " drops probability " << tail << " of alpha=" << alpha
      << " (recommended dim " << recommended_dim(alpha) << ")";
  if (policy == TruncationPolicy::Throw) throw DomainError(msg.str());
  warn(msg.str());
}

// amplitudes alpha^n / sqrt(n!) e^{-|alpha|^2/2}, no renormalization
ComplexVector raw_coherent(double alpha, int dim) {
  ComplexVector c(dim);
  c(0) = std::exp(-0.5 * alpha * alpha);
  for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * (alpha / std::sqrt(static_cast<double>(n)));
  return c;
}

bool is_uniform(std::span<const double> g) {
  if (g.size() < 3) return g.size() == 2;
  const double h = g[1] - g[0];
  if (h == 0.0) return false;
  for (std::size_t i = 2; i < g.size(); ++i) {
    if (std::abs((g[i] - g[i - 1]) - h) > 1e-9 * std::abs(h)) return false;
  }
  return true;
}

// rows D(2 x_j)[0:n, :] in the padded space, one block per grid point
std::vector<ComplexMatrix> displacement_rows(const ComplexMatrix& gen, std::span<const double> grid,
                                             int n) {
  std::vector<ComplexMatrix> out;
  out.reserve(grid.size());
  if (is_uniform(grid)) {
    const ComplexMatrix start = expm(2.0 * grid[0] * gen);
    const ComplexMatrix step = expm(2.0 * (grid[1] - grid[0]) * gen);
    ComplexMatrix rows = start.topRows(n);
    out.push_back(rows);
    for (std::size_t j = 1; j < grid.size(); ++j) {
      rows = rows * step;
      out.push_back(rows);
    }
  } else {
    for (double x : grid) out.push_back(expm(2.0 * x * gen).topRows(n));
  }
  return out;
}

}  // namespace

StateVector::StateVector(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 1) throw DomainError("empty state vector");
  if (!amps_.allFinite()) throw DomainError("state vector has non-finite amplitudes");
  const double norm = amps_.norm();
  if (norm == 0.0) throw DomainError("state vector has zero norm");
  amps_ /= norm;
}

ComplexMatrix StateVector::projector() const { return amps_ * amps_.adjoint(); }

ComplexMatrix annihilation(int dim) {
  require_dim(dim);
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

ComplexMatrix creation(int dim) { return annihilation(dim).adjoint(); }

ComplexMatrix number_operator(int dim) {
  require_dim(dim);
  ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

ComplexMatrix parity_operator(int dim) {
  require_dim(dim, 1);
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

int recommended_dim(double alpha) {
  const double a = std::abs(alpha);
  return static_cast<int>(std::ceil(a * a + 8.0 * a + 10.0));
}

double poisson_tail(double alpha, int dim) {
  if (dim <= 0) return 1.0;
  const double a2 = alpha * alpha;
  // sum upward from dim until terms are negligible past the Poisson peak
  double tail = 0.0;
  const int n_peak = static_cast<int>(a2);
  for (int n = dim;; ++n) {
    const double w = poisson_weight(alpha, n);
    tail += w;
    if (n > n_peak && w < 1e-18 * std::max(tail, 1e-300)) break;
    if (n > dim + 10000) break;
  }
  return tail;
}

StateVector coherent_state(double alpha, int dim, TruncationPolicy policy) {
  require_dim(dim, 1);
  if (!std::isfinite(alpha)) throw DomainError("coherent_state: alpha must be finite");
  report_tail(poisson_tail(alpha, dim), alpha, dim, policy);
  StateVector psi(raw_coherent(alpha, dim));
  psi.set_truncated_tail(poisson_tail(alpha, dim));
  return psi;
}

StateVector cat_state(double alpha, Parity parity, int dim, TruncationPolicy policy) {
  require_dim(dim, 1);
  if (!std::isfinite(alpha) || alpha == 0.0) {
    throw DomainError("cat_state: alpha must be finite and non-zero");
  }
  const int keep = parity == Parity::Even ? 0 : 1;
  ComplexVector c = raw_coherent(alpha, dim);
  for (int n = 0; n < dim; ++n) {
    if (n % 2 != keep) c(n) = 0.0;
  }
  // infinite-space norm of the parity projection is (1 +/- e^{-2a^2}) / 2
  const double sign = parity == Parity::Even ? 1.0 : -1.0;
  const double full = 0.5 * (1.0 + sign * std::exp(-2.0 * alpha * alpha));
  const double kept = c.squaredNorm();
  const double tail = std::max(0.0, (full - kept) / full);
  report_tail(tail, alpha, dim, policy);
  StateVector psi(std::move(c));
  psi.set_truncated_tail(tail);
  return psi;
}

ComplexMatrix CatBasis::matrix() const {
  ComplexMatrix b(dim, 2);
  b.col(0) = even;
  b.col(1) = odd;
  return b;
}

CatBasis cat_basis(double alpha, int dim, TruncationPolicy policy) {
  CatBasis basis;
  basis.alpha = alpha;
  basis.dim = dim;
  basis.even = cat_state(alpha, Parity::Even, dim, policy).amplitudes();
  basis.odd = cat_state(alpha, Parity::Odd, dim, policy).amplitudes();
  return basis;
}

ComplexMatrix build_hamiltonian(const model::ModelParams& params, int dim) {
  require_dim(dim);
  for (double v : {params.delta, params.kerr, params.two_photon, params.drive}) {
    if (!std::isfinite(v)) throw DomainError("build_hamiltonian: non-finite parameter");
  }
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    const double nn = n;
    h(n, n) = params.delta * nn - params.kerr * nn * (nn - 1.0);
    if (n + 1 < dim) {
      const double v = params.drive * std::sqrt(nn + 1.0);
      h(n + 1, n) = v;
      h(n, n + 1) = v;
    }
    if (n + 2 < dim) {
      const double v = params.two_photon * std::sqrt((nn + 1.0) * (nn + 2.0));
      h(n + 2, n) = v;
      h(n, n + 2) = v;
    }
  }
  return h;
}

ComplexMatrix displacement(Complex beta, int dim) {
  require_dim(dim);
  const ComplexMatrix a = annihilation(dim);
  return expm(beta * a.adjoint() - std::conj(beta) * a);
}

RealMatrix wigner(const ComplexMatrix& rho, std::span<const double> x_grid,
                  std::span<const double> p_grid) {
  if (rho.rows() != rho.cols() || rho.rows() < 1) throw DomainError("wigner: rho must be square");
  if (x_grid.empty() || p_grid.empty()) throw DomainError("wigner: empty grid");
  for (double v : x_grid)
    if (!std::isfinite(v)) throw DomainError("wigner: non-finite grid value");
  for (double v : p_grid)
    if (!std::isfinite(v)) throw DomainError("wigner: non-finite grid value");

  const int n = static_cast<int>(rho.rows());
  const double edge = n >= 2 ? std::abs(rho(n - 1, n - 1)) + std::abs(rho(n - 2, n - 2))
                             : std::abs(rho(0, 0));
  if (n >= 2 && edge > kTailTolerance) {
    std::ostringstream msg;
    msg << "wigner: density matrix has population " << edge
        << " on the top Fock levels; truncation may be unconverged";
    warn(msg.str());
  }

  double reach = 0.0;
  for (double v : x_grid) reach = std::max(reach, std::abs(v));
  for (double v : p_grid) reach = std::max(reach, std::abs(v));
  // rows of D(2 beta) for n < dim stay inside ~(2|beta| + sqrt(dim))^2 photons
  const double spread = 2.0 * reach + std::sqrt(static_cast<double>(n)) + 6.0;
  const int padded = n + static_cast<int>(std::ceil(spread * spread));

  const ComplexMatrix a = annihilation(std::max(padded, 2));
  const ComplexMatrix x_gen = a.adjoint() - a;                // D(x) = exp(x x_gen)
  const ComplexMatrix p_gen = kI * (a.adjoint() + a);         // D(ip) = exp(p p_gen)

  // R_j = rho D(2 x_j)[0:n, :]
  std::vector<ComplexMatrix> x_rows = displacement_rows(x_gen, x_grid, n);
  for (auto& r : x_rows) r = rho * r;
  // C_k = D(2 i p_k)[:, 0:n] = (D(-2 i p_k)[0:n, :])^H
  std::vector<double> neg_p(p_grid.begin(), p_grid.end());
  for (double& v : neg_p) v = -v;
  std::vector<ComplexMatrix> p_cols = displacement_rows(p_gen, neg_p, n);
  for (auto& c : p_cols) c = c.adjoint().eval();

  RealMatrix w(x_grid.size(), p_grid.size());
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    for (std::size_t k = 0; k < p_grid.size(); ++k) {
      // Tr[rho D(2 beta) Pi] with D(2 beta) = e^{4 i x p} D(2x) D(2ip)
      Complex acc = 0.0;
      for (int m = 0; m < n; ++m) {
        const Complex d = x_rows[j].row(m).transpose().cwiseProduct(p_cols[k].col(m)).sum();
        acc += (m % 2 == 0) ? d : -d;
      }
      const Complex phase = std::exp(kI * (4.0 * x_grid[j] * p_grid[k]));
      w(j, k) = (2.0 / std::numbers::pi) * (phase * acc).real();
    }
  }
  return w;
}

RealMatrix wigner(const StateVector& psi, std::span<const double> x_grid,
                  std::span<const double> p_grid) {
  return wigner(psi.projector(), x_grid, p_grid);
}

}  // namespace kerrcat::fock
