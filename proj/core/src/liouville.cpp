#include "kerrcat/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"

namespace kerrcat::liouville {

namespace {

int sqrt_exact(Eigen::Index n) {
  const auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (r * r != n) throw DomainError("devectorize: length " + std::to_string(n) + " is not square");
  return static_cast<int>(r);
}

void order_spectrum(Spectrum& s) {
  const Eigen::Index n = s.eigenvalues.size();
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const ComplexVector& e = s.eigenvalues;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return e(a).real() > e(b).real(); });
  // real parts equal up to roundoff are ties, broken by ascending imaginary part
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(e(i)));
  const double tie = 1e-10 * std::max(scale, 1.0);
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && e(idx[stop - 1]).real() - e(idx[stop]).real() <= tie) ++stop;
    std::stable_sort(idx.begin() + start, idx.begin() + stop,
                     [&](Eigen::Index a, Eigen::Index b) { return e(a).imag() < e(b).imag(); });
    start = stop;
  }

  Spectrum out;
  out.eigenvalues.resize(n);
  if (s.has_vectors()) {
    out.right.resize(n, n);
    out.left.resize(n, n);
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = e(idx[k]);
    if (s.has_vectors()) {
      out.right.col(k) = s.right.col(idx[k]);
      out.left.col(k) = s.left.col(idx[k]);
    }
  }
  s = std::move(out);
}

}  // namespace

ComplexVector vectorize(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols()) throw DomainError("vectorize: matrix must be square");
  const Eigen::Index n = rho.rows();
  ComplexVector v(n * n);
  for (Eigen::Index i = 0; i < n; ++i) v.segment(i * n, n) = rho.row(i).transpose();
  return v;
}

ComplexMatrix devectorize(const ComplexVector& v) {
  const int n = sqrt_exact(v.size());
  ComplexMatrix rho(n, n);
  for (int i = 0; i < n; ++i) rho.row(i) = v.segment(static_cast<Eigen::Index>(i) * n, n).transpose();
  return rho;
}

double LiouvillianMatrix::trace_residual() const {
  const int n = hilbert_dim;
  Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(matrix.cols());
  for (int i = 0; i < n; ++i) acc += matrix.row(static_cast<Eigen::Index>(i) * n + i);
  return acc.cwiseAbs().maxCoeff();
}

LiouvillianMatrix build_liouvillian(const ComplexMatrix& h, const std::vector<ComplexMatrix>& jumps) {
  if (h.rows() != h.cols() || h.rows() == 0) throw DomainError("build_liouvillian: H must be square");
  const Eigen::Index n = h.rows();
  for (const auto& g : jumps) {
    if (g.rows() != n || g.cols() != n) {
      throw DomainError("build_liouvillian: jump operator dimension mismatch");
    }
  }
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  LiouvillianMatrix l;
  l.hilbert_dim = static_cast<int>(n);
  l.matrix = -kI * (Eigen::kroneckerProduct(h, id).eval() -
                    Eigen::kroneckerProduct(id, h.transpose()).eval());
  for (const auto& g : jumps) {
    const ComplexMatrix gdg = g.adjoint() * g;
    l.matrix += Eigen::kroneckerProduct(g, g.conjugate()).eval();
    l.matrix -= 0.5 * Eigen::kroneckerProduct(gdg, id).eval();
    l.matrix -= 0.5 * Eigen::kroneckerProduct(id, gdg.transpose()).eval();
  }
  return l;
}

LiouvillianMatrix build_liouvillian(const model::ModelParams& params, int dim) {
  params.validate();
  const ComplexMatrix h = fock::build_hamiltonian(params, dim);
  std::vector<ComplexMatrix> jumps;
  if (params.kappa > 0.0) jumps.push_back(std::sqrt(params.kappa) * fock::annihilation(dim));
  return build_liouvillian(h, jumps);
}

ComplexMatrix lindblad_rhs(const ComplexMatrix& h, const std::vector<ComplexMatrix>& jumps,
                           const ComplexMatrix& rho) {
  ComplexMatrix out = -kI * (h * rho - rho * h);
  for (const auto& g : jumps) {
    const ComplexMatrix gdg = g.adjoint() * g;
    out += g * rho * g.adjoint() - 0.5 * (gdg * rho + rho * gdg);
  }
  return out;
}

Spectrum spectrum(const ComplexMatrix& l, bool with_vectors) {
  if (l.rows() != l.cols() || l.rows() == 0) throw DomainError("spectrum: matrix must be square");
  if (!l.allFinite()) throw NumericError("spectrum: matrix has non-finite entries");
  const lapack_int n = static_cast<lapack_int>(l.rows());
  ComplexMatrix a = l;
  Spectrum s;
  s.eigenvalues.resize(n);
  const char job = with_vectors ? 'V' : 'N';
  if (with_vectors) {
    s.right.resize(n, n);
    s.left.resize(n, n);
  }
  const lapack_int ld_vec = with_vectors ? n : 1;
  lapack_complex_double dummy{};
  auto lc = [](Complex* p) { return reinterpret_cast<lapack_complex_double*>(p); };
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, job, job, n, lc(a.data()), n, lc(s.eigenvalues.data()),
      with_vectors ? lc(s.left.data()) : &dummy, ld_vec,
      with_vectors ? lc(s.right.data()) : &dummy, ld_vec);
  if (info != 0) {
    std::ostringstream msg;
    msg << "spectrum: zgeev failed with info=" << info << " (n=" << n
        << ", |L|_F=" << l.norm() << ", max|L_ij|=" << l.cwiseAbs().maxCoeff() << ")";
    throw NumericError(msg.str());
  }
  if (with_vectors) {
    for (lapack_int k = 0; k < n; ++k) {
      const Complex overlap = s.left.col(k).dot(s.right.col(k));
      // leave the pair unscaled at an exact defective point
      if (std::abs(overlap) > 0.0) s.left.col(k) /= std::conj(overlap);
    }
  }
  order_spectrum(s);
  return s;
}

DensityMatrix steady_state(const LiouvillianMatrix& l) {
  const int n = l.hilbert_dim;
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  if (l.matrix.rows() != nn || l.matrix.cols() != nn) {
    throw DomainError("steady_state: matrix size does not match hilbert_dim");
  }
  ComplexMatrix a = l.matrix;
  a.row(0).setZero();
  for (int i = 0; i < n; ++i) a(0, static_cast<Eigen::Index>(i) * n + i) = 1.0;
  ComplexVector b = ComplexVector::Zero(nn);
  b(0) = 1.0;

  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const double rcond = lu.rcond();
  // the condition estimate can miss an exactly repeated null vector; a
  // vanishing pivot of U cannot
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = pivots.minCoeff() / pivots.maxCoeff();
  if (!(rcond > 1e-13) || !(pivot_ratio > 1e-13)) {
    std::ostringstream msg;
    msg << "steady_state: null space is not one-dimensional (rcond=" << rcond
        << ", pivot ratio=" << pivot_ratio << ")";
    throw NumericError(msg.str());
  }
  ComplexVector x = lu.solve(b);
  const double scale = std::max(1.0, l.matrix.cwiseAbs().maxCoeff());
  const double residual = (l.matrix * x).norm();
  if (!(residual < 1e-8 * scale)) {
    std::ostringstream msg;
    msg << "steady_state: residual " << residual << " exceeds tolerance";
    throw NumericError(msg.str());
  }
  return DensityMatrix::repaired(devectorize(x));
}

TruncationReport converge_truncation(const model::ModelParams& params, int start_dim, int max_dim,
                                     double tol) {
  if (start_dim < 2 || max_dim < start_dim) throw DomainError("converge_truncation: bad dimensions");
  auto photons = [&](int dim) {
    const DensityMatrix rho = steady_state(build_liouvillian(params, dim));
    return rho.expectation(fock::number_operator(dim)).real();
  };
  TruncationReport r;
  r.dim = start_dim;
  r.photon_number = photons(start_dim);
  r.change = INFINITY;
  while (2 * r.dim <= max_dim) {
    const int next = 2 * r.dim;
    const double n_next = photons(next);
    r.change = std::abs(n_next - r.photon_number);
    r.dim = next;
    r.photon_number = n_next;
    if (r.change < tol) {
      r.converged = true;
      return r;
    }
  }
  return r;
}

}  // namespace kerrcat::liouville
