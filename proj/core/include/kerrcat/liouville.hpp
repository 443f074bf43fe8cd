#pragma once

#include <vector>

#include "kerrcat/density_matrix.hpp"
#include "kerrcat/linalg.hpp"
#include "kerrcat/model.hpp"

namespace kerrcat::liouville {

/// Row-stacking: vec[i*N + j] = rho(i, j).
ComplexVector vectorize(const ComplexMatrix& rho);
ComplexMatrix devectorize(const ComplexVector& v);

/// Dense Liouvillian acting on row-stacked density matrices.
struct LiouvillianMatrix {
  int hilbert_dim = 0;  ///< N; the matrix is N^2 x N^2
  ComplexMatrix matrix;

  ComplexVector apply(const ComplexVector& v) const { return matrix * v; }
  /// max_j |sum_i L(ii, j)|, zero for a trace-preserving generator
  double trace_residual() const;
};

/// L = -i(H x I - I x H^T) + sum_k [G x G* - (G^H G x I)/2 - (I x G^T G*)/2].
LiouvillianMatrix build_liouvillian(const ComplexMatrix& h, const std::vector<ComplexMatrix>& jumps);
/// Kerr resonator with the single loss channel sqrt(kappa) a.
LiouvillianMatrix build_liouvillian(const model::ModelParams& params, int dim);

/// Right-hand side of the master equation evaluated with operator products.
ComplexMatrix lindblad_rhs(const ComplexMatrix& h, const std::vector<ComplexMatrix>& jumps,
                           const ComplexMatrix& rho);

/// Eigendecomposition ordered by descending real part, then ascending
/// imaginary part. Left vectors are scaled so left.col(i)^H right.col(i) = 1.
struct Spectrum {
  ComplexVector eigenvalues;
  ComplexMatrix right;  ///< empty unless vectors were requested
  ComplexMatrix left;

  bool has_vectors() const { return right.size() > 0; }
};

Spectrum spectrum(const ComplexMatrix& l, bool with_vectors = true);
inline Spectrum spectrum(const LiouvillianMatrix& l, bool with_vectors = true) {
  return spectrum(l.matrix, with_vectors);
}

/// Null vector of L as a Hermitian unit-trace density matrix. Solves L x = 0
/// with the trace constraint replacing one row; throws NumericError when the
/// null space is not one-dimensional or the residual check fails.
DensityMatrix steady_state(const LiouvillianMatrix& l);

struct TruncationReport {
  int dim = 0;
  double photon_number = 0.0;
  double change = 0.0;  ///< |n(dim) - n(dim/2)|
  bool converged = false;
};

/// Doubles the Fock dimension from start_dim until the steady-state photon
/// number changes by less than tol, or max_dim would be exceeded.
TruncationReport converge_truncation(const model::ModelParams& params, int start_dim,
                                     int max_dim = 64, double tol = 1e-8);

}  // namespace kerrcat::liouville
