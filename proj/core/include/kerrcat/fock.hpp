#pragma once

#include <span>

#include "kerrcat/linalg.hpp"
#include "kerrcat/model.hpp"

namespace kerrcat::fock {

/// What to do when a coherent-state tail does not fit in the truncation.
enum class TruncationPolicy { Warn, Throw, Ignore };

/// Photon-number tail mass above which a truncation is reported.
inline constexpr double kTailTolerance = 1e-10;

/// Normalized state vector in a truncated Fock space.
class StateVector {
 public:
  explicit StateVector(ComplexVector amplitudes);

  int dim() const { return static_cast<int>(amps_.size()); }
  const ComplexVector& amplitudes() const { return amps_; }
  /// |psi><psi|
  ComplexMatrix projector() const;
  /// Probability mass dropped by the truncation when the state was built.
  double truncated_tail() const { return tail_; }
  void set_truncated_tail(double t) { tail_ = t; }

 private:
  ComplexVector amps_;
  double tail_ = 0.0;
};

enum class Parity { Even, Odd };

ComplexMatrix annihilation(int dim);
ComplexMatrix creation(int dim);
ComplexMatrix number_operator(int dim);
/// diag((-1)^n)
ComplexMatrix parity_operator(int dim);

/// Truncation that keeps the Poisson tail of |alpha> negligible:
/// ceil(alpha^2 + 8 alpha + 10).
int recommended_dim(double alpha);

/// Poisson mass sum_{n >= dim} e^{-a^2} a^{2n} / n!.
double poisson_tail(double alpha, int dim);

StateVector coherent_state(double alpha, int dim,
                           TruncationPolicy policy = TruncationPolicy::Warn);
StateVector cat_state(double alpha, Parity parity, int dim,
                      TruncationPolicy policy = TruncationPolicy::Warn);

/// The even/odd cat pair spanning the qubit subspace, ordered (C+, C-).
struct CatBasis {
  double alpha = 0.0;
  int dim = 0;
  ComplexVector even;
  ComplexVector odd;

  /// dim x 2 matrix with columns (C+, C-).
  ComplexMatrix matrix() const;
};

CatBasis cat_basis(double alpha, int dim, TruncationPolicy policy = TruncationPolicy::Warn);

/// H = Delta a^dag a - K a^dag^2 a^2 + P (a^dag^2 + a^2) + eps (a^dag + a).
ComplexMatrix build_hamiltonian(const model::ModelParams& params, int dim);

/// D(beta) = exp(beta a^dag - conj(beta) a) in the truncated space.
ComplexMatrix displacement(Complex beta, int dim);

/// Wigner function on the tensor grid beta = x + i p. Result is indexed
/// (ix, ip). Displacements are exponentiated in an enlarged space so the
/// truncated block is converged for the requested grid.
RealMatrix wigner(const ComplexMatrix& rho, std::span<const double> x_grid,
                  std::span<const double> p_grid);
RealMatrix wigner(const StateVector& psi, std::span<const double> x_grid,
                  std::span<const double> p_grid);

}  // namespace kerrcat::fock
