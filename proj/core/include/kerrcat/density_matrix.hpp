#pragma once

#include "kerrcat/linalg.hpp"

namespace kerrcat {

/// Tolerances a physical density matrix must meet.
struct DensityTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-8;
  double min_eigenvalue = -1e-8;
};

/// Measured deviations of a matrix from a physical state.
struct DensityDiagnostics {
  double hermiticity_residual = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;

  bool ok(const DensityTolerances& tol = {}) const;
};

DensityDiagnostics diagnose_density(const ComplexMatrix& rho);

/// Square complex matrix checked to be Hermitian, unit trace and PSD.
class DensityMatrix {
 public:
  /// Throws DomainError when the checks fail.
  explicit DensityMatrix(ComplexMatrix rho, const DensityTolerances& tol = {});

  /// Hermitizes and trace-normalizes before checking.
  static DensityMatrix repaired(const ComplexMatrix& rho, const DensityTolerances& tol = {});
  static DensityMatrix pure(const ComplexVector& psi);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const ComplexMatrix& matrix() const { return rho_; }
  const DensityDiagnostics& diagnostics() const { return diag_; }

  double purity() const;
  /// Tr(rho O)
  Complex expectation(const ComplexMatrix& op) const;

 private:
  ComplexMatrix rho_;
  DensityDiagnostics diag_;
};

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. Eigenvalues in
/// [-1e-6, 0) are clipped to zero with a warning when below -1e-8; anything
/// lower is rejected.
double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Trace norm of a Hermitian difference, sum |lambda_i|.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace kerrcat
