#include "kerrcat/density_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "kerrcat/errors.hpp"

namespace kerrcat {

namespace {

constexpr double kClipWarn = -1e-8;
constexpr double kClipError = -1e-6;

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DomainError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
}

// Hermitian square root with negative eigenvalues clipped to zero.
ComplexMatrix clipped_sqrt(const ComplexMatrix& h, const char* what) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
  if (es.info() != Eigen::Success) throw NumericError(std::string(what) + ": eigensolver failed");
  Eigen::VectorXd ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  if (lo < kClipError) {
    std::ostringstream msg;
    msg << what << ": eigenvalue " << lo << " below " << kClipError << ", not a valid state";
    throw DomainError(msg.str());
  }
  if (lo < kClipWarn) {
    std::ostringstream msg;
    msg << what << ": clipping eigenvalue " << lo << " to zero";
    warn(msg.str());
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

bool DensityDiagnostics::ok(const DensityTolerances& tol) const {
  return hermiticity_residual <= tol.hermiticity && trace_error <= tol.trace &&
         min_eigenvalue >= tol.min_eigenvalue;
}

DensityDiagnostics diagnose_density(const ComplexMatrix& rho) {
  require_square(rho, "diagnose_density");
  DensityDiagnostics d;
  d.hermiticity_residual = hermiticity_residual(rho);
  d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(rho), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("diagnose_density: eigensolver failed");
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

DensityMatrix::DensityMatrix(ComplexMatrix rho, const DensityTolerances& tol)
    : rho_(std::move(rho)), diag_(diagnose_density(rho_)) {
  if (!diag_.ok(tol)) {
    std::ostringstream msg;
    msg << "invalid density matrix: hermiticity " << diag_.hermiticity_residual << ", trace error "
        << diag_.trace_error << ", min eigenvalue " << diag_.min_eigenvalue;
    throw DomainError(msg.str());
  }
}

DensityMatrix DensityMatrix::repaired(const ComplexMatrix& rho, const DensityTolerances& tol) {
  require_square(rho, "DensityMatrix::repaired");
  ComplexMatrix h = hermitian_part(rho);
  const double tr = h.trace().real();
  if (!(std::abs(tr) > 0.0)) throw DomainError("DensityMatrix::repaired: zero trace");
  h /= tr;
  return DensityMatrix(std::move(h), tol);
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw DomainError("DensityMatrix::pure: zero vector");
  const ComplexVector u = psi / n;
  return DensityMatrix(u * u.adjoint());
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

Complex DensityMatrix::expectation(const ComplexMatrix& op) const {
  if (op.rows() != rho_.rows() || op.cols() != rho_.cols()) {
    throw DomainError("expectation: operator dimension mismatch");
  }
  return (rho_ * op).trace();
}

double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  require_square(rho, "fidelity");
  require_square(sigma, "fidelity");
  if (rho.rows() != sigma.rows()) throw DomainError("fidelity: dimension mismatch");
  const ComplexMatrix s = clipped_sqrt(rho, "fidelity(rho)");
  // validates sigma with the same clipping rule
  (void)clipped_sqrt(sigma, "fidelity(sigma)");
  const ComplexMatrix inner = hermitian_part(s * sigma * s);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(inner, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("fidelity: eigensolver failed");
  // eigenvalues at the roundoff floor would contribute sqrt(eps) each
  const auto& ev = es.eigenvalues();
  const double floor = static_cast<double>(ev.size()) * std::numeric_limits<double>::epsilon() *
                       ev.cwiseAbs().maxCoeff();
  double tr = 0.0;
  for (double v : ev) tr += v > floor ? std::sqrt(v) : 0.0;
  return std::clamp(tr * tr, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return fidelity(rho.matrix(), sigma.matrix());
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DomainError("trace_distance: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a - b), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace kerrcat
