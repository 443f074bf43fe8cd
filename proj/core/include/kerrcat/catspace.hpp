#pragma once

#include <array>

#include <Eigen/Dense>

#include "kerrcat/linalg.hpp"
#include "kerrcat/model.hpp"

namespace kerrcat::catspace {

/// Generator of the cat-qubit block in the basis (rho++, rho+-, rho-+, rho--),
/// row-stacked like the full-space Liouvillian.
using ReducedLiouvillian = Eigen::Matrix4cd;

ReducedLiouvillian reduced_liouvillian(const model::ReducedModel& m);
inline ReducedLiouvillian reduced_liouvillian(const model::ModelParams& p) {
  return reduced_liouvillian(model::ReducedModel::from(p));
}

/// Coefficients of the depressed cubic t^3 - 3 m t - 2 q whose roots are
/// E - shift for the three non-zero eigenvalues E.
struct CubicInvariants {
  double shift = 0.0;  ///< -(2/3) kappa alpha^2 p2+
  double trace = 0.0;  ///< -2 kappa alpha^2 p2+, sum of the non-zero eigenvalues
  double q = 0.0;
  double m = 0.0;
  /// sums of |terms| entering q and m; values below their rounding floor are
  /// set to exactly zero
  double q_magnitude = 0.0;
  double m_magnitude = 0.0;
  double rate_scale = 0.0;  ///< kappa alpha^2
  Complex eta_plus{};
  Complex eta_minus{};

  /// q^2 - m^3
  double discriminant() const { return q * q - m * m * m; }
  /// True when the discriminant is zero up to roundoff.
  bool degenerate() const;
};

CubicInvariants cubic_invariants(const model::ReducedModel& m);

/// Fills the cube roots eta+/- of a cubic given directly by (shift, q, m).
CubicInvariants invariants_from_qm(double shift, double q, double m, double rate_scale = 1.0);
inline CubicInvariants cubic_invariants(const model::ModelParams& p) {
  return cubic_invariants(model::ReducedModel::from(p));
}

/// q and m as affine functions of v = Delta^2 at fixed alpha, kappa, eps:
/// q = q0 + q1 v, m = m0 + m1 v.
struct InvariantLines {
  double q0 = 0.0, q1 = 0.0, m0 = 0.0, m1 = 0.0;

  /// q(v)^2 - m(v)^3 expanded as c[0] + c[1] v + c[2] v^2 + c[3] v^3
  std::array<double, 4> discriminant_coefficients() const;
};

InvariantLines invariant_lines(const model::ReducedModel& m);

/// Closed-form spectrum. E1 = 0. With one real root, E2 is that root and
/// Im E3 > 0 > Im E4; with three real roots they are sorted by descending
/// real part.
struct ReducedSpectrum {
  std::array<Complex, 4> E{};
  bool all_real = false;
  bool degenerate = false;

  std::array<Complex, 3> nonzero() const { return {E[1], E[2], E[3]}; }
};

ReducedSpectrum cardano_eigenvalues(const CubicInvariants& inv);
inline ReducedSpectrum cardano_eigenvalues(const model::ReducedModel& m) {
  return cardano_eigenvalues(cubic_invariants(m));
}
inline ReducedSpectrum cardano_eigenvalues(const model::ModelParams& p) {
  return cardano_eigenvalues(cubic_invariants(p));
}

/// Dense eigensolve of the 4x4 generator, unsorted.
std::array<Complex, 4> numeric_eigenvalues(const ReducedLiouvillian& l);

}  // namespace kerrcat::catspace
