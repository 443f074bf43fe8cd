#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace kerrcat {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};

/// Matrix exponential (Pade-13 scaling and squaring).
ComplexMatrix expm(const ComplexMatrix& a);

/// Largest |a_ij - conj(a_ji)|.
double hermiticity_residual(const ComplexMatrix& a);

/// (a + a^H) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// Spectral condition number sigma_max / sigma_min; infinity when singular.
double condition_number(const ComplexMatrix& a);

/// n equally spaced points covering [lo, hi]; n == 1 gives {lo}.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace kerrcat
