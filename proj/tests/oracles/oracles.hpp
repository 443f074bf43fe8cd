#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerical routines; everything is written the slow, obvious
// way (explicit loops, long double, brute force).

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using cld = std::complex<long double>;
using Mat = Eigen::MatrixXcd;

/// p = N+/N- from the normalization constants, in long double.
long double p_ratio(long double alpha);
/// p^-j - p^j and p^-j + p^j from p_ratio.
long double pj_minus(long double alpha, int j);
long double pj_plus(long double alpha, int j);

/// Mean photon number of the Poisson distribution truncated to dim levels
/// and renormalized, by explicit summation in long double.
long double truncated_poisson_mean(long double alpha, int dim);

/// Lindblad right-hand side -i[H, rho] + sum_k (L rho L^dag - {L^dag L, rho}/2)
/// with every matrix product written as a triple loop.
Mat lindblad_rhs(const Mat& h, const std::vector<Mat>& jumps, const Mat& rho);

/// Superoperator of lindblad_rhs built column by column from basis matrices,
/// row-stacked.
Mat superoperator(const Mat& h, const std::vector<Mat>& jumps);

/// Characteristic polynomial det(x I - A) = x^n + c[n-1] x^{n-1} + ... + c[0]
/// by the Faddeev-LeVerrier recursion; returns c[0..n] with c[n] = 1.
std::vector<cd> charpoly(const Mat& a);

/// Generator of the cat-qubit block written as a two-level Lindbladian:
/// jump A = [[0, alpha/p], [alpha p, 0]] (rows/cols C+, C-) times sqrt(kappa),
/// Hamiltonian Delta alpha^2 diag(p^2, p^-2) + alpha eps p1+ sigma_x.
Eigen::Matrix4cd two_level_generator(double alpha, double kappa, double eps, double delta);

/// Minimum over permutations of max_k |a_k - b_perm(k)|.
double matched_distance(const std::vector<cd>& a, const std::vector<cd>& b);

/// R1, R2 from three roots by direct expansion in long double.
std::array<long double, 2> resultants(cld e2, cld e3, cld e4);

/// Roots of t^3 - 3 m t - 2 q by the trigonometric / hyperbolic formulas
/// (independent of the Cardano cube-root route).
std::array<cd, 3> depressed_cubic_roots(double q, double m);

/// Winding number of a closed planar curve by summing principal angle
/// differences of consecutive samples (first sample repeated at the end).
double winding_by_angles(const std::vector<std::array<double, 2>>& pts);

/// Composite Simpson weights on a uniform grid with an odd number of points.
std::vector<double> simpson_weights(double lo, double hi, int n);

}  // namespace oracle
