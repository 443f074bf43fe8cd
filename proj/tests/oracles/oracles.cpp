#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

long double p_ratio(long double alpha) {
  const long double e = std::exp(-2.0L * alpha * alpha);
  const long double n_plus = 1.0L / std::sqrt(2.0L * (1.0L + e));
  const long double n_minus = 1.0L / std::sqrt(2.0L * (1.0L - e));
  return n_plus / n_minus;
}

long double pj_minus(long double alpha, int j) {
  const long double p = p_ratio(alpha);
  return std::pow(p, -j) - std::pow(p, j);
}

long double pj_plus(long double alpha, int j) {
  const long double p = p_ratio(alpha);
  return std::pow(p, -j) + std::pow(p, j);
}

long double truncated_poisson_mean(long double alpha, int dim) {
  long double w = 1.0L, sum = 0.0L, moment = 0.0L;
  const long double a2 = alpha * alpha;
  for (int n = 0; n < dim; ++n) {
    if (n > 0) w *= a2 / n;
    sum += w;
    moment += n * w;
  }
  return moment / sum;
}

namespace {

Mat mul(const Mat& a, const Mat& b) {
  Mat c = Mat::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      cd s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

Mat dagger(const Mat& a) {
  Mat d(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) d(j, i) = std::conj(a(i, j));
  return d;
}

}  // namespace

Mat lindblad_rhs(const Mat& h, const std::vector<Mat>& jumps, const Mat& rho) {
  const cd i(0.0, 1.0);
  Mat out = -i * (mul(h, rho) - mul(rho, h));
  for (const auto& l : jumps) {
    const Mat ld = dagger(l);
    const Mat ldl = mul(ld, l);
    out += mul(mul(l, rho), ld) - 0.5 * (mul(ldl, rho) + mul(rho, ldl));
  }
  return out;
}

Mat superoperator(const Mat& h, const std::vector<Mat>& jumps) {
  const Eigen::Index n = h.rows();
  Mat s(n * n, n * n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      Mat e = Mat::Zero(n, n);
      e(a, b) = 1.0;
      const Mat r = lindblad_rhs(h, jumps, e);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) s(i * n + j, a * n + b) = r(i, j);
    }
  return s;
}

std::vector<cd> charpoly(const Mat& a) {
  const Eigen::Index n = a.rows();
  using M = std::vector<std::vector<cld>>;
  M am(n, std::vector<cld>(n)), mk(n, std::vector<cld>(n, 0.0L));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) am[i][j] = cld(a(i, j).real(), a(i, j).imag());
  std::vector<cld> c(n + 1, 0.0L);
  c[n] = 1.0L;
  for (Eigen::Index k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{n-k+1} I
    M next(n, std::vector<cld>(n, 0.0L));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        cld s = 0.0L;
        for (Eigen::Index l = 0; l < n; ++l) s += am[i][l] * mk[l][j];
        next[i][j] = s + (i == j ? c[n - k + 1] : cld(0.0L));
      }
    mk = next;
    cld tr = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index l = 0; l < n; ++l) tr += am[i][l] * mk[l][i];
    c[n - k] = -tr / static_cast<long double>(k);
  }
  std::vector<cd> out(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    out[i] = cd(static_cast<double>(c[i].real()), static_cast<double>(c[i].imag()));
  }
  return out;
}

Eigen::Matrix4cd two_level_generator(double alpha, double kappa, double eps, double delta) {
  const double p = static_cast<double>(p_ratio(alpha));
  Mat h = Mat::Zero(2, 2);
  h(0, 0) = delta * alpha * alpha * p * p;
  h(1, 1) = delta * alpha * alpha / (p * p);
  h(0, 1) = h(1, 0) = alpha * eps * (p + 1.0 / p);
  Mat a = Mat::Zero(2, 2);
  a(0, 1) = alpha / p;
  a(1, 0) = alpha * p;
  return superoperator(h, {std::sqrt(kappa) * a});
}

double matched_distance(const std::vector<cd>& a, const std::vector<cd>& b) {
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[perm[k]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::array<long double, 2> resultants(cld e2, cld e3, cld e4) {
  const cld d23 = e2 - e3, d24 = e2 - e4, d34 = e3 - e4;
  const cld r1 = -(d23 * d23) * (d24 * d24) * (d34 * d34);
  const cld r2 = -8.0L * (e2 + e3 - 2.0L * e4) * (e2 + e4 - 2.0L * e3) * (e3 + e4 - 2.0L * e2);
  return {r1.real(), r2.real()};
}

std::array<cd, 3> depressed_cubic_roots(double q, double m) {
  const double pi = std::acos(-1.0);
  const double disc = q * q - m * m * m;
  if (disc <= 0.0 && m > 0.0) {
    const double s = std::sqrt(m);
    const double c = std::clamp(q / (m * s), -1.0, 1.0);
    const double theta = std::acos(c);
    return {cd(2 * s * std::cos(theta / 3)), cd(2 * s * std::cos(theta / 3 - 2 * pi / 3)),
            cd(2 * s * std::cos(theta / 3 + 2 * pi / 3))};
  }
  double r;
  if (m > 0.0) {
    const double s = std::sqrt(m);
    r = std::copysign(2 * s * std::cosh(std::acosh(std::abs(q) / (m * s)) / 3), q);
  } else if (m < 0.0) {
    const double s = std::sqrt(-m);
    r = 2 * s * std::sinh(std::asinh(q / (s * s * s)) / 3);
  } else {
    r = std::cbrt(2 * q);
  }
  // t^3 - 3 m t - 2 q = (t - r)(t^2 + r t + r^2 - 3 m)
  const cd root = std::sqrt(cd(12 * m - 3 * r * r));
  return {cd(r), (-r + root) / 2.0, (-r - root) / 2.0};
}

double winding_by_angles(const std::vector<std::array<double, 2>>& pts) {
  const double pi = std::acos(-1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double d = std::atan2(pts[i + 1][1], pts[i + 1][0]) - std::atan2(pts[i][1], pts[i][0]);
    while (d > pi) d -= 2 * pi;
    while (d < -pi) d += 2 * pi;
    total += d;
  }
  return total / (2 * pi);
}

std::vector<double> simpson_weights(double lo, double hi, int n) {
  const double h = (hi - lo) / (n - 1);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
  for (double& x : w) x *= h / 3.0;
  return w;
}

}  // namespace oracle
