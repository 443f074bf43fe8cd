#include "kerrcat/catspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kerrcat/errors.hpp"

namespace kerrcat::catspace {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// rounding floor multiplier for the invariant sums (a dozen terms)
constexpr double kSnap = 32.0;

double snap(double v, double magnitude) {
  return std::abs(v) <= kSnap * kEps * magnitude ? 0.0 : v;
}

// eta+ is the cube root of the larger of q +/- sqrt(disc); eta- follows from
// eta+ eta- = m. The root multiset does not depend on which sign is taken.
void fill_roots(CubicInvariants& inv) {
  const Complex s = std::sqrt(Complex(inv.discriminant(), 0.0));
  const Complex w1 = inv.q + s, w2 = inv.q - s;
  const Complex w = std::abs(w1) >= std::abs(w2) ? w1 : w2;
  inv.eta_plus = std::pow(w, 1.0 / 3.0);
  if (std::abs(inv.eta_plus) > 0.0) {
    inv.eta_minus = inv.m / inv.eta_plus;
  } else {
    inv.eta_minus = std::pow(w2, 1.0 / 3.0);
  }
}

}  // namespace

ReducedLiouvillian reduced_liouvillian(const model::ReducedModel& m) {
  const auto c = model::subspace_constants(m.alpha);
  const double a2 = m.alpha * m.alpha;
  const double k = m.kappa;
  const Complex drive = kI * (m.alpha * m.drive * c.pj_plus[1]);
  const Complex coh = a2 * Complex(-0.5 * k * c.pj_plus[2], m.delta * c.pj_minus[2]);

  ReducedLiouvillian l;
  l << -a2 * k * c.p_squared, drive, -drive, a2 * k / c.p_squared,
      drive, coh, a2 * k, -drive,
      -drive, a2 * k, std::conj(coh), drive,
      a2 * k * c.p_squared, -drive, drive, -a2 * k / c.p_squared;
  return l;
}

bool CubicInvariants::degenerate() const {
  const double s = rate_scale * rate_scale * rate_scale;
  const double scale = std::max({s * s, q * q, std::abs(m * m * m)});
  if (scale == 0.0) return true;
  return std::abs(discriminant()) < 1e-14 * scale;
}

CubicInvariants cubic_invariants(const model::ReducedModel& md) {
  if (!std::isfinite(md.kappa) || md.kappa < 0.0 || !std::isfinite(md.drive) ||
      !std::isfinite(md.delta)) {
    throw DomainError("cubic_invariants: invalid kappa, drive or delta");
  }
  const auto c = model::subspace_constants(md.alpha);
  const double a2 = md.alpha * md.alpha;
  const double a4 = a2 * a2;
  const double k = md.kappa, k2 = k * k;
  const double e2 = md.drive * md.drive;
  const double d2 = md.delta * md.delta;
  const double p2 = c.pj_plus[2], p4 = c.pj_plus[4], p6 = c.pj_plus[6];

  CubicInvariants inv;
  inv.rate_scale = k * a2;
  inv.trace = -2.0 * k * a2 * p2;
  inv.shift = inv.trace / 3.0;

  // q = kappa a^4/216 [-a^2 (36 D^2 + k^2) p6+ + 72 e^2 p4+
  //                    + (36 D^2 a^2 + 576 e^2 + 33 k^2 a^2) p2+ + 1008 e^2]
  // m = -a^2/36 [a^2 (12 D^2 - k^2) p4+ + 48 e^2 p2+ - 24 D^2 a^2 + 96 e^2 - 14 a^2 k^2]
  // The D^2 terms are combined with p6+ - p2+ = p2+ (p2-)^2 and p4+ - 2 = (p2-)^2,
  // which would otherwise cancel to ~(p2-)^2 relative precision at large alpha.
  const double pm2 = c.pj_minus[2] * c.pj_minus[2];
  const double q_terms[] = {-36.0 * a2 * d2 * p2 * pm2, -a2 * k2 * p6, 72.0 * e2 * p4,
                            576.0 * e2 * p2, 33.0 * k2 * a2 * p2, 1008.0 * e2};
  const double m_terms[] = {12.0 * a2 * d2 * pm2, -a2 * k2 * p4, 48.0 * e2 * p2, 96.0 * e2,
                            -14.0 * a2 * k2};
  double qs = 0.0, qa = 0.0, ms = 0.0, ma = 0.0;
  for (double t : q_terms) qs += t, qa += std::abs(t);
  for (double t : m_terms) ms += t, ma += std::abs(t);
  const double qf = k * a4 / 216.0;
  const double mf = -a2 / 36.0;
  inv.q_magnitude = std::abs(qf) * qa;
  inv.m_magnitude = std::abs(mf) * ma;
  inv.q = snap(qf * qs, inv.q_magnitude);
  inv.m = snap(mf * ms, inv.m_magnitude);

  fill_roots(inv);
  return inv;
}

CubicInvariants invariants_from_qm(double shift, double q, double m, double rate_scale) {
  if (!std::isfinite(shift) || !std::isfinite(q) || !std::isfinite(m)) {
    throw DomainError("invariants_from_qm: non-finite input");
  }
  CubicInvariants inv;
  inv.shift = shift;
  inv.trace = 3.0 * shift;
  inv.q = q;
  inv.m = m;
  inv.q_magnitude = std::abs(q);
  inv.m_magnitude = std::abs(m);
  inv.rate_scale = rate_scale;
  fill_roots(inv);
  return inv;
}

std::array<double, 4> InvariantLines::discriminant_coefficients() const {
  return {q0 * q0 - m0 * m0 * m0, 2.0 * q0 * q1 - 3.0 * m0 * m0 * m1,
          q1 * q1 - 3.0 * m0 * m1 * m1, -m1 * m1 * m1};
}

InvariantLines invariant_lines(const model::ReducedModel& md) {
  const auto base = cubic_invariants(md.at(md.drive, 0.0));
  const auto c = model::subspace_constants(md.alpha);
  const double a2 = md.alpha * md.alpha;
  InvariantLines out;
  out.q0 = base.q;
  out.m0 = base.m;
  const double pm2 = c.pj_minus[2] * c.pj_minus[2];
  out.q1 = -md.kappa * a2 * a2 * a2 * c.pj_plus[2] * pm2 / 6.0;
  out.m1 = -a2 * a2 * pm2 / 3.0;
  return out;
}

ReducedSpectrum cardano_eigenvalues(const CubicInvariants& inv) {
  const Complex w(-0.5, std::sqrt(3.0) / 2.0);  // e^{i 2 pi / 3}
  const std::array<Complex, 3> t = {inv.eta_plus + inv.eta_minus,
                                    w * inv.eta_plus + std::conj(w) * inv.eta_minus,
                                    std::conj(w) * inv.eta_plus + w * inv.eta_minus};
  ReducedSpectrum out;
  out.E[0] = 0.0;
  out.degenerate = inv.degenerate();
  out.all_real = out.degenerate || inv.discriminant() < 0.0;

  if (out.degenerate) {
    // t^3 - 3 m t - 2 q = (t - a)^2 (t + 2a) with a = -cbrt(q), m = a^2
    const double a = -std::cbrt(inv.q);
    std::array<double, 3> r = {a, a, -2.0 * a};
    std::sort(r.begin(), r.end(), std::greater<>());
    for (int i = 0; i < 3; ++i) out.E[i + 1] = inv.shift + r[i];
    return out;
  }
  if (out.all_real) {
    std::array<double, 3> r = {t[0].real(), t[1].real(), t[2].real()};
    std::sort(r.begin(), r.end(), std::greater<>());
    for (int i = 0; i < 3; ++i) out.E[i + 1] = inv.shift + r[i];
    return out;
  }
  // one real root and a conjugate pair
  int real_idx = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(t[i].imag()) < std::abs(t[real_idx].imag())) real_idx = i;
  }
  const Complex a = t[(real_idx + 1) % 3], b = t[(real_idx + 2) % 3];
  const double re = 0.5 * (a.real() + b.real());
  const double im = 0.5 * std::abs(a.imag() - b.imag());
  out.E[1] = inv.shift + t[real_idx].real();
  out.E[2] = Complex(inv.shift + re, im);
  out.E[3] = Complex(inv.shift + re, -im);
  return out;
}

std::array<Complex, 4> numeric_eigenvalues(const ReducedLiouvillian& l) {
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(l, false);
  if (es.info() != Eigen::Success) throw NumericError("numeric_eigenvalues: eigensolver failed");
  std::array<Complex, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

}  // namespace kerrcat::catspace
