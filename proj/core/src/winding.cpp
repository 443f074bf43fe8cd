#include "kerrcat/winding.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "kerrcat/catspace.hpp"
#include "kerrcat/errors.hpp"

namespace kerrcat::winding {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double real_part_checked(Complex z, double scale, const char* what) {
  if (std::abs(z.imag()) > 1e-9 * std::max(std::abs(z), 1e-6 * scale)) {
    std::ostringstream msg;
    msg << "resultant_vector: " << what << " has imaginary residue " << z.imag()
        << "; eigenvalues are not conjugation-closed";
    throw DomainError(msg.str());
  }
  return z.real();
}

std::vector<ResultantVector> sample_contour(const Contour& c, const model::ReducedModel& base,
                                            Route route, int n) {
  std::vector<ResultantVector> out(n);
  for (int k = 0; k < n; ++k) {
    const auto pt = c.point(kTwoPi * k / n);
    out[k] = rescaled_resultant(base, pt[0], pt[1], route);
  }
  return out;
}

}  // namespace

Contour Contour::circle(double eps0, double delta0, double r, int samples) {
  Contour c;
  c.kind = Kind::Circle;
  c.center_eps = eps0;
  c.center_delta = delta0;
  c.radius = r;
  c.samples = samples;
  c.validate();
  return c;
}

Contour Contour::scaled_circle(double eps0, double delta0, double r, double se, double sd,
                               int samples) {
  Contour c = circle(eps0, delta0, r, samples);
  c.scale_eps = se;
  c.scale_delta = sd;
  c.validate();
  return c;
}

Contour Contour::polyline(std::vector<std::array<double, 2>> vertices, int samples) {
  Contour c;
  c.kind = Kind::Polyline;
  c.vertices = std::move(vertices);
  c.samples = samples;
  c.validate();
  return c;
}

void Contour::validate() const {
  if (samples < 8) throw DomainError("contour needs at least 8 samples");
  if (kind == Kind::Circle) {
    if (!std::isfinite(center_eps) || !std::isfinite(center_delta) || !std::isfinite(radius) ||
        radius <= 0.0) {
      throw DomainError("circle contour needs a finite center and positive radius");
    }
    if (!std::isfinite(scale_eps) || !std::isfinite(scale_delta) || scale_eps <= 0.0 ||
        scale_delta <= 0.0) {
      throw DomainError("circle contour axis scales must be positive");
    }
    return;
  }
  if (vertices.size() < 3) throw DomainError("polyline contour needs at least 3 vertices");
  for (const auto& v : vertices) {
    if (!std::isfinite(v[0]) || !std::isfinite(v[1])) {
      throw DomainError("polyline contour has a non-finite vertex");
    }
  }
}

std::array<double, 2> Contour::point(double phi) const {
  if (kind == Kind::Circle) {
    return {center_eps + radius * scale_eps * std::cos(phi),
            center_delta + radius * scale_delta * std::sin(phi)};
  }
  const std::size_t n = vertices.size();
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % n];
    cum[i + 1] = cum[i] + std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  double s = std::fmod(phi, kTwoPi);
  if (s < 0.0) s += kTwoPi;
  s *= cum[n] / kTwoPi;
  std::size_t i = std::upper_bound(cum.begin(), cum.end(), s) - cum.begin() - 1;
  i = std::min(i, n - 1);
  const double len = cum[i + 1] - cum[i];
  const double t = len > 0.0 ? (s - cum[i]) / len : 0.0;
  const auto& a = vertices[i];
  const auto& b = vertices[(i + 1) % n];
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

double ResultantVector::norm() const { return std::hypot(r1, r2); }

ResultantVector resultant_vector(Complex e2, Complex e3, Complex e4) {
  const double scale = std::max({std::abs(e2), std::abs(e3), std::abs(e4)});
  const Complex d23 = e2 - e3, d24 = e2 - e4, d34 = e3 - e4;
  const Complex r1 = -(d23 * d23) * (d24 * d24) * (d34 * d34);
  const Complex r2 = -8.0 * (e2 + e3 - 2.0 * e4) * (e2 + e4 - 2.0 * e3) * (e3 + e4 - 2.0 * e2);
  const double s3 = scale * scale * scale;
  return {real_part_checked(r1, s3 * s3, "R1"), real_part_checked(r2, s3, "R2")};
}

ResultantVector resultant_from_invariants(double q, double m) {
  return {108.0 * (q * q - m * m * m), 432.0 * q};
}

IdentityCheck check_resultant_identity(int samples, unsigned long long seed, double tolerance) {
  if (samples < 1) throw DomainError("check_resultant_identity: samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  IdentityCheck chk;
  chk.samples = samples;
  chk.tolerance = tolerance;
  for (int i = 0; i < samples; ++i) {
    const double shift = u(rng), q = u(rng), m = u(rng);
    const auto spec = catspace::cardano_eigenvalues(catspace::invariants_from_qm(shift, q, m));
    const auto prod = resultant_vector(spec.E[1], spec.E[2], spec.E[3]);
    const auto fast = resultant_from_invariants(q, m);
    chk.max_rel_r1 = std::max(chk.max_rel_r1, std::abs(prod.r1 - fast.r1) /
                                                  std::max(std::abs(fast.r1), 1e-300));
    chk.max_rel_r2 = std::max(chk.max_rel_r2, std::abs(prod.r2 - fast.r2) /
                                                  std::max(std::abs(fast.r2), 1e-300));
  }
  chk.passed = chk.max_rel_r1 < tolerance && chk.max_rel_r2 < tolerance;
  return chk;
}

const IdentityCheck& verified_resultant_identity() {
  static std::once_flag once;
  static IdentityCheck result;
  std::call_once(once, [] { result = check_resultant_identity(); });
  return result;
}

ResultantVector rescaled_resultant(const model::ReducedModel& base, double eps, double delta,
                                   Route route) {
  const auto md = base.at(eps, delta);
  const double s = md.rate_scale();
  if (!(s > 0.0)) throw DomainError("winding: kappa alpha^2 must be positive");
  const double s3 = s * s * s;
  ResultantVector r;
  switch (route) {
    case Route::Invariants: {
      if (!verified_resultant_identity().passed) {
        throw NumericError("winding: resultant identity check failed; invariants route disabled");
      }
      const auto inv = catspace::cubic_invariants(md);
      r = resultant_from_invariants(inv.q, inv.m);
      break;
    }
    case Route::Eigenvalues: {
      const auto e = catspace::cardano_eigenvalues(md).nonzero();
      r = resultant_vector(e[0], e[1], e[2]);
      break;
    }
    case Route::NumericEigensolver: {
      auto e = catspace::numeric_eigenvalues(catspace::reduced_liouvillian(md));
      std::sort(e.begin(), e.end(),
                [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
      r = resultant_vector(e[1], e[2], e[3]);
      break;
    }
  }
  return {r.r1 / (108.0 * s3 * s3), r.r2 / (432.0 * s3)};
}

WindingResult winding_from_resultants(std::span<const ResultantVector> samples) {
  const std::size_t n = samples.size();
  if (n < 3) throw DomainError("winding: need at least 3 samples");
  WindingResult w;
  w.samples = static_cast<int>(n);
  w.min_norm = INFINITY;
  double total = 0.0, quad = 0.0;
  const double dphi = kTwoPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = samples[k];
    const auto& b = samples[(k + 1) % n];
    const auto& prev = samples[(k + n - 1) % n];
    w.min_norm = std::min(w.min_norm, a.norm());
    const double step = std::atan2(a.r1 * b.r2 - a.r2 * b.r1, a.r1 * b.r1 + a.r2 * b.r2);
    total += step;
    w.max_step = std::max(w.max_step, std::abs(step));
    // (R1 R2' - R2 R1') / |R|^2 with central differences
    const double d1 = (b.r1 - prev.r1) / (2.0 * dphi);
    const double d2 = (b.r2 - prev.r2) / (2.0 * dphi);
    const double n2 = a.r1 * a.r1 + a.r2 * a.r2;
    quad += (a.r1 * d2 - a.r2 * d1) / n2 * dphi;
  }
  w.raw_unwrapped = total / kTwoPi;
  w.raw = quad / kTwoPi;
  w.winding = static_cast<int>(std::lround(w.raw_unwrapped));
  return w;
}

WindingResult winding_number(const Contour& contour, double alpha, double kappa,
                             const WindingOptions& opts) {
  contour.validate();
  if (!std::isfinite(alpha) || alpha <= 0.0 || !std::isfinite(kappa) || kappa <= 0.0) {
    throw DomainError("winding_number: alpha and kappa must be positive");
  }
  const model::ReducedModel base{alpha, kappa, 0.0, 0.0};
  int n = contour.samples;
  for (int refinements = 0;; ++refinements) {
    const auto samples = sample_contour(contour, base, opts.route, n);
    WindingResult w = winding_from_resultants(samples);
    w.refinements = refinements;
    if (!(w.min_norm >= opts.min_norm)) {
      std::ostringstream msg;
      msg << "winding_number: resultant vector norm " << w.min_norm
          << " on the contour; it passes through a triple point";
      throw NumericError(msg.str());
    }
    const bool resolved = w.max_step < 0.5 * std::numbers::pi;
    if (resolved && std::abs(w.raw - w.winding) < opts.quantization_tol) return w;
    if (2 * n > opts.max_samples) {
      std::ostringstream msg;
      msg << "winding_number: not quantized after " << refinements << " refinements (samples "
          << n << ", raw " << w.raw << ", unwrapped " << w.raw_unwrapped << ")";
      throw NumericError(msg.str());
    }
    n *= 2;
  }
}

std::vector<TrajectoryPoint> winding_trajectory(const Contour& contour, double alpha,
                                                double kappa, Route route) {
  contour.validate();
  if (!std::isfinite(alpha) || alpha <= 0.0 || !std::isfinite(kappa) || kappa <= 0.0) {
    throw DomainError("winding_trajectory: alpha and kappa must be positive");
  }
  const model::ReducedModel base{alpha, kappa, 0.0, 0.0};
  const int n = contour.samples;
  const auto samples = sample_contour(contour, base, route, n);
  std::vector<TrajectoryPoint> out;
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    const auto& r = samples[k % n];
    const double nr = r.norm();
    if (!(nr > 0.0)) throw NumericError("winding_trajectory: contour passes through R = 0");
    out.push_back({kTwoPi * k / n, r.r1 / nr, r.r2 / nr});
  }
  return out;
}

}  // namespace kerrcat::winding
