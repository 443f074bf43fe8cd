#pragma once

#include <array>
#include <string>
#include <vector>

#include "kerrcat/catspace.hpp"
#include "kerrcat/model.hpp"

namespace kerrcat::exceptional {

/// q^2 - m^3 of the reduced spectrum.
double discriminant(const model::ReducedModel& m);
inline double discriminant(const model::ModelParams& p) {
  return discriminant(model::ReducedModel::from(p));
}

/// Natural residual scales: (kappa a^2)^3 for q, (kappa a^2)^2 for m and
/// (kappa a^2)^6 for the discriminant.
struct ResidualScales {
  double q = 0.0, m = 0.0, disc = 0.0;
};
ResidualScales residual_scales(double alpha, double kappa);

struct EpPoint {
  double eps = 0.0;
  double delta = 0.0;
  int order = 0;  ///< 2 or 3, 0 when neither test passes
  double disc_residual = 0.0;  ///< |q^2 - m^3|
  double q = 0.0;
  double m = 0.0;
  double coalescence = 0.0;         ///< largest eigenvector overlap
  double coalescence_second = 0.0;  ///< second largest overlap
};

/// Evaluates residuals, order and coalescence at (eps, delta).
EpPoint classify_point(const model::ReducedModel& base, double eps, double delta);

struct CoalescenceMetric {
  double largest = 0.0;
  double second = 0.0;
};

/// Pairwise overlaps |<v_i|v_j>| of the normalized right eigenvectors of the
/// three non-zero eigenvalues.
CoalescenceMetric coalescence_metric(const catspace::ReducedLiouvillian& l);

struct Lep2Options {
  double eps_lo = 0.0;
  double eps_hi = 0.0;
  int n_eps = 201;
  /// bisection steps used to locate slices where the root count changes
  int refine_steps = 60;
};

enum class CurveEnd { Range, Axis, Lep3, Fold };

struct Lep2Curve {
  std::vector<EpPoint> points;  ///< ordered along the curve
  CurveEnd start = CurveEnd::Range;
  CurveEnd end = CurveEnd::Range;
};

struct Lep2Trace {
  std::vector<Lep2Curve> curves;
  std::vector<EpPoint> vertices;  ///< LEP3 points where curves terminate
};

/// Positive Delta roots of the discriminant at fixed eps, ascending. The
/// discriminant is a cubic in Delta^2, so its stationary points split the
/// half-line into monotone pieces with at most one root each; each root is
/// bisected to full double precision.
std::vector<double> discriminant_roots(const model::ReducedModel& base, double eps);

/// LEP2 curves in the (eps, Delta) plane over [eps_lo, eps_hi], both Delta
/// signs. Empty when kappa == 0.
Lep2Trace lep2_trace(double alpha, double kappa, const Lep2Options& opts);

/// The four sign images of the closed-form LEP3, ordered
/// (+eps, +Delta), (+eps, -Delta), (-eps, +Delta), (-eps, -Delta).
std::array<EpPoint, 4> lep3_closed_form(double alpha, double kappa);

struct NewtonTrace {
  int iterations = 0;
  std::vector<std::array<double, 3>> history;  ///< eps, delta, residual norm
};

/// 2D Newton on (q / s^3, m / s^2) = 0 with s = kappa a^2 and a central
/// finite-difference Jacobian. Throws NumericError on a singular Jacobian or
/// when 100 iterations do not reach a residual below 1e-12.
EpPoint lep3_numeric(double alpha, double kappa, double eps_seed, double delta_seed,
                     NewtonTrace* trace = nullptr);

std::string to_string(CurveEnd e);

}  // namespace kerrcat::exceptional
