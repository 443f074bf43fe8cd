#pragma once

#include <array>
#include <span>
#include <vector>

#include "kerrcat/linalg.hpp"
#include "kerrcat/model.hpp"

namespace kerrcat::winding {

/// Closed loop in the (eps, Delta) plane, parameterized by phi in [0, 2 pi).
/// A circle is round in the coordinates (eps / scale_eps, Delta / scale_delta).
struct Contour {
  enum class Kind { Circle, Polyline };
  Kind kind = Kind::Circle;
  double center_eps = 0.0;
  double center_delta = 0.0;
  double radius = 0.0;
  double scale_eps = 1.0;
  double scale_delta = 1.0;
  std::vector<std::array<double, 2>> vertices;  ///< polyline corners, implicitly closed
  int samples = 720;

  static Contour circle(double eps0, double delta0, double r, int samples = 720);
  /// Circle of radius r in units where the axes are scaled by (se, sd).
  static Contour scaled_circle(double eps0, double delta0, double r, double se, double sd,
                               int samples = 720);
  static Contour polyline(std::vector<std::array<double, 2>> vertices, int samples = 720);

  /// (eps, Delta) at phi; phi and phi + 2 pi give the same point.
  std::array<double, 2> point(double phi) const;
  void validate() const;
};

struct ResultantVector {
  double r1 = 0.0;
  double r2 = 0.0;
  double norm() const;
};

/// R1 = -(E2-E3)^2 (E2-E4)^2 (E3-E4)^2, R2 = -8 (E2+E3-2E4)(E2+E4-2E3)(E3+E4-2E2).
/// Throws DomainError when the imaginary residue exceeds 1e-9 |value|.
ResultantVector resultant_vector(Complex e2, Complex e3, Complex e4);

/// (108 (q^2 - m^3), 432 q): the same pair written through the cubic invariants.
ResultantVector resultant_from_invariants(double q, double m);

struct IdentityCheck {
  int samples = 0;
  double max_rel_r1 = 0.0;
  double max_rel_r2 = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Compares the two resultant forms on random (q, m) with roots from the
/// closed-form cubic solution.
IdentityCheck check_resultant_identity(int samples = 1000, unsigned long long seed = 20240917ULL,
                                       double tolerance = 1e-9);
/// Runs check_resultant_identity once per process; the invariants fast path
/// refuses to run unless it passed.
const IdentityCheck& verified_resultant_identity();

enum class Route {
  Eigenvalues,         ///< closed-form eigenvalues, then products
  Invariants,          ///< (q, m) directly
  NumericEigensolver,  ///< dense 4x4 eigensolve, then products
};

struct WindingOptions {
  Route route = Route::Eigenvalues;
  int max_samples = 46080;
  double quantization_tol = 1e-3;
  /// smallest allowed |rescaled R| along the contour
  double min_norm = 1e-8;
};

struct WindingResult {
  int winding = 0;
  double raw = 0.0;          ///< quadrature of the angular velocity / 2 pi
  double raw_unwrapped = 0.0;  ///< sum of unwrapped angle steps / 2 pi
  int samples = 0;
  int refinements = 0;
  double min_norm = 0.0;
  double max_step = 0.0;  ///< largest |angle step| in radians
};

/// Rescaled resultant ((q^2 - m^3) / s^6, q / s^3), s = kappa alpha^2, at one
/// parameter point; positive rescaling of the components leaves every
/// winding number unchanged.
ResultantVector rescaled_resultant(const model::ReducedModel& base, double eps, double delta,
                                   Route route);

/// Winding of a periodic sample sequence (the closing sample is implied).
WindingResult winding_from_resultants(std::span<const ResultantVector> samples);

WindingResult winding_number(const Contour& contour, double alpha, double kappa,
                             const WindingOptions& opts = {});

struct TrajectoryPoint {
  double phi = 0.0;
  double r1_norm = 0.0;
  double r2_norm = 0.0;
};

/// Normalized resultant along the contour, samples + 1 points with the last
/// repeating the first.
std::vector<TrajectoryPoint> winding_trajectory(const Contour& contour, double alpha,
                                                double kappa, Route route = Route::Eigenvalues);

}  // namespace kerrcat::winding
