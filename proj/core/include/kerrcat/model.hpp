#pragma once

#include <array>

namespace kerrcat::model {

/// Physical parameters of the driven Kerr resonator. Frequencies are angular
/// (rad/us), kappa is a plain rate (1/us).
struct ModelParams {
  double delta = 0.0;       ///< detuning Delta
  double kerr = 1.0;        ///< Kerr coefficient K > 0
  double two_photon = 1.0;  ///< two-photon drive amplitude P > 0
  double drive = 0.0;       ///< single-photon drive epsilon
  double kappa = 0.0;       ///< single-photon loss rate

  /// alpha = sqrt(P / K)
  double alpha() const;

  /// Throws DomainError when any invariant is violated.
  void validate() const;

  ModelParams with_drive(double eps) const;
  ModelParams with_delta(double det) const;

  /// Parameters reproducing a given cat amplitude with K = 1 rad/us.
  static ModelParams from_alpha(double alpha, double kappa, double drive = 0.0,
                                double delta = 0.0);

  bool operator==(const ModelParams&) const = default;
};

/// The four knobs the cat-subspace closed forms depend on.
struct ReducedModel {
  double alpha = 1.0;
  double kappa = 0.0;
  double drive = 0.0;
  double delta = 0.0;

  static ReducedModel from(const ModelParams& params);
  ReducedModel at(double eps, double det) const { return {alpha, kappa, eps, det}; }
  /// Natural rate scale kappa * alpha^2 of the reduced dynamics.
  double rate_scale() const { return kappa * alpha * alpha; }
};

/// Normalization ratio p = N+/N- and the combinations p^-j -/+ p^j.
struct CatSubspaceConstants {
  double alpha = 0.0;
  double p = 1.0;
  double p_squared = 1.0;
  double log_p_squared = 0.0;  ///< log(tanh(alpha^2)), kept for stable p^j
  bool saturated = false;  ///< alpha^2 beyond the clamp, p taken as exactly 1

  /// p^-j - p^j, j >= 1
  double minus(int j) const;
  /// p^-j + p^j, j >= 1
  double plus(int j) const;

  // cached combinations for j in {1, 2, 4, 6}, indexed by j
  std::array<double, 7> pj_minus{};
  std::array<double, 7> pj_plus{};
};

/// alpha^2 above which p is clamped to 1.
inline constexpr double kAlphaSquaredClamp = 350.0;

CatSubspaceConstants subspace_constants(double alpha);

/// How the experiment-side kappa is read.
enum class KappaConvention {
  Rate,     ///< plain rate in 1/us (default)
  Angular,  ///< cyclic MHz, multiplied by 2 pi like the other frequencies
};

/// Converts cyclic-MHz inputs to angular rad/us.
ModelParams params_from_experiment(double kerr_mhz, double two_photon_mhz,
                                   double kappa, double drive_mhz, double delta_mhz,
                                   KappaConvention convention = KappaConvention::Rate);

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double mhz_to_angular(double mhz) { return kTwoPi * mhz; }
inline double angular_to_mhz(double w) { return w / kTwoPi; }

}  // namespace kerrcat::model
