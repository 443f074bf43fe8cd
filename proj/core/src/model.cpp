#include "kerrcat/model.hpp"

#include <cmath>
#include <string>

#include "kerrcat/errors.hpp"

namespace kerrcat::model {

double ModelParams::alpha() const { return std::sqrt(two_photon / kerr); }

void ModelParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(delta) || !finite(kerr) || !finite(two_photon) || !finite(drive) ||
      !finite(kappa)) {
    throw DomainError("model parameters must be finite");
  }
  if (kerr <= 0.0 || two_photon <= 0.0) {
    throw DomainError("kerr and two_photon must be positive");
  }
  if (kappa < 0.0) throw DomainError("kappa must be non-negative");
}

ModelParams ModelParams::with_drive(double eps) const {
  ModelParams out = *this;
  out.drive = eps;
  return out;
}

ModelParams ModelParams::with_delta(double det) const {
  ModelParams out = *this;
  out.delta = det;
  return out;
}

ModelParams ModelParams::from_alpha(double alpha, double kappa, double drive, double delta) {
  if (!std::isfinite(alpha) || alpha <= 0.0) throw DomainError("alpha must be positive");
  ModelParams p{delta, 1.0, alpha * alpha, drive, kappa};
  p.validate();
  return p;
}

ReducedModel ReducedModel::from(const ModelParams& params) {
  params.validate();
  return {params.alpha(), params.kappa, params.drive, params.delta};
}

double CatSubspaceConstants::minus(int j) const {
  if (j < 1) throw DomainError("p_j combinations need j >= 1");
  if (saturated) return 0.0;
  return std::exp(-0.5 * j * log_p_squared) * -std::expm1(j * log_p_squared);
}

double CatSubspaceConstants::plus(int j) const {
  if (j < 1) throw DomainError("p_j combinations need j >= 1");
  if (saturated) return 2.0;
  return std::exp(-0.5 * j * log_p_squared) * (1.0 + std::exp(j * log_p_squared));
}

CatSubspaceConstants subspace_constants(double alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw DomainError("subspace_constants: alpha must be finite and positive, got " +
                      std::to_string(alpha));
  }
  CatSubspaceConstants c;
  c.alpha = alpha;
  const double x = alpha * alpha;
  if (x > kAlphaSquaredClamp) {
    c.saturated = true;
    c.p = 1.0;
    c.p_squared = 1.0;
    for (int j : {1, 2, 4, 6}) {
      c.pj_minus[j] = 0.0;
      c.pj_plus[j] = 2.0;
    }
    return c;
  }

  // p^2 = tanh(x); u = 1 - tanh(x) without cancellation
  const double e = std::exp(-2.0 * x);
  const double u = 2.0 * e / (1.0 + e);
  c.log_p_squared = std::log1p(-u);
  c.p_squared = std::exp(c.log_p_squared);
  c.p = std::exp(0.5 * c.log_p_squared);
  for (int j : {1, 2, 4, 6}) {
    c.pj_minus[j] = c.minus(j);
    c.pj_plus[j] = c.plus(j);
  }
  return c;
}

ModelParams params_from_experiment(double kerr_mhz, double two_photon_mhz, double kappa,
                                   double drive_mhz, double delta_mhz,
                                   KappaConvention convention) {
  for (double v : {kerr_mhz, two_photon_mhz, kappa, drive_mhz, delta_mhz}) {
    if (!std::isfinite(v)) throw DomainError("experiment parameters must be finite");
  }
  if (kerr_mhz <= 0.0 || two_photon_mhz <= 0.0) {
    throw DomainError("K and P must be positive");
  }
  ModelParams p;
  p.kerr = mhz_to_angular(kerr_mhz);
  p.two_photon = mhz_to_angular(two_photon_mhz);
  p.drive = mhz_to_angular(drive_mhz);
  p.delta = mhz_to_angular(delta_mhz);
  p.kappa = convention == KappaConvention::Angular ? mhz_to_angular(kappa) : kappa;
  p.validate();
  return p;
}

}  // namespace kerrcat::model
