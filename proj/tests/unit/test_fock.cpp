#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"
#include "kerrcat/linalg.hpp"
#include "oracles.hpp"

using namespace kerrcat;
using namespace kerrcat::fock;

namespace {

constexpr double kAlpha = 1.521;

struct WarningCapture {
  std::vector<std::string> messages;
  WarningCapture() {
    set_warning_sink([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { set_warning_sink(nullptr); }
};

}  // namespace

TEST(Ladder, SmallMatrices) {
  const ComplexMatrix a = annihilation(2);
  EXPECT_EQ(a(0, 1), Complex(1.0));
  EXPECT_EQ(a(0, 0), Complex(0.0));
  EXPECT_EQ(a(1, 0), Complex(0.0));
  EXPECT_EQ(a(1, 1), Complex(0.0));
  const ComplexMatrix n = creation(4) * annihilation(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(n(i, j) - Complex(i == j ? i : 0.0)), 0.0, 1e-15);
  EXPECT_LT((number_operator(4) - n).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Ladder, TruncatedCommutator) {
  const int dim = 7;
  const ComplexMatrix a = annihilation(dim);
  const ComplexMatrix c = a * a.adjoint() - a.adjoint() * a;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double want = i != j ? 0.0 : (i == dim - 1 ? -(dim - 1.0) : 1.0);
      EXPECT_NEAR(std::abs(c(i, j) - want), 0.0, 1e-14);
    }
  EXPECT_THROW(annihilation(1), DomainError);
}

TEST(CoherentState, VacuumAndPhotonNumber) {
  const auto vac = coherent_state(0.0, 6);
  EXPECT_EQ(vac.amplitudes()(0), Complex(1.0));
  for (int n = 1; n < 6; ++n) EXPECT_EQ(vac.amplitudes()(n), Complex(0.0));

  const auto psi = coherent_state(kAlpha, 40);
  EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-10);
  const double n = (psi.amplitudes().adjoint() * number_operator(40) * psi.amplitudes())(0).real();
  EXPECT_NEAR(n, static_cast<double>(oracle::truncated_poisson_mean(kAlpha, 40)), 1e-12);
  EXPECT_NEAR(n, 2.313441, 5e-7);
}

TEST(CoherentState, OverlapWithMirror) {
  const auto plus = coherent_state(kAlpha, 40);
  const auto minus = coherent_state(-kAlpha, 40);
  const Complex ov = plus.amplitudes().dot(minus.amplitudes());
  // closed form e^{-2 alpha^2}
  EXPECT_NEAR(ov.real(), 0.0097852219080583649, 1e-12);
  EXPECT_NEAR(ov.imag(), 0.0, 1e-15);
}

TEST(CoherentState, TruncationPolicy) {
  WarningCapture cap;
  const auto psi = coherent_state(3.0, 10);
  EXPECT_FALSE(cap.messages.empty());
  EXPECT_GT(psi.truncated_tail(), 1e-10);
  EXPECT_THROW(coherent_state(3.0, 10, TruncationPolicy::Throw), DomainError);
  cap.messages.clear();
  coherent_state(kAlpha, 40);
  EXPECT_TRUE(cap.messages.empty());
  EXPECT_NEAR(poisson_tail(kAlpha, 40), 0.0, 1e-30);
}

TEST(CatState, ParityAndOrthogonality) {
  const auto even = cat_state(kAlpha, Parity::Even, 40);
  const auto odd = cat_state(kAlpha, Parity::Odd, 40);
  for (int n = 0; n < 40; ++n) {
    if (n % 2) {
      EXPECT_EQ(even.amplitudes()(n), Complex(0.0));
    } else {
      EXPECT_EQ(odd.amplitudes()(n), Complex(0.0));
    }
  }
  EXPECT_NEAR(std::abs(even.amplitudes().dot(odd.amplitudes())), 0.0, 1e-12);
  EXPECT_NEAR(even.amplitudes().norm(), 1.0, 1e-10);
  EXPECT_THROW(cat_state(0.0, Parity::Even, 10), DomainError);
}

TEST(CatState, LadderActionInsideSubspace) {
  const int dim = 40;
  const double p = static_cast<double>(oracle::p_ratio(kAlpha));
  const auto even = cat_state(kAlpha, Parity::Even, dim).amplitudes();
  const auto odd = cat_state(kAlpha, Parity::Odd, dim).amplitudes();
  const ComplexMatrix a = annihilation(dim);
  EXPECT_LT((a * even - kAlpha * p * odd).norm(), 1e-8);
  EXPECT_LT((a * odd - kAlpha / p * even).norm(), 1e-8);
  // a^dag leaves the subspace; its component along the partner cat follows
  // the same ratios
  EXPECT_NEAR(std::abs(odd.dot(a.adjoint() * even) - kAlpha / p), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(even.dot(a.adjoint() * odd) - kAlpha * p), 0.0, 1e-6);
}

TEST(CatState, PhotonNumber) {
  const auto even = cat_state(kAlpha, Parity::Even, 40).amplitudes();
  const double n = (even.adjoint() * number_operator(40) * even)(0).real();
  // alpha^2 tanh(alpha^2)
  EXPECT_NEAR(n, 2.2686046663617927, 1e-10);
}

TEST(CatState, TruncationConvergence) {
  for (double a : {0.5, 1.0, 1.521, 1.6}) {
    for (auto par : {Parity::Even, Parity::Odd}) {
      const auto s40 = cat_state(a, par, 40).amplitudes();
      const auto s80 = cat_state(a, par, 80).amplitudes();
      const double n40 = (s40.adjoint() * number_operator(40) * s40)(0).real();
      const double n80 = (s80.adjoint() * number_operator(80) * s80)(0).real();
      EXPECT_LT(std::abs(n40 - n80), 1e-10);
    }
  }
}

TEST(Hamiltonian, HermitianAndCatEigenstates) {
  const auto params = model::ModelParams::from_alpha(kAlpha, 0.1, 0.3, -0.2);
  const ComplexMatrix h = build_hamiltonian(params, 40);
  EXPECT_EQ(hermiticity_residual(h), 0.0);

  const auto bare = model::ModelParams::from_alpha(kAlpha, 0.0);
  const ComplexMatrix h0 = build_hamiltonian(bare, 40);
  const double e0 = bare.two_photon * bare.two_photon / bare.kerr;
  for (double a : {kAlpha, -kAlpha}) {
    const auto psi = coherent_state(a, 40).amplitudes();
    EXPECT_LT((h0 * psi - e0 * psi).norm(), 1e-6);
  }
}

TEST(Hamiltonian, GapAboveCatManifold) {
  const auto bare = model::ModelParams::from_alpha(kAlpha, 0.0);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(build_hamiltonian(bare, 40));
  const auto& ev = es.eigenvalues();
  const int n = static_cast<int>(ev.size());
  const double e0 = bare.two_photon * bare.two_photon / bare.kerr;
  EXPECT_NEAR(ev(n - 1), e0, 1e-6);
  EXPECT_NEAR(ev(n - 2), e0, 1e-6);
  // 4 K alpha^2 is only the large-alpha limit; at alpha = 1.521 the gap is
  // two thirds of it (frozen, and converged in the Fock cutoff)
  const double gap = e0 - ev(n - 3);
  EXPECT_NEAR(gap / (4.0 * kAlpha * kAlpha), 0.66247991653049842, 1e-9);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> big(build_hamiltonian(bare, 60));
  const auto& eb = big.eigenvalues();
  EXPECT_NEAR(e0 - eb(eb.size() - 3), gap, 1e-9);
}

TEST(Hamiltonian, ZeroParameters) {
  model::ModelParams zero{0.0, 0.0, 0.0, 0.0, 0.0};
  EXPECT_EQ(build_hamiltonian(zero, 5), ComplexMatrix::Zero(5, 5));
}

TEST(Displacement, ActsOnVacuum) {
  const ComplexMatrix d = displacement(Complex(0.7, -0.3), 40);
  const ComplexVector vac = coherent_state(0.0, 40).amplitudes();
  ComplexVector psi = d * vac;
  // |beta> amplitudes e^{-|b|^2/2} b^n / sqrt(n!)
  const Complex b(0.7, -0.3);
  Complex c = std::exp(-0.5 * std::norm(b));
  for (int n = 0; n < 40; ++n) {
    EXPECT_NEAR(std::abs(psi(n) - c), 0.0, 1e-12);
    c *= b / std::sqrt(n + 1.0);
  }
}

TEST(Wigner, ParityAtOrigin) {
  const std::vector<double> z{0.0};
  const RealMatrix wv = wigner(coherent_state(0.0, 20), z, z);
  EXPECT_NEAR(wv(0, 0), 2.0 / std::numbers::pi, 1e-12);
  const RealMatrix wo = wigner(cat_state(kAlpha, Parity::Odd, 40), z, z);
  EXPECT_NEAR(wo(0, 0), -2.0 / std::numbers::pi, 1e-10);
}

TEST(Wigner, CoherentStateGaussian) {
  const auto xs = linspace(-1.0, 3.5, 19);
  const auto ps = linspace(-2.0, 2.0, 17);
  const RealMatrix w = wigner(coherent_state(kAlpha, 40), xs, ps);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const double ref = 2.0 / std::numbers::pi *
                         std::exp(-2.0 * ((xs[i] - kAlpha) * (xs[i] - kAlpha) + ps[k] * ps[k]));
      EXPECT_NEAR(w(i, k), ref, 1e-10);
    }
}

TEST(Wigner, NonUniformGridMatchesUniform) {
  const std::vector<double> xs{-1.0, 0.25, 0.4, 1.9};
  const std::vector<double> ps{-0.3, 0.0, 0.8};
  const auto cat = cat_state(kAlpha, Parity::Even, 40);
  const RealMatrix w = wigner(cat, xs, ps);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const RealMatrix one = wigner(cat, std::vector<double>{xs[i]}, std::vector<double>{ps[k]});
      EXPECT_NEAR(w(i, k), one(0, 0), 1e-12);
    }
}

TEST(Wigner, EvenCatNormalization) {
  const int n = 121;
  const auto xs = linspace(-5.0, 5.0, n);
  const auto ws = oracle::simpson_weights(-5.0, 5.0, n);
  const RealMatrix w = wigner(cat_state(kAlpha, Parity::Even, 40), xs, xs);
  double integral = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) integral += ws[i] * ws[k] * w(i, k);
  EXPECT_NEAR(integral, 1.0, 1e-3);
  EXPECT_TRUE(w.allFinite());
}

TEST(Wigner, WarnsOnUnconvergedInput) {
  WarningCapture cap;
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  rho(3, 3) = 1.0;
  wigner(rho, std::vector<double>{0.0}, std::vector<double>{0.0});
  EXPECT_FALSE(cap.messages.empty());
  EXPECT_THROW(wigner(rho, std::vector<double>{}, std::vector<double>{0.0}), DomainError);
}
