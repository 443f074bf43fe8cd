#include <gtest/gtest.h>

#include <random>

#include "kerrcat/catspace.hpp"
#include "kerrcat/dynamics.hpp"
#include "kerrcat/exceptional.hpp"
#include "kerrcat/fock.hpp"
#include "kerrcat/liouville.hpp"
#include "oracles.hpp"

using namespace kerrcat;
using namespace kerrcat::catspace;
using model::ReducedModel;

namespace {

ReducedModel random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {0.5 + 2.0 * u(rng), 0.01 + u(rng), 2.0 * u(rng) - 1.0, 4.0 * u(rng) - 2.0};
}

// Draws inside the box spanned by the exceptional points, where the three
// non-zero eigenvalues are often all real.
ReducedModel random_model_near_ep(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = 0.8 + u(rng), kappa = 0.01 + u(rng);
  const double s = kappa * a * a;
  const double d_axis = kappa / static_cast<double>(oracle::pj_minus(a, 2));
  return {a, kappa, 0.1 * s * (2.0 * u(rng) - 1.0), 1.5 * d_axis * (2.0 * u(rng) - 1.0)};
}

ReducedModel mixed_model(std::mt19937_64& rng, int trial) {
  return trial % 2 ? random_model_near_ep(rng) : random_model(rng);
}

std::vector<oracle::cd> as_vector(const std::array<Complex, 3>& a) { return {a.begin(), a.end()}; }

double max_abs(const std::array<Complex, 3>& a) {
  return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

}  // namespace

TEST(ReducedLiouvillian, MatchesTwoLevelLindbladian) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_model(rng);
    const Eigen::Matrix4cd ref = oracle::two_level_generator(m.alpha, m.kappa, m.drive, m.delta);
    const double scale = ref.cwiseAbs().maxCoeff();
    EXPECT_LT((reduced_liouvillian(m) - ref).cwiseAbs().maxCoeff(), 1e-13 * scale);
  }
}

TEST(ReducedLiouvillian, TraceIsConserved) {
  std::mt19937_64 rng(22);
  const Eigen::RowVector4cd tr(1.0, 0.0, 0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto l = reduced_liouvillian(random_model(rng));
    EXPECT_LT((tr * l).cwiseAbs().maxCoeff(), 1e-13 * l.cwiseAbs().maxCoeff());
  }
}

TEST(ReducedLiouvillian, BlockStructureWithoutDrive) {
  const auto l = reduced_liouvillian(ReducedModel{1.3, 0.2, 0.0, 0.7});
  // populations (0, 3) never couple to coherences (1, 2)
  for (int i : {0, 3})
    for (int j : {1, 2}) {
      EXPECT_EQ(l(i, j), Complex(0.0));
      EXPECT_EQ(l(j, i), Complex(0.0));
    }
}

TEST(CubicInvariants, MatchCharacteristicPolynomial) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = random_model(rng);
    const auto c = oracle::charpoly(oracle::two_level_generator(m.alpha, m.kappa, m.drive, m.delta));
    const auto inv = cubic_invariants(m);
    const double s = m.rate_scale();
    // x^4 + c3 x^3 + c2 x^2 + c1 x with x = t + shift
    EXPECT_LT(std::abs(c[0]), 1e-10 * s * s * s * s);
    const Complex c3 = c[3], c2 = c[2], c1 = c[1];
    EXPECT_NEAR(inv.shift, (-c3 / 3.0).real(), 1e-12 * s);
    EXPECT_NEAR(inv.trace, -c3.real(), 1e-12 * s);
    const Complex m_ref = -(c2 - c3 * c3 / 3.0) / 3.0;
    const Complex q_ref = -(2.0 * c3 * c3 * c3 / 27.0 - c3 * c2 / 3.0 + c1) / 2.0;
    EXPECT_NEAR(inv.m, m_ref.real(), 1e-9 * std::max(s * s, inv.m_magnitude));
    EXPECT_NEAR(inv.q, q_ref.real(), 1e-9 * std::max(s * s * s, inv.q_magnitude));
    EXPECT_LT(std::abs(m_ref.imag()), 1e-9 * s * s);
    EXPECT_LT(std::abs(q_ref.imag()), 1e-9 * s * s * s);
  }
}

TEST(CubicInvariants, CubeRootProductIsM) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inv = cubic_invariants(random_model(rng));
    const double scale = std::max(std::abs(inv.m), inv.rate_scale * inv.rate_scale);
    EXPECT_LT(std::abs(inv.eta_plus * inv.eta_minus - inv.m), 1e-10 * scale);
  }
}

TEST(CubicInvariants, LinesInDetuningSquared) {
  const ReducedModel base{1.4, 0.3, 0.25, 0.0};
  const auto lines = invariant_lines(base);
  const auto c = lines.discriminant_coefficients();
  for (double d : {0.0, 0.3, -1.1, 2.5}) {
    const auto inv = cubic_invariants(base.at(base.drive, d));
    const double v = d * d;
    EXPECT_NEAR(inv.q, lines.q0 + lines.q1 * v, 1e-12 * (1.0 + std::abs(inv.q)));
    EXPECT_NEAR(inv.m, lines.m0 + lines.m1 * v, 1e-12 * (1.0 + std::abs(inv.m)));
    const double disc = c[0] + v * (c[1] + v * (c[2] + v * c[3]));
    EXPECT_NEAR(disc, inv.discriminant(), 1e-10 * (1.0 + std::abs(disc)));
  }
}

TEST(Cardano, MatchesTrigonometricRoots) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = mixed_model(rng, trial);
    const auto inv = cubic_invariants(m);
    const auto spec = cardano_eigenvalues(inv);
    EXPECT_EQ(spec.E[0], Complex(0.0));
    auto t = oracle::depressed_cubic_roots(inv.q, inv.m);
    std::vector<oracle::cd> ref;
    for (auto r : t) ref.push_back(r + inv.shift);
    const double scale = max_abs(spec.nonzero());
    EXPECT_LT(oracle::matched_distance(as_vector(spec.nonzero()), ref), 1e-9 * scale) << trial;
  }
}

TEST(Cardano, MatchesDenseEigensolver) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = mixed_model(rng, trial);
    const auto spec = cardano_eigenvalues(m);
    const auto num = numeric_eigenvalues(reduced_liouvillian(m));
    std::vector<oracle::cd> all(num.begin(), num.end());
    std::vector<oracle::cd> mine(spec.E.begin(), spec.E.end());
    double scale = 0.0;
    for (auto e : mine) scale = std::max(scale, std::abs(e));
    EXPECT_LT(oracle::matched_distance(mine, all), 1e-9 * scale) << trial;
  }
}

TEST(Cardano, OrderingAndRealRoots) {
  std::mt19937_64 rng(27);
  int three_real = 0, one_real = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inv = cubic_invariants(mixed_model(rng, trial));
    const auto s = cardano_eigenvalues(inv);
    if (s.degenerate) continue;
    if (inv.discriminant() < 0.0) {
      ++three_real;
      EXPECT_TRUE(s.all_real);
      for (int i = 1; i < 4; ++i) EXPECT_EQ(s.E[i].imag(), 0.0);
      EXPECT_GE(s.E[1].real(), s.E[2].real());
      EXPECT_GE(s.E[2].real(), s.E[3].real());
    } else {
      ++one_real;
      EXPECT_FALSE(s.all_real);
      EXPECT_EQ(s.E[1].imag(), 0.0);
      EXPECT_GT(s.E[2].imag(), 0.0);
      EXPECT_LT(s.E[3].imag(), 0.0);
      EXPECT_EQ(s.E[2], std::conj(s.E[3]));
    }
    const Complex sum = s.E[1] + s.E[2] + s.E[3];
    EXPECT_NEAR(sum.real(), inv.trace, 1e-12 * std::abs(inv.trace));
    EXPECT_NEAR(sum.imag(), 0.0, 1e-12 * std::abs(inv.trace));
  }
  // both regimes are exercised
  EXPECT_GT(three_real, 50);
  EXPECT_GT(one_real, 50);
}

TEST(Cardano, UndrivenLossOnlyMultiset) {
  for (double a : {0.7, 1.0, 1.521, 2.2}) {
    const double kappa = 0.13;
    const auto spec = cardano_eigenvalues(ReducedModel{a, kappa, 0.0, 0.0});
    const double s = kappa * a * a;
    const double p2 = static_cast<double>(oracle::pj_plus(a, 2));
    // population decay -s p2+, coherence pair -s p2+/2 +/- s
    const std::vector<oracle::cd> ref{-s * p2, -s * (0.5 * p2 - 1.0), -s * (0.5 * p2 + 1.0)};
    // at alpha = 2.2 two roots sit 1e-8 s apart, and the cubic route only
    // resolves a near-double root to about sqrt(machine epsilon)
    const double tol = a < 2.0 ? 1e-12 : 1.5e-8;
    EXPECT_LT(oracle::matched_distance(as_vector(spec.nonzero()), ref), tol * s * p2) << a;
  }
}

TEST(Cardano, UnitaryLimit) {
  const double a = 1.2, d = 0.8;
  const auto spec = cardano_eigenvalues(ReducedModel{a, 0.0, 0.0, d});
  const double w = d * a * a * static_cast<double>(oracle::pj_minus(a, 2));
  const std::vector<oracle::cd> ref{0.0, {0.0, w}, {0.0, -w}};
  EXPECT_LT(oracle::matched_distance(as_vector(spec.nonzero()), ref), 1e-12 * w);
}

TEST(Cardano, TripleRootAtLep3) {
  const double a = 1.5209973161780712, kappa = 1.0 / 15.5;
  const auto lep3 = exceptional::lep3_closed_form(a, kappa);
  for (const auto& pt : lep3) {
    const ReducedModel m{a, kappa, pt.eps, pt.delta};
    const auto inv = cubic_invariants(m);
    const auto spec = cardano_eigenvalues(inv);
    EXPECT_TRUE(spec.degenerate);
    for (int i = 1; i < 4; ++i) EXPECT_LT(std::abs(spec.E[i] - inv.shift), 1e-8 * m.rate_scale());
    // characteristic polynomial of the oracle generator is x (x - shift)^3
    const auto c = oracle::charpoly(oracle::two_level_generator(a, kappa, pt.eps, pt.delta));
    const double e = inv.shift;
    const double s = m.rate_scale();
    EXPECT_LT(std::abs(c[3] + 3.0 * e), 1e-12 * s);
    EXPECT_LT(std::abs(c[2] - 3.0 * e * e), 1e-9 * s * s);
    EXPECT_LT(std::abs(c[1] + e * e * e), 1e-9 * s * s * s);
  }
}

TEST(Projection, FullLiouvillianOntoCatBlock) {
  const auto base = model::params_from_experiment(6.7, 15.5, 1.0 / 15.5, 0.74, 0.0);
  const int dim = 40;
  const auto basis = fock::cat_basis(base.alpha(), dim);
  for (double d_mhz : {-0.5, 0.0, 0.3}) {
    for (double e_mhz : {0.0, 0.74}) {
      const auto p = base.with_drive(model::mhz_to_angular(e_mhz)).with_delta(model::mhz_to_angular(d_mhz));
      const auto proj = dynamics::project_generator(liouville::build_liouvillian(p, dim), basis);
      const auto red = reduced_liouvillian(p);
      EXPECT_LT((proj - red).cwiseAbs().maxCoeff(), 1e-6) << d_mhz << " " << e_mhz;
    }
  }
}
