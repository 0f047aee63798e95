#include "qbeckner/constants.hpp"
#include "qbeckner/entropy.hpp"
#include "qbeckner/random.hpp"
#include "qbeckner/ricci.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qb;

namespace {

DbcLindbladian random_model(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_dbc(random_density(d, rng), d, 1, seed);
}

Mat traceless(const Mat& X) { return X - X.trace() / double(X.rows()) * identity(static_cast<int>(X.rows())); }

Mat interior_state(const DbcLindbladian& L, Rng& rng) { return herm(0.5 * random_density(L.dim(), rng) + 0.5 * L.sigma()); }

}  // namespace

TEST(Hessian, AtEquilibrium) {
  // L^dag sigma = 0, so only -<U, L^dag D U> survives.
  Rng rng(1);
  DbcLindbladian L = random_model(3, 1);
  for (double p : {1.3, 2.0}) {
    Mat U = traceless(random_hermitian(3, rng));
    double expect = -inner_hs(U, L.apply_dual(Onsager(L, L.sigma(), p).apply(U))).real();
    EXPECT_NEAR(hessian_form(L, L.sigma(), p, U), expect, 1e-10 * (1 + std::abs(expect)));
  }
}

TEST(Hessian, MatchesSecondDifferenceAlongGeodesic) {
  Rng rng(2);
  DbcLindbladian L = random_model(3, 2);
  for (double p : {1.3, 1.7, 2.0}) {
    Mat rho = interior_state(L, rng);
    Mat U = traceless(random_hermitian(3, rng));
    double h = hessian_form(L, rho, p, U);
    double fd = hessian_finite_difference(L, rho, p, U);
    EXPECT_NEAR(h, fd, 1e-5 * (1 + std::abs(h)));
  }
}

TEST(Hessian, PolarizedFormIsSymmetric) {
  Rng rng(3);
  DbcLindbladian L = random_model(3, 3);
  Mat rho = interior_state(L, rng);
  Mat U = traceless(random_hermitian(3, rng)), V = traceless(random_hermitian(3, rng));
  double uv = hessian_bilinear(L, rho, 1.4, U, V), vu = hessian_bilinear(L, rho, 1.4, V, U);
  EXPECT_NEAR(uv, vu, 1e-12 * (1 + std::abs(uv)));
  EXPECT_NEAR(hessian_bilinear(L, rho, 1.4, U, U), hessian_form(L, rho, 1.4, U), 1e-10);
}

TEST(Hessian, DepolarizingLowerBound) {
  Rng rng(4);
  for (int d : {2, 3}) {
    DbcLindbladian L = depolarizing(identity(d) / double(d), 1.0);
    for (double p : {1.2, 1.6, 2.0}) {
      for (int t = 0; t < 4; ++t) {
        Mat rho = random_density(d, rng);
        Mat U = traceless(random_hermitian(d, rng));
        double form = Onsager(L, rho, p).form(U);
        EXPECT_GE(hessian_form(L, rho, p, U), p / 2 * form - 1e-10);
      }
    }
  }
}

TEST(Ricci, DepolarizingAboveHalfRateTimesP) {
  for (int d : {2, 3}) {
    for (double gamma : {0.5, 1.0}) {
      DbcLindbladian L = depolarizing(identity(d) / double(d), gamma);
      for (double p : {1.1, 1.5, 2.0}) {
        RicciEstimate est = ricci_estimate(L, p, {16, 7});
        EXPECT_GE(est.kappa, gamma * p / 2 - 1e-6) << "d=" << d << " p=" << p;
        EXPECT_EQ(est.samples, 16);
      }
    }
  }
}

TEST(Ricci, ScalesWithGenerator) {
  for (double p : {1.3, 1.8}) {
    double k1 = ricci_estimate(depolarizing(diag_state({0.7, 0.3}), 1.0), p, {12, 5}).kappa;
    double k2 = ricci_estimate(depolarizing(diag_state({0.7, 0.3}), 2.0), p, {12, 5}).kappa;
    EXPECT_NEAR(k2, 2 * k1, 1e-6);
  }
}

TEST(Ricci, SlotsAgree) {
  DbcLindbladian L = random_model(3, 6);
  for (double p : {1.3, 1.7}) {
    double s = ricci_estimate(L, p, {8, 1, KernelSlot::Symmetrized}).kappa;
    for (KernelSlot slot : {KernelSlot::First, KernelSlot::Second})
      EXPECT_NEAR(ricci_estimate(L, p, {8, 1, slot}).kappa, s, 1e-8);
  }
}

TEST(Ricci, WitnessReproducesQuotient) {
  DbcLindbladian L = random_model(3, 8);
  RicciEstimate est = ricci_estimate(L, 1.5, {8, 2});
  const Mat& U = est.worst_direction;
  double q = hessian_form(L, est.worst_state, 1.5, U) / Onsager(L, est.worst_state, 1.5).form(U);
  EXPECT_NEAR(q, est.kappa, 1e-8 * (1 + std::abs(est.kappa)));
  // and no sampled direction does better
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    Mat V = traceless(random_hermitian(3, rng));
    double r = hessian_form(L, est.worst_state, 1.5, V) / Onsager(L, est.worst_state, 1.5).form(V);
    EXPECT_GE(r, est.kappa - 1e-10);
  }
}

TEST(Ricci, ImpliesClassicalBecknerConstant) {
  for (int d : {2, 3}) {
    DbcLindbladian L = depolarizing(identity(d) / double(d), 1.0);
    for (double p : {1.1, 1.5, 2.0}) {
      double kappa = ricci_estimate(L, p, {16, 3}).kappa;
      EXPECT_GE(depol_classical(p, d), kappa * p / 2 - 1e-4) << "d=" << d << " p=" << p;
    }
  }
}

TEST(Ricci, SamplesStartAtEquilibrium) {
  DbcLindbladian L = random_model(3, 9);
  auto s = ricci_sample_states(L, 5, 1);
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(fro(s[0] - L.sigma()), 0.0);
  EXPECT_EQ(fro(s[1] - identity(3) / 3.0), 0.0);
  for (const Mat& r : s) EXPECT_NEAR(r.trace().real(), 1.0, 1e-12);
}

TEST(Checks, EquilibriumIsTight) {
  DbcLindbladian L = depolarizing(identity(2) / 2.0, 1.0);
  CheckReport r = inequality_checks(L, 1.5, 0.75, {L.sigma()},
                                    {InequalityCheck::Hwi, InequalityCheck::BecknerFromRicci, InequalityCheck::Tcp});
  ASSERT_EQ(r.entries.size(), 3u);
  for (const auto& e : r.entries) {
    EXPECT_NEAR(e.lhs, 0.0, 1e-12) << e.check;
    EXPECT_NEAR(e.rhs, 0.0, 1e-12) << e.check;
    EXPECT_TRUE(e.pass);
  }
}

TEST(Checks, DepolarizingFlatCase) {
  Rng rng(10);
  DbcLindbladian L = depolarizing(identity(2) / 2.0, 1.0);
  std::vector<Mat> states;
  for (int i = 0; i < 4; ++i) states.push_back(random_density(2, rng));
  CheckReport r = inequality_checks(L, 2.0, 1.0, states,
                                    {InequalityCheck::Hwi, InequalityCheck::BecknerFromRicci, InequalityCheck::Tcp,
                                     InequalityCheck::Diameter});
  EXPECT_EQ(r.entries.size(), 16u);
  EXPECT_TRUE(r.all_pass()) << r.worst_slack();
}

TEST(Checks, RicciEstimateFeedsInequalities) {
  Rng rng(11);
  DbcLindbladian L = depolarizing(diag_state({0.6, 0.3, 0.1}), 1.0);
  const double p = 1.5;
  double kappa = ricci_estimate(L, p, {16, 11}).kappa;
  ASSERT_GT(kappa, 0.0);
  std::vector<Mat> states;
  for (int i = 0; i < 3; ++i) states.push_back(interior_state(L, rng));
  CheckReport r = inequality_checks(L, p, kappa, states,
                                    {InequalityCheck::Hwi, InequalityCheck::BecknerFromRicci, InequalityCheck::Tcp,
                                     InequalityCheck::Diameter});
  for (const auto& e : r.entries) EXPECT_TRUE(e.pass) << e.check << " " << e.index << " slack " << e.slack;
}

TEST(Checks, NonPositiveCurvatureRejected) {
  DbcLindbladian L = depolarizing(identity(2) / 2.0, 1.0);
  for (InequalityCheck c : {InequalityCheck::BecknerFromRicci, InequalityCheck::Tcp, InequalityCheck::Diameter}) {
    try {
      inequality_checks(L, 1.5, 0.0, {L.sigma()}, {c});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::NonPositiveCurvature);
    }
  }
  // HWI alone is meaningful for any kappa
  EXPECT_NO_THROW(inequality_checks(L, 1.5, -1.0, {L.sigma()}, {InequalityCheck::Hwi}));
}

TEST(Dynamic, FlatContractionIsExact) {
  // Depolarizing at p = 2: P_t^dag rho - sigma = e^{-t}(rho - sigma), so W scales by e^{-t}.
  Rng rng(12);
  DbcLindbladian L = depolarizing(identity(2) / 2.0, 1.0);
  std::vector<Mat> states{random_density(2, rng), random_density(2, rng)};
  CheckReport r = dynamic_checks(L, 2.0, 1.0, DynamicMode::Contraction, states);
  ASSERT_EQ(r.entries.size(), 3u);
  for (const auto& e : r.entries) EXPECT_NEAR(e.lhs, e.rhs, 0.01 * e.rhs);
}

TEST(Dynamic, ZeroTimeIsEquality) {
  Rng rng(13);
  DbcLindbladian L = random_model(3, 13);
  std::vector<Mat> states{interior_state(L, rng), interior_state(L, rng)};
  CheckReport c = dynamic_checks(L, 1.5, 0.3, DynamicMode::Contraction, states, {0.0});
  ASSERT_EQ(c.entries.size(), 1u);
  EXPECT_NEAR(c.entries[0].slack, 0.0, 1e-9);
  CheckReport g = dynamic_checks(L, 1.5, 0.3, DynamicMode::GradientEstimate, states, {0.0});
  for (const auto& e : g.entries) EXPECT_NEAR(e.slack, 0.0, 1e-12 * (1 + e.rhs));
}

TEST(Dynamic, IntertwiningForDepolarizing) {
  // P_t X = e^{-t} X + (1 - e^{-t}) tr(sigma X) I and tr(sigma d_j X) = 0 for sigma = I/2,
  // so d_j P_t = P_t d_j: the exact rate is 0, and at rate 1 the residual is
  // (1 - e^{-t}) e^{-t} |d_j X|.
  Rng rng(14);
  DbcLindbladian L = depolarizing(identity(2) / 2.0, 1.0);
  std::vector<Mat> states{random_density(2, rng)};
  CheckReport exact = dynamic_checks(L, 1.5, 0.0, DynamicMode::Intertwining, states, {0.1, 0.5, 1.0}, 3);
  for (const auto& e : exact.entries) EXPECT_LE(e.lhs, 1e-10);
  EXPECT_TRUE(exact.all_pass());

  CheckReport off = dynamic_checks(L, 1.5, 1.0, DynamicMode::Intertwining, states, {0.1, 0.5, 1.0}, 3);
  Rng xr(3);
  Mat X = random_ginibre(2, xr);
  X /= fro(X);
  double dmax = 0.0;
  for (std::size_t j = 0; j < L.jumps().size(); ++j) dmax = std::max(dmax, fro(L.partial(j, X)));
  ASSERT_EQ(off.entries.size(), 3u);
  for (const auto& e : off.entries) {
    EXPECT_NEAR(e.lhs, (1 - std::exp(-e.t)) * std::exp(-e.t) * dmax, 1e-12);
    EXPECT_FALSE(e.pass);
  }
}

TEST(Dynamic, GradientEstimateWithRicciBound) {
  Rng rng(15);
  DbcLindbladian L = depolarizing(identity(3) / 3.0, 1.0);
  const double p = 1.5;
  double kappa = ricci_estimate(L, p, {16, 15}).kappa;
  std::vector<Mat> states{random_density(3, rng), random_density(3, rng)};
  CheckReport r = dynamic_checks(L, p, kappa, DynamicMode::GradientEstimate, states);
  EXPECT_EQ(r.entries.size(), 6u);
  for (const auto& e : r.entries) EXPECT_TRUE(e.pass) << e.t << " slack " << e.slack;
}
