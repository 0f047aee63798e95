#include "qbeckner/dirichlet.hpp"
#include "qbeckner/entropy.hpp"
#include "qbeckner/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qb;

namespace {

DbcLindbladian random_model(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_dbc(random_density(d, rng), d, 1, seed);
}

Mat random_pd(int d, Rng& rng) { return random_psd(d, rng) + 0.05 * identity(d); }

}  // namespace

TEST(DirichletForm, ConstantsHaveZeroEnergy) {
  DbcLindbladian L = random_model(3, 1);
  for (double p : {1.0, 1.5, 2.0}) EXPECT_NEAR(dirichlet_form(L, 2.5 * identity(3), p).value, 0.0, 1e-12);
}

TEST(DirichletForm, QuadraticCase) {
  DbcLindbladian L = random_model(3, 2);
  Rng rng(2);
  Mat X = random_pd(3, rng);
  double e2 = dirichlet_form(L, X, 2.0).value;
  double ref = -inner_product(InnerKind::Kms, X, L.apply(X), L.sigma()).real();
  EXPECT_NEAR(e2, ref, 1e-12 * (1 + ref));
}

TEST(DirichletForm, DepolarizingHandValue) {
  DbcLindbladian L = depolarizing(diag_state({0.75, 0.25}), 1.0);
  EXPECT_NEAR(dirichlet_form(L, diag_state({2.0 / 3.0, 2.0}), 2.0).value, 1.0 / 3.0, 1e-13);
}

TEST(DirichletForm, RejectsNonPsd) {
  DbcLindbladian L = random_model(2, 3);
  try {
    dirichlet_form(L, diag_state({1.0, -0.5}), 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPsd);
  }
}

TEST(Representation, AgreesWithDefinition) {
  for (int d : {2, 3}) {
    DbcLindbladian L = random_model(d, 10 + d);
    Rng rng(d);
    for (int t = 0; t < 5; ++t) {
      Mat X = random_pd(d, rng);
      for (double p : {1.0, 1.2, 1.5, 2.0}) EXPECT_LE(representation_check(L, X, p), 1e-8);
    }
    EXPECT_LE(representation_check(L, identity(d), 1.5), 1e-12);
  }
}

TEST(Representation, SymmetricCaseIsGradientNorm) {
  std::vector<JumpTerm> jumps;
  for (const Mat& s : pauli_matrices()) jumps.push_back({std::sqrt(1.0 / 8) * s, 0.0});
  DbcLindbladian L = build_from_jumps(identity(2) / 2.0, jumps);
  Rng rng(4);
  Mat X = random_pd(2, rng);
  double g = 0.0;
  for (std::size_t j = 0; j < L.jumps().size(); ++j)
    g += inner_product(InnerKind::Kms, L.partial(j, X), L.partial(j, X), L.sigma()).real();
  EXPECT_NEAR(dirichlet_form(L, X, 2.0, DirichletRoute::Representation).value, g, 1e-12);
}

TEST(EntropyProduction, MatchesFiniteDifference) {
  DbcLindbladian L = random_model(3, 5);
  Rng rng(55);
  Mat rho = random_density(3, rng);
  for (double p : {1.5, 2.0}) {
    const double h = 1e-5;
    double fp = p_divergence(evolve(L, h, Picture::Schrodinger, rho), L.sigma(), p).value;
    double f0 = p_divergence(rho, L.sigma(), p).value;
    // one-sided start: F(t) at t = h and t = 2h for a second-order forward difference
    double f2 = p_divergence(evolve(L, 2 * h, Picture::Schrodinger, rho), L.sigma(), p).value;
    double fd = -(-3 * f0 + 4 * fp - f2) / (2 * h);
    double ep = entropy_production(L, rho, p);
    EXPECT_NEAR(ep, fd, 1e-5 * ep);
  }
  EXPECT_NEAR(entropy_production(L, L.sigma(), 1.5), 0.0, 1e-12);
}

TEST(EntropyProduction, DepolarizingFlat) {
  Mat s = diag_state({0.75, 0.25});
  DbcLindbladian L = depolarizing(s, 1.0);
  Rng rng(6);
  Mat rho = random_density(2, rng);
  Mat X = gamma_apply(L.sigma_eigh(), -1.0, rho);
  double n2 = weighted_p_norm(X, s, 2.0);
  // F_2(rho_t) = (1/2) e^{-2t} (|X|^2 - 1), so the production rate is |X|^2 - 1.
  EXPECT_NEAR(entropy_production(L, rho, 2.0), n2 * n2 - 1.0, 1e-12);
}

TEST(CarreDuChamp, Basics) {
  DbcLindbladian L = depolarizing(identity(2) / 2.0, 1.0);
  EXPECT_LE(carre_du_champ(L, identity(2), identity(2), 1).norm(), 1e-14);
  Rng rng(7);
  Mat X = random_ginibre(2, rng), Y = random_ginibre(2, rng);
  cplx e2 = -inner_hs(X, L.apply(Y)) / 2.0;
  cplx g = carre_du_champ(L, X, Y, 1).trace() / 2.0;
  EXPECT_LE(std::abs(e2 - g), 1e-12);
  DbcLindbladian N = depolarizing(diag_state({0.75, 0.25}), 1.0);
  try {
    carre_du_champ(N, X, Y, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotSymmetric);
  }
}

TEST(CarreDuChamp, BakryEmeryMarginReported) {
  // Exploratory: record the worst margin of Gamma_2 - a Gamma at a = gamma / 2.
  DbcLindbladian L = depolarizing(identity(2) / 2.0, 1.0);
  Rng rng(8);
  double worst = 1e300;
  for (int t = 0; t < 50; ++t) {
    Mat X = random_hermitian(2, rng);
    Mat m = carre_du_champ(L, X, X, 2) - 0.5 * carre_du_champ(L, X, X, 1);
    worst = std::min(worst, eigh(herm(m)).values(0));
  }
  RecordProperty("be_margin", std::to_string(worst));
  EXPECT_TRUE(std::isfinite(worst));
}

TEST(Properties, StroockVaropoulos) {
  Rng rng(9);
  int count = 0;
  for (int trial = 0; trial < 40; ++trial) {
    int d = 2 + trial % 2;
    DbcLindbladian L = random_model(d, 100 + trial);
    Mat X = random_pd(d, rng);
    const Eigh& s = L.sigma_eigh();
    double p = 1.0 + rng.uniform(), q = p + (2.0 - p) * rng.uniform();
    double ep = dirichlet_form(L, herm(power_operator(X, s, p, 2.0)), p).value;
    double eq = dirichlet_form(L, herm(power_operator(X, s, q, 2.0)), q).value;
    EXPECT_GE(ep - eq, -1e-9);
    ++count;
  }
  EXPECT_EQ(count, 40);
}

TEST(Properties, LpRegularity) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    int d = 2 + trial % 2;
    DbcLindbladian L = random_model(d, 200 + trial);
    Mat X = random_pd(d, rng);
    for (double p : {1.25, 1.5, 2.0}) {
      double e2 = dirichlet_form(L, herm(power_operator(X, L.sigma_eigh(), 2.0, p)), 2.0).value;
      double ep = dirichlet_form(L, X, p).value;
      EXPECT_GE(ep - e2, -1e-9);
      EXPECT_GE(p * p / (4 * (p - 1)) * e2 - ep, -1e-9);
    }
  }
}

TEST(Properties, NonnegativeOnCone) {
  Rng rng(11);
  DbcLindbladian L = random_model(3, 11);
  for (int t = 0; t < 20; ++t) {
    Mat X = random_psd(3, rng);
    for (double p : {1.1, 1.7}) EXPECT_GE(dirichlet_form(L, X, p).value, 0.0);
  }
}
