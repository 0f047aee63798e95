#include "qbeckner/random.hpp"
#include "qbeckner/semigroup.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

using namespace qb;

namespace {

Mat sigma_star() { return diag_state({0.75, 0.25}); }

Mat rotated_state(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(d, rng);
}

}  // namespace

TEST(BuildFromJumps, PauliJumpsGiveDepolarizing) {
  std::vector<JumpTerm> jumps;
  for (const Mat& s : pauli_matrices()) jumps.push_back({std::sqrt(1.0 / 8) * s, 0.0});
  Mat sig = identity(2) / 2.0;
  DbcLindbladian L = build_from_jumps(sig, jumps);
  EXPECT_EQ(L.jumps().size(), 3u);
  Rng rng(1);
  Mat X = random_ginibre(2, rng);
  // sum_k s_k X s_k = 2 tr(X) I - X
  Mat expect = 0.5 * X.trace() * identity(2) - X;
  EXPECT_LE((L.apply(X) - expect).norm(), 1e-12);
}

TEST(BuildFromJumps, SingleUnitGetsPartner) {
  Mat V = matrix_unit(2, 0, 1);
  DbcLindbladian L = build_from_jumps(sigma_star(), {{V, -std::log(3.0)}});
  ASSERT_EQ(L.jumps().size(), 2u);
  EXPECT_NEAR(L.jumps()[1].omega, std::log(3.0), 1e-15);
  EXPECT_LE(L.residuals().worst(), 1e-10);
}

TEST(BuildFromJumps, WrongFrequencyRejected) {
  Mat V = matrix_unit(2, 0, 1);
  try {
    build_from_jumps(sigma_star(), {{V, std::log(3.0)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotModularEigenvector);
  }
}

TEST(BuildFromJumps, EmptyGivesZero) {
  DbcLindbladian L = build_from_jumps(sigma_star(), {});
  EXPECT_EQ(L.generator().matrix.norm(), 0.0);
  EXPECT_EQ(primitivity(L).kernel_dimension, 4);
}

TEST(Depolarizing, HandValues) {
  DbcLindbladian L = depolarizing(sigma_star(), 1.0);
  EXPECT_LE(L.apply(identity(2)).norm(), 1e-14);
  EXPECT_LE(L.apply_dual(sigma_star()).norm(), 1e-14);
  Mat X = diag_state({1.0, -1.0});
  Mat r = L.apply(X);
  EXPECT_NEAR(r(0, 0).real(), -0.5, 1e-14);
  EXPECT_NEAR(r(1, 1).real(), 1.5, 1e-14);
  // jumps reproduce the generator
  Superoperator G = generator_from_jumps(L.sigma(), L.jumps());
  EXPECT_LE(rel_diff(G.matrix, L.generator().matrix), 1e-10);
}

TEST(Depolarizing, SchrodingerIsExactMixing) {
  Mat sig = rotated_state(3, 4);
  DbcLindbladian L = depolarizing(sig, 0.7);
  Rng rng(5);
  Mat rho = random_density(3, rng);
  for (double t : {0.0, 0.3, 2.0}) {
    Mat ex = std::exp(-0.7 * t) * rho + (1 - std::exp(-0.7 * t)) * sig;
    EXPECT_LE((evolve(L, t, Picture::Schrodinger, rho) - ex).norm(), 1e-12);
  }
  PrimitivityReport pr = primitivity(L);
  EXPECT_EQ(pr.kernel_dimension, 1);
  EXPECT_NEAR(pr.spectral_gap, 0.7, 1e-10);
}

TEST(RandomDbc, ConnectedIsPrimitive) {
  for (int d : {2, 3, 4}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      DbcLindbladian L = random_dbc(rotated_state(d, 100 + seed), d - 1, 1, seed);
      EXPECT_EQ(primitivity(L).kernel_dimension, 1);
      EXPECT_LE(L.residuals().worst(), 1e-9);
    }
  }
}

TEST(RandomDbc, Deterministic) {
  Mat sig = rotated_state(3, 8);
  DbcLindbladian a = random_dbc(sig, 3, 1, 42), b = random_dbc(sig, 3, 1, 42);
  EXPECT_EQ((a.generator().matrix - b.generator().matrix).norm(), 0.0);
}

TEST(RandomDbc, EmptyIsZero) {
  DbcLindbladian L = random_dbc(rotated_state(3, 9), 0, 0, 1);
  EXPECT_EQ(L.generator().matrix.norm(), 0.0);
  EXPECT_EQ(primitivity(L).kernel_dimension, 9);
}

TEST(Alicki, RoundTrip) {
  for (int d : {2, 3, 4}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      DbcLindbladian L = random_dbc(rotated_state(d, 200 + seed), d, 2, seed);
      auto jumps = alicki_decompose(L.generator(), L.sigma());
      DbcLindbladian R = build_from_jumps(L.sigma(), jumps);
      EXPECT_LE(rel_diff(R.generator().matrix, L.generator().matrix), 1e-8);
    }
  }
  DbcLindbladian D = depolarizing(identity(2) / 2.0, 1.0);
  EXPECT_LE(rel_diff(build_from_jumps(D.sigma(), D.jumps()).generator().matrix, D.generator().matrix), 1e-8);
}

TEST(Alicki, HamiltonianPartRejected) {
  DbcLindbladian L = depolarizing(sigma_star(), 1.0);
  Mat H = pauli_matrices()[0];
  Mat I = identity(2);
  Mat C = cplx(0, 1) * (Eigen::kroneckerProduct(I, H).eval() - Eigen::kroneckerProduct(H.transpose(), I).eval());
  Superoperator G{2, L.generator().matrix + 0.3 * C};
  try {
    alicki_decompose(G, sigma_star());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ResidualTooLarge);
  }
}

TEST(Alicki, BrokenDetailedBalance) {
  // Wrong rates for a matrix-unit pair: still GKSL, but not sigma-symmetric.
  Mat sig = sigma_star();
  std::vector<JumpTerm> jumps = {{matrix_unit(2, 0, 1), 0.0}, {matrix_unit(2, 1, 0), 0.0}};
  Superoperator G = generator_from_jumps(sig, jumps);
  try {
    alicki_decompose(G, sig);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotDbc);
  }
}

TEST(Derivation, IdentityAndIntegrationByParts) {
  Mat sig = rotated_state(3, 21);
  DbcLindbladian L = random_dbc(sig, 3, 1, 21);
  Rng rng(22);
  Mat X = random_ginibre(3, rng), Y = random_ginibre(3, rng);
  for (std::size_t j = 0; j < L.jumps().size(); ++j) EXPECT_LE(L.partial(j, identity(3)).norm(), 1e-14);
  cplx lhs = -inner_product(InnerKind::Kms, Y, L.apply(X), sig);
  cplx rhs = 0.0;
  for (std::size_t j = 0; j < L.jumps().size(); ++j)
    rhs += inner_product(InnerKind::Kms, L.partial(j, Y), L.partial(j, X), sig);
  EXPECT_LE(std::abs(lhs - rhs), 1e-9 * (1 + std::abs(lhs)));
}

TEST(Derivation, GeneratorFromKmsAdjoint) {
  Mat sig = rotated_state(3, 23);
  DbcLindbladian L = random_dbc(sig, 3, 1, 23);
  Rng rng(24);
  Mat X = random_ginibre(3, rng);
  Mat r = Mat::Zero(3, 3);
  for (std::size_t j = 0; j < L.jumps().size(); ++j) r -= L.partial_adj_kms(j, L.partial(j, X));
  EXPECT_LE((r - L.apply(X)).norm(), 1e-10 * (1 + r.norm()));
}

TEST(Derivation, DivergenceIsHsAdjointOfGradient) {
  Mat sig = rotated_state(3, 25);
  DbcLindbladian L = random_dbc(sig, 3, 1, 25);
  Rng rng(26);
  Mat X = random_ginibre(3, rng);
  std::vector<Mat> B;
  for (std::size_t j = 0; j < L.jumps().size(); ++j) B.push_back(random_ginibre(3, rng));
  auto g = L.gradient(X);
  cplx a = 0.0;
  for (std::size_t j = 0; j < B.size(); ++j) a += inner_hs(B[j], g[j]);
  cplx b = -inner_hs(L.divergence(B), X);
  EXPECT_LE(std::abs(a - b), 1e-11 * (1 + std::abs(a)));
  try {
    L.partial(L.jumps().size(), X);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IndexOutOfRange);
  }
}

TEST(Evolution, LongTimeLimit) {
  Mat sig = rotated_state(3, 27);
  DbcLindbladian L = random_dbc(sig, 2, 1, 27);
  PrimitivityReport pr = primitivity(L);
  ASSERT_EQ(pr.kernel_dimension, 1);
  Rng rng(28);
  Mat X = random_hermitian(3, rng);
  Mat r = evolve(L, 40.0 / pr.spectral_gap, Picture::Heisenberg, X);
  EXPECT_LE((r - (sig * X).trace() * identity(3)).norm(), 1e-6 * (1 + X.norm()));
  Mat rho = random_density(3, rng);
  Mat rt = evolve(L, 0.7, Picture::Schrodinger, rho);
  EXPECT_NEAR(rt.trace().real(), 1.0, 1e-10);
  EXPECT_GE(eigh(herm(rt)).values(0), -1e-8);
  EXPECT_LE((evolve(L, 0.0, Picture::Heisenberg, X) - X).norm(), 0.0);
}

TEST(Properties, SelfAdjointInWeightedInnerProducts) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Mat sig = rotated_state(3, 300 + seed);
    DbcLindbladian L = random_dbc(sig, 3, 1, seed);
    Rng rng(seed);
    Mat X = random_ginibre(3, rng), Y = random_ginibre(3, rng);
    for (const Fn1& f : {fn_power(0.5), fn_identity(), fn_phi(1.5)}) {
      cplx a = inner_product(InnerKind::FWeighted, X, L.apply(Y), sig, 0, &f);
      cplx b = inner_product(InnerKind::FWeighted, L.apply(X), Y, sig, 0, &f);
      EXPECT_LE(std::abs(a - b), 1e-9 * (1 + std::abs(a)));
    }
  }
}

TEST(Properties, JumpwiseWeightedIdentity) {
  // -<Y, L X>_{sigma,s} = sum_j e^{(1/2 - s) w_j} <d_j Y, d_j X>_{sigma,s}
  Mat sig = rotated_state(3, 31);
  DbcLindbladian L = random_dbc(sig, 3, 1, 31);
  Rng rng(32);
  Mat X = random_ginibre(3, rng), Y = random_ginibre(3, rng);
  for (double s : {0.3, 0.7}) {
    cplx lhs = -inner_product(InnerKind::SWeighted, Y, L.apply(X), sig, s);
    cplx rhs = 0.0;
    for (std::size_t j = 0; j < L.jumps().size(); ++j)
      rhs += std::exp((0.5 - s) * L.jumps()[j].omega) *
             inner_product(InnerKind::SWeighted, L.partial(j, Y), L.partial(j, X), sig, s);
    EXPECT_LE(std::abs(lhs - rhs), 1e-9 * (1 + std::abs(lhs)));
  }
}

TEST(Properties, DualSemigroupCompletelyPositive) {
  Mat sig = rotated_state(3, 33);
  DbcLindbladian L = random_dbc(sig, 3, 2, 33);
  int d = 3;
  for (double t : {0.05, 0.5, 3.0}) {
    Superoperator P = L.propagator(t).adjoint();
    Mat choi = Mat::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        choi += Eigen::kroneckerProduct(matrix_unit(d, i, k), P.apply(matrix_unit(d, i, k))).eval();
    EXPECT_GE(eigh(herm(choi)).values(0), -1e-8);
  }
}

TEST(Properties, DecompositionIndependence) {
  Mat sig = rotated_state(3, 35);
  DbcLindbladian L = random_dbc(sig, 3, 1, 35);
  DbcLindbladian R = build_from_jumps(sig, alicki_decompose(L.generator(), sig));
  Rng rng(36);
  Mat X = random_ginibre(3, rng);
  double a = 0, b = 0;
  for (std::size_t j = 0; j < L.jumps().size(); ++j)
    a += inner_product(InnerKind::Kms, L.partial(j, X), L.partial(j, X), sig).real();
  for (std::size_t j = 0; j < R.jumps().size(); ++j)
    b += inner_product(InnerKind::Kms, R.partial(j, X), R.partial(j, X), sig).real();
  EXPECT_NEAR(a, b, 1e-8 * (1 + a));
}
