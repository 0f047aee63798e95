#include "qbeckner/core.hpp"
#include "qbeckner/random.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace qb;

namespace {

Mat random_pd(int d, Rng& rng) {
  Mat A = random_psd(d, rng);
  return A + 0.1 * identity(d);
}

}  // namespace

TEST(Eigh, DiagonalInput) {
  Mat s = diag_state({0.75, 0.25});
  Eigh e = eigh(s);
  EXPECT_NEAR(e.values(0), 0.25, 1e-15);
  EXPECT_NEAR(e.values(1), 0.75, 1e-15);
  EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1.0, 1e-15);
}

TEST(Eigh, PauliX) {
  Mat x(2, 2);
  x << 0, 1, 1, 0;
  Eigh e = eigh(x);
  EXPECT_NEAR(e.values(0), -1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
}

TEST(Eigh, Reconstruction) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Mat H = random_hermitian(4, rng);
    Eigh e = eigh(H);
    EXPECT_LE((e.compose(e.values) - H).norm(), 1e-10 * H.norm());
    EXPECT_LE((e.vectors.adjoint() * e.vectors - identity(4)).norm(), 1e-12 * 4);
    for (int i = 1; i < 4; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  }
}

TEST(Eigh, RejectsNonHermitian) {
  Mat A(2, 2);
  A << 1, 2, 0, 1;
  try {
    eigh(A);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::NonHermitian);
  }
}

TEST(MatrixFunction, IdentityAndSqrt) {
  Rng rng(3);
  Mat H = random_hermitian(3, rng);
  EXPECT_LE((matrix_function(H, fn_identity()) - H).norm(), 1e-12);
  Mat D = diag_state({4.0, 9.0});
  Mat r = matrix_function(D, fn_power(0.5));
  EXPECT_NEAR(r(0, 0).real(), 2.0, 1e-14);
  EXPECT_NEAR(r(1, 1).real(), 3.0, 1e-14);
}

TEST(MatrixFunction, PowerMatchesIndependentRoutine) {
  Rng rng(5);
  Mat A = random_pd(3, rng);
  Mat mine = matrix_function(A, fn_power(0.5));
  // Schur-based matrix power from Eigen's unsupported module.
  Mat other = A.pow(0.5);
  EXPECT_LE((mine - other).norm(), 1e-10 * other.norm());
}

TEST(MatrixFunction, LogDomainViolation) {
  Mat D = diag_state({1.0, -0.5});
  try {
    matrix_function(D, fn_log());
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::DomainViolation);
  }
}

TEST(Superoperators, VectorizationConvention) {
  Rng rng(7);
  Mat A = random_ginibre(3, rng), B = random_ginibre(3, rng), X = random_ginibre(3, rng);
  EXPECT_LE((super_left(A).apply(X) - A * X).norm(), 1e-13);
  EXPECT_LE((super_right(B).apply(X) - X * B).norm(), 1e-13);
}

TEST(Superoperators, ModularAndGamma) {
  Mat s = diag_state({0.75, 0.25});
  Superoperator D = super_modular(s);
  Mat E01 = Mat::Zero(2, 2);
  E01(0, 1) = 1.0;
  EXPECT_NEAR(D.apply(E01)(0, 1).real(), 3.0, 1e-14);
  EXPECT_LE((super_gamma_power(s, 1.0).apply(identity(2)) - s).norm(), 1e-15);
  Mat mm = identity(3) / 3.0;
  EXPECT_LE((super_modular(mm).matrix - super_identity(3).matrix).norm(), 1e-14);
}

TEST(Superoperators, SingularState) {
  Mat s = diag_state({1.0, 0.0});
  try {
    super_modular(s);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::SingularState);
  }
}

TEST(Superoperators, JKernelPowerIsWeightedInner) {
  Rng rng(17);
  Mat s = random_density(3, rng);
  Mat X = random_ginibre(3, rng), Y = random_ginibre(3, rng);
  double sv = 0.3;
  Fn1 f = fn_power(1.0 - sv);
  cplx a = inner_product(InnerKind::FWeighted, X, Y, s, 0.0, &f);
  cplx b = inner_product(InnerKind::SWeighted, X, Y, s, sv);
  EXPECT_LE(std::abs(a - b), 1e-12);
  Superoperator J = super_j_kernel(s, f);
  EXPECT_LE(std::abs(inner_hs(X, J.apply(Y)) - b), 1e-12);
}

TEST(DoubleSum, ConstantKernelIsIdentity) {
  Rng rng(9);
  Mat A = random_hermitian(3, rng), B = random_hermitian(3, rng), X = random_ginibre(3, rng);
  EXPECT_LE((double_sum_apply(fn2_const(1.0), A, B, X) - X).norm(), 1e-12);
}

TEST(DoubleSum, LeftKernelIsLeftMultiplication) {
  Rng rng(10);
  Mat A = random_pd(3, rng), B = random_pd(3, rng), X = random_ginibre(3, rng);
  Fn1 g = fn_power(1.5);
  Mat r = double_sum_apply(fn2_left(g), A, B, X);
  EXPECT_LE((r - matrix_function(A, g) * X).norm(), 1e-10 * r.norm());
}

TEST(DoubleSum, ChainRuleForDerivation) {
  Rng rng(12);
  Fn1 sq{"square", [](double x) { return x * x; }, [](double x) { return 2 * x; }};
  for (int trial = 0; trial < 10; ++trial) {
    Mat A = random_hermitian(4, rng), B = random_hermitian(4, rng), V = random_ginibre(4, rng);
    Mat lhs = V * B * B - A * A * V;
    Mat rhs = double_sum_apply(divdiff(sq), A, B, V * B - A * V);
    EXPECT_LE((lhs - rhs).norm(), 1e-10 * (1 + lhs.norm()));
  }
}

TEST(DoubleSum, DegenerateBranchUsesDerivative) {
  Mat A = diag_state({1.0, 1.0 + 1e-12});
  Mat X = Mat::Ones(2, 2);
  Mat r = double_sum_apply(divdiff(fn_log()), A, A, X);
  EXPECT_NEAR(r(0, 1).real(), 1.0, 1e-9);
}

TEST(DoubleSum, PositivityForPositiveKernel) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Mat A = random_pd(3, rng), B = random_pd(3, rng), X = random_ginibre(3, rng);
    cplx v = inner_hs(X, double_sum_apply(fn2_theta(1.4), A, B, X));
    EXPECT_GT(v.real(), 0.0);
    EXPECT_LE(std::abs(v.imag()), 1e-10 * std::abs(v));
  }
}

TEST(DoubleSum, FpDivdiffMonotonicity) {
  Rng rng(14);
  for (double p : {1.2, 1.5, 1.9}) {
    for (int trial = 0; trial < 10; ++trial) {
      double c = 1.0 + rng.uniform();
      Mat X1 = random_pd(3, rng), X2 = random_pd(3, rng);
      Mat Y1 = X1 / c + random_psd(3, rng), Y2 = X2 / c + random_psd(3, rng);
      Mat A = random_ginibre(3, rng);
      Fn2 f = fn2_fp_divdiff(p);
      double y = inner_hs(A, double_sum_apply(f, Y1, Y2, A)).real();
      double x = inner_hs(A, double_sum_apply(f, X1, X2, A)).real();
      EXPECT_LE(y, std::pow(c, 2 - p) * x * (1 + 1e-10));
    }
  }
}

TEST(PartialDivdiff, SeparableKernel) {
  Rng rng(15);
  Mat A = random_pd(3, rng), B = random_pd(3, rng);
  Mat X = random_ginibre(3, rng), Y = random_ginibre(3, rng);
  Fn1 g = fn_power(0.7);
  Fn2 f;
  f.name = "x g(y)";
  f.f = [g](double x, double y) { return x * g.f(y); };
  f.dx = [g](double, double y) { return g.f(y); };
  f.dy = [g](double x, double y) { return x * g.df(y); };
  f.lo = 0.0;
  f.lo_open = true;
  Mat r = partial_divdiff_apply(f, 2, A, B, X, Y);
  Mat expect = A * X * double_sum_apply(divdiff(g), B, B, Y);
  EXPECT_LE((r - expect).norm(), 1e-10 * expect.norm());
}

TEST(PartialDivdiff, FiniteDifferenceChainRule) {
  Rng rng(16);
  Fn2 f = fn2_theta(1.5);
  for (int trial = 0; trial < 5; ++trial) {
    Mat A = random_pd(3, rng), B = random_pd(3, rng);
    Mat H = random_hermitian(3, rng), Y = random_ginibre(3, rng);
    const double h = 1e-5;
    Mat fd1 = (double_sum_apply(f, Mat(A + h * H), B, Y) - double_sum_apply(f, Mat(A - h * H), B, Y)) / (2 * h);
    Mat an1 = partial_divdiff_apply(f, 1, A, B, H, Y);
    EXPECT_LE((fd1 - an1).norm(), 1e-6 * an1.norm());
    Mat fd2 = (double_sum_apply(f, A, Mat(B + h * H), Y) - double_sum_apply(f, A, Mat(B - h * H), Y)) / (2 * h);
    Mat an2 = partial_divdiff_apply(f, 2, A, B, Y, H);
    EXPECT_LE((fd2 - an2).norm(), 1e-6 * an2.norm());
  }
}

TEST(ThetaKernel, ClosedFormAndDiagonal) {
  for (double p : {1.1, 1.5, 2.0}) {
    for (double x : {0.1, 0.7, 2.5}) {
      for (double y : {0.2, 0.7000001, 3.0}) {
        double t = theta_p(p, x, y);
        if (std::abs(x - y) > 1e-3) {
          double ref = (p - 1) * (x - y) / (std::pow(x, p - 1) - std::pow(y, p - 1));
          EXPECT_NEAR(t, ref, 1e-12 * ref);
        }
      }
      EXPECT_NEAR(theta_p(p, x, x), std::pow(x, 2 - p), 1e-13);
      EXPECT_NEAR(theta_p_dx(p, x, x), (2 - p) / 2 * std::pow(x, 1 - p), 1e-10);
    }
  }
  EXPECT_NEAR(theta_log(2.0, 1.0), 1.0 / std::log(2.0), 1e-14);
}

TEST(InnerProduct, MaximallyMixedReducesToNormalizedHs) {
  Rng rng(18);
  Mat s = identity(3) / 3.0;
  Mat X = random_ginibre(3, rng), Y = random_ginibre(3, rng);
  cplx ref = inner_hs(X, Y) / 3.0;
  Fn1 f = fn_phi(1.5);
  for (auto k : {InnerKind::Kms, InnerKind::Gns, InnerKind::SWeighted})
    EXPECT_LE(std::abs(inner_product(k, X, Y, s, 0.2) - ref), 1e-13);
  EXPECT_LE(std::abs(inner_product(InnerKind::FWeighted, X, Y, s, 0.0, &f) - ref), 1e-12);
}

TEST(InnerProduct, NormalizationAndSymmetry) {
  Rng rng(19);
  Mat s = random_density(3, rng);
  for (double sv : {0.0, 0.3, 0.5, 1.0})
    EXPECT_NEAR(inner_product(InnerKind::SWeighted, identity(3), identity(3), s, sv).real(), 1.0, 1e-12);
  Mat X = random_ginibre(3, rng), Y = random_ginibre(3, rng);
  cplx a = inner_product(InnerKind::Kms, X, Y, s);
  cplx b = inner_product(InnerKind::Kms, Y, X, s);
  EXPECT_LE(std::abs(a - std::conj(b)), 1e-12);
  EXPECT_GT(inner_product(InnerKind::Kms, X, X, s).real(), 0.0);
}

TEST(Inequalities, ArakiLiebThirring) {
  Rng rng(20);
  for (int trial = 0; trial < 20; ++trial) {
    Mat A = random_psd(3, rng), B = random_psd(3, rng);
    for (double r : {0.3, 0.5, 0.9}) {
      for (double q : {1.0, 2.0}) {
        Mat Br = mpow(B, r), Ar = mpow(A, r);
        double lhs = trace_re(mpow(herm(Br * Ar * Br), q));
        double rhs = trace_re(mpow(herm(B * A * B), r * q));
        EXPECT_LE(lhs, rhs * (1 + 1e-10) + 1e-12);
      }
    }
  }
}

TEST(Kernels, PowerDifferenceIdentityAndBounds) {
  for (double p : {1.1, 1.5, 2.0}) {
    Fn1 phi = fn_phi(p), kap = fn_kappa(1.0 / p);
    for (double x = 0.05; x < 20; x *= 1.37) EXPECT_NEAR(phi.f(x) / x, kap.f(x), 1e-12 * kap.f(x));
  }
  for (double a : {-1.0, 0.5, 1.0, 2.0}) {
    Fn1 k = fn_kappa(a);
    for (double x = 0.05; x < 20; x *= 1.37) {
      EXPECT_GE(k.f(x), 2 / (1 + x) - 1e-13);
      EXPECT_LE(k.f(x), (1 + x) / (2 * x) + 1e-13);
    }
  }
}
