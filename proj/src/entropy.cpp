#include "qbeckner/entropy.hpp"

#include <cmath>
#include <limits>

namespace qb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_div(double v) { return (v < 0.0 && v > -kPsdFloor) ? 0.0 : v; }

// Eigenvalues of A^dag A, floored at zero.
RVec gram_values(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(herm(A.adjoint() * A), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseMax(0.0);
}

// Restrict (rho, sigma) to the support of sigma. False if rho leaks outside it.
bool compress(const Mat& rho, const Mat& sigma, Mat& r, Mat& s) {
  Eigh e = eigh(sigma);
  int n = 0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) n += e.values(i) > kSupportFloor;
  if (n == e.values.size()) {
    r = rho;
    s = sigma;
    return true;
  }
  Mat P = e.vectors.rightCols(n);
  Mat inside = P * (P.adjoint() * rho * P) * P.adjoint();
  if ((rho - inside).cwiseAbs().maxCoeff() > kSupportFloor) return false;
  r = herm(P.adjoint() * rho * P);
  s = herm(P.adjoint() * sigma * P);
  return true;
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

double weighted_p_norm(const Mat& X, const Eigh& sigma, double p) {
  if (!(p > 0)) fail(Errc::DomainViolation, "weighted norm needs p > 0");
  if (sigma.values(0) < kStrictFloor) fail(Errc::SingularState, "weighted norm needs full-rank sigma");
  if (std::isinf(p)) return std::sqrt(gram_values(X).maxCoeff());
  RVec g = gram_values(gamma_apply(sigma, 1.0 / p, X));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) acc += std::pow(g(i), p / 2);
  return std::pow(acc, 1.0 / p);
}

double weighted_p_norm(const Mat& X, const Mat& sigma, double p) {
  return weighted_p_norm(X, full_rank_eigh(sigma), p);
}

Mat power_operator(const Mat& X, const Eigh& sigma, double q, double p) {
  if (q == 0.0 || p == 0.0) fail(Errc::ZeroExponent, "power operator exponents must be nonzero");
  if (sigma.values(0) < kStrictFloor) fail(Errc::SingularState, "power operator needs full-rank sigma");
  Mat A = gamma_apply(sigma, 1.0 / p, X);
  Eigh g = psd_eigh(herm(A.adjoint() * A));
  Mat M = matrix_function(g, fn_power(p / (2 * q)));
  return gamma_apply(sigma, -1.0 / q, M);
}

Mat power_operator(const Mat& X, const Mat& sigma, double q, double p) {
  return power_operator(X, full_rank_eigh(sigma), q, p);
}

double entropy_functional(const Mat& X, const Eigh& sigma, double p) {
  if (p < 1.0) fail(Errc::DomainViolation, "entropy functional needs p >= 1");
  if (sigma.values(0) < kStrictFloor) fail(Errc::SingularState, "entropy needs full-rank sigma");
  Eigh a = psd_eigh(herm(gamma_apply(sigma, 1.0 / p, X)));
  RVec ap(a.values.size());
  double N = 0.0, self = 0.0;
  for (Eigen::Index i = 0; i < ap.size(); ++i) {
    double v = a.values(i);
    ap(i) = v > 0.0 ? std::pow(v, p) : 0.0;
    N += ap(i);
    self += v > 0.0 ? ap(i) * p * std::log(v) : 0.0;
  }
  Mat logs = sigma.compose(sigma.values.array().log().matrix());
  double cross = (a.compose(ap) * logs).trace().real();
  double v = self - cross - xlogx(N);
  return clamp_div(v);
}

double entropy_functional(const Mat& X, const Mat& sigma, double p) {
  return entropy_functional(X, full_rank_eigh(sigma), p);
}

double norm_p_derivative(const Mat& Y, const Mat& sigma, double p) {
  Eigh s = full_rank_eigh(sigma);
  double n = weighted_p_norm(Y, s, p);
  return std::pow(n, 1.0 - p) * entropy_functional(power_operator(Y, s, p, p), s, p) / (p * p);
}

DivergenceValue relative_entropy(const Mat& rho, const Mat& sigma, RelKind kind, double p) {
  DivergenceValue out;
  out.kind = kind == RelKind::Umegaki ? "umegaki" : kind == RelKind::Max ? "max" : "sandwiched";
  out.param = p;
  Mat r, s;
  if (!compress(rho, sigma, r, s)) {
    out.value = kInf;
    return out;
  }
  Eigh se = eigh(s);
  if (kind == RelKind::Sandwiched && std::abs(p - 1.0) >= kNearOne) {
    // D_p = (1/(p-1)) log tr((Gamma^{(1-p)/p} rho)^p)
    Eigh y = psd_eigh(herm(gamma_apply(se, (1.0 - p) / p, r)));
    double t = 0.0;
    for (Eigen::Index i = 0; i < y.values.size(); ++i)
      t += y.values(i) > 0.0 ? std::pow(y.values(i), p) : 0.0;
    out.value = clamp_div(std::log(t) / (p - 1.0));
    return out;
  }
  if (kind == RelKind::Max) {
    Mat M = gamma_apply(se, -1.0, r);
    out.value = clamp_div(std::log(eigh(herm(M)).values.maxCoeff()));
    return out;
  }
  Eigh re = psd_eigh(herm(r));
  double a = 0.0;
  for (Eigen::Index i = 0; i < re.values.size(); ++i) a += xlogx(re.values(i));
  Mat logs = se.compose(se.values.array().log().matrix());
  out.value = clamp_div(a - (r * logs).trace().real());
  return out;
}

DivergenceValue p_divergence(const Mat& rho, const Eigh& sigma, double p) {
  DivergenceValue out{0.0, "p_divergence", p};
  if (!(p > 0)) fail(Errc::DomainViolation, "p-divergence needs p > 0");
  if (std::abs(p - 1.0) < kNearOne) {
    Mat logs = sigma.compose(sigma.values.array().log().matrix());
    Eigh re = psd_eigh(herm(rho));
    double a = 0.0;
    for (Eigen::Index i = 0; i < re.values.size(); ++i) a += xlogx(re.values(i));
    out.value = clamp_div(a - (rho * logs).trace().real());
    return out;
  }
  Eigh y = psd_eigh(herm(gamma_apply(sigma, (1.0 - p) / p, rho)));
  double t = 0.0;
  for (Eigen::Index i = 0; i < y.values.size(); ++i)
    t += y.values(i) > 0.0 ? std::pow(y.values(i), p) : 0.0;
  out.value = clamp_div((t - 1.0) / (p * (p - 1.0)));
  return out;
}

DivergenceValue p_divergence(const Mat& rho, const Mat& sigma, double p) {
  Mat r, s;
  if (!compress(rho, sigma, r, s)) return {kInf, "p_divergence", p};
  return p_divergence(r, eigh(s), p);
}

double variance(const Mat& X, const Mat& sigma) {
  Eigh s = full_rank_eigh(sigma);
  double a = weighted_p_norm(X, s, 2.0), b = weighted_p_norm(X, s, 1.0);
  return clamp_div(a * a - b * b);
}

double q_variance(const Mat& Y, const Mat& sigma, double q) {
  if (q < 1.0 || q >= 2.0) fail(Errc::DomainViolation, "q-variance needs q in [1,2)");
  Eigh s = full_rank_eigh(sigma);
  double a = weighted_p_norm(Y, s, 2.0), b = weighted_p_norm(Y, s, q);
  return clamp_div(a * a - b * b);
}

DivergenceValue chi2_divergence(const Mat& rho, const Mat& sigma, const Fn1& kappa) {
  DivergenceValue out{0.0, "chi2_" + kappa.name, 0.0};
  Mat r, s;
  if (!compress(rho, sigma, r, s)) {
    out.value = kInf;
    return out;
  }
  Eigh e = eigh(s);
  Mat D = e.vectors.adjoint() * (r - s) * e.vectors;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < D.cols(); ++k)
    for (Eigen::Index i = 0; i < D.rows(); ++i) {
      double sk = e.values(k);
      acc += std::norm(D(i, k)) * kappa.f(e.values(i) / sk) / sk;
    }
  out.value = clamp_div(acc);
  return out;
}

double sandwich_k(double p, double c) {
  if (!(c > 1.0)) fail(Errc::DomainViolation, "sandwich constant needs c > 1");
  double u = c - 1.0;
  if (u < 1e-3) {
    // Taylor series in u; the c -> 1 limit is 1/2.
    return 0.5 + (p - 2.0) * u / 6.0 + (p - 2.0) * (p - 3.0) * u * u / 24.0;
  }
  return (std::pow(c, p) - 1.0 - p * u) / (p * u * u * (p - 1.0));
}

SandwichConstants sandwich_constants(const Mat& sigma, double p, double c) {
  Eigh e = full_rank_eigh(sigma);
  return {sandwich_k(p, c), 1.0 / e.values(0)};
}

}  // namespace qb
