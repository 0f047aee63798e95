#include "qbeckner/dirichlet.hpp"

#include "qbeckner/entropy.hpp"

#include <cmath>

namespace qb {

namespace {

double clamp_form(double v) { return (v < 0.0 && v > -1e-9) ? 0.0 : v; }

void require_psd(const Eigh& e) {
  if (e.values.size() && e.values(0) < -kPsdFloor) fail(Errc::NotPsd, "Dirichlet form needs X >= 0");
}

double kms(const DbcLindbladian& L, const Mat& A, const Mat& B) {
  Mat h = L.sigma_pow(0.5);
  return (h * A.adjoint() * h * B).trace().real();
}

}  // namespace

DirichletValue dirichlet_form(const DbcLindbladian& L, const Mat& X, double p, const Eigh& Xeig,
                              DirichletRoute route) {
  if (p < 1.0) fail(Errc::DomainViolation, "Dirichlet form needs p >= 1");
  require_psd(Xeig);
  DirichletValue out{0.0, p, route};
  const Eigh& sig = L.sigma_eigh();
  const bool near_one = std::abs(p - 1.0) < kNearOne;
  if (route == DirichletRoute::Definition) {
    Mat LX = L.apply(X);
    if (near_one) {
      Mat G = gamma_apply(sig, 1.0, X);
      Mat diff = mlog(herm(G)) - sig.compose(sig.values.array().log().matrix());
      out.value = -0.25 * kms(L, diff, LX);
    } else {
      double ph = p / (p - 1.0);
      out.value = -(ph * p / 4.0) * kms(L, power_operator(X, sig, ph, p), LX);
    }
    out.value = clamp_form(out.value);
    return out;
  }
  if (L.jumps().empty() && L.generator().matrix.norm() > 0)
    fail(Errc::NoJumps, "representation route needs jump operators");
  Mat GX = herm(gamma_apply(sig, near_one ? 1.0 : 1.0 / p, X));
  Eigh ge = eigh(GX);
  if (ge.values(0) <= 0.0) fail(Errc::SingularState, "representation route needs X > 0");
  double acc = 0.0;
  for (std::size_t j = 0; j < L.jumps().size(); ++j) {
    double w = L.jumps()[j].omega;
    Mat D = gamma_apply(sig, near_one ? 1.0 : 1.0 / p, L.partial(j, X));
    Eigh a{ge.values * std::exp(w / (2 * (near_one ? 1.0 : p))), ge.vectors};
    Eigh b{ge.values * std::exp(-w / (2 * (near_one ? 1.0 : p))), ge.vectors};
    Mat K = near_one ? double_sum_apply(divdiff(fn_log()), a, b, D)
                     : double_sum_apply(fn2_fp_divdiff(p), a, b, D);
    acc += inner_hs(D, K).real();
  }
  out.value = clamp_form((near_one ? 0.25 : p * p / 4.0) * acc);
  return out;
}

DirichletValue dirichlet_form(const DbcLindbladian& L, const Mat& X, double p, DirichletRoute route) {
  return dirichlet_form(L, X, p, eigh(X), route);
}

double representation_check(const DbcLindbladian& L, const Mat& X, double p) {
  if (L.jumps().empty()) fail(Errc::NoJumps, "representation check needs jump operators");
  double a = dirichlet_form(L, X, p, DirichletRoute::Definition).value;
  double b = dirichlet_form(L, X, p, DirichletRoute::Representation).value;
  return std::abs(a - b) / (1.0 + std::abs(a));
}

double entropy_production(const DbcLindbladian& L, const Mat& rho, double p) {
  Mat X = herm(gamma_apply(L.sigma_eigh(), -1.0, rho));
  double e = dirichlet_form(L, X, p).value;
  return std::abs(p - 1.0) < kNearOne ? 4.0 * e : 4.0 / (p * p) * e;
}

bool is_tracial(const DbcLindbladian& L, double tol) {
  int d = L.dim();
  return (L.sigma() - identity(d) / static_cast<double>(d)).cwiseAbs().maxCoeff() <= tol;
}

Mat carre_du_champ(const DbcLindbladian& L, const Mat& X, const Mat& Y, int order) {
  if (!is_tracial(L)) fail(Errc::NotSymmetric, "carre du champ calculus needs sigma = I/d");
  auto gam = [&](const Mat& A, const Mat& B) -> Mat {
    return 0.5 * (L.apply(A.adjoint() * B) - A.adjoint() * L.apply(B) - L.apply(A).adjoint() * B);
  };
  if (order == 1) return gam(X, Y);
  if (order == 2) return -0.5 * (gam(X, L.apply(Y)) + gam(L.apply(X), Y) - L.apply(gam(X, Y)));
  fail(Errc::IndexOutOfRange, "carre du champ order must be 1 or 2");
}

}  // namespace qb
