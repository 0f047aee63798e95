#include "qbeckner/constants.hpp"

#include "qbeckner/dirichlet.hpp"
#include "qbeckner/entropy.hpp"
#include "qbeckner/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace qb {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kDenomFloor = 1e-8;

using RFn = std::function<double(const RVec&)>;

struct MinResult {
  RVec x;
  double f = kNan;
  double grad_norm = 0.0;
  int iters = 0;
};

RVec num_grad(const RFn& f, const RVec& x) {
  RVec g(x.size());
  RVec y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    y(i) = x(i) + h;
    double fp = f(y);
    y(i) = x(i) - h;
    double fm = f(y);
    y(i) = x(i);
    g(i) = (fp - fm) / (2 * h);
    if (!std::isfinite(g(i))) g(i) = 0.0;
  }
  return g;
}

// BFGS on central-difference gradients with Armijo backtracking.
MinResult bfgs(const RFn& f, RVec x, int max_iters, double tol) {
  const Eigen::Index n = x.size();
  MinResult out;
  double fx = f(x);
  if (!std::isfinite(fx)) {
    out.x = x;
    return out;
  }
  RVec g = num_grad(f, x);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  int quiet = 0;
  int it = 0;
  for (; it < max_iters && quiet < 20; ++it) {
    RVec dir = -H * g;
    double slope = g.dot(dir);
    if (slope >= 0) {
      H.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    if (slope == 0.0) break;
    double t = 1.0, fn = kNan;
    RVec xn;
    bool ok = false;
    for (int k = 0; k < 50; ++k) {
      xn = x + t * dir;
      fn = f(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * t * slope) {
        ok = true;
        break;
      }
      t *= 0.5;
    }
    if (!ok) {
      if (H.isIdentity()) break;
      H.setIdentity();
      ++quiet;
      continue;
    }
    RVec gn = num_grad(f, xn);
    RVec s = xn - x, yv = gn - g;
    double sy = s.dot(yv);
    if (sy > 1e-14 * s.norm() * yv.norm()) {
      double rho = 1.0 / sy;
      Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * yv.transpose()) * H * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
    }
    double rel = std::abs(fn - fx) / std::max(std::abs(fx), 1e-300);
    quiet = rel < tol ? quiet + 1 : 0;
    x = xn;
    fx = fn;
    g = gn;
  }
  out.x = x;
  out.f = fx;
  out.grad_norm = g.norm();
  out.iters = it;
  return out;
}

Mat y_to_mat(const RVec& y, int d) {
  Mat Y(d, d);
  for (int i = 0; i < d * d; ++i) Y(i % d, i / d) = cplx(y(2 * i), y(2 * i + 1));
  return Y;
}

RVec mat_to_y(const Mat& Y) {
  int d = static_cast<int>(Y.rows());
  RVec y(2 * d * d);
  for (int i = 0; i < d * d; ++i) {
    y(2 * i) = Y(i % d, i / d).real();
    y(2 * i + 1) = Y(i % d, i / d).imag();
  }
  return y;
}

// X = Y^dag Y / tr(sigma Y^dag Y)
Mat feasible(const Mat& Y, const Mat& sigma) {
  Mat X = herm(Y.adjoint() * Y);
  return X / (sigma * X).trace().real();
}

struct RatioParts {
  double num = 0.0, den = 0.0;
};

RatioParts ratio_parts(const DbcLindbladian& L, ConstantKind kind, double param, const Mat& X) {
  const Eigh& s = L.sigma_eigh();
  switch (kind) {
    case ConstantKind::Beckner: {
      double p = param;
      double np = std::pow(weighted_p_norm(X, s, p), p);
      double n1 = std::pow((L.sigma() * X).trace().real(), p);
      return {(p - 1.0) * dirichlet_form(L, X, p).value, np - n1};
    }
    case ConstantKind::Mlsi:
      return {dirichlet_form(L, X, 1.0).value, entropy_functional(X, s, 1.0)};
    case ConstantKind::Lsi:
      return {dirichlet_form(L, X, 2.0).value, entropy_functional(X, s, 2.0)};
    case ConstantKind::DualBeckner: {
      double q = param;
      return {(2.0 - q) * dirichlet_form(L, X, 2.0).value, q_variance(X, L.sigma(), q)};
    }
    case ConstantKind::Poincare: {
      Mat Y = X - (L.sigma() * X).trace() * identity(L.dim());
      double num = -inner_product(InnerKind::Kms, Y, L.apply(Y), L.sigma()).real();
      return {num, inner_product(InnerKind::Kms, Y, Y, L.sigma()).real()};
    }
  }
  return {kNan, kNan};
}

void check_param(ConstantKind kind, double param) {
  if (kind == ConstantKind::Beckner && !(param > 1.0 && param <= 2.0))
    fail(Errc::DomainViolation, "Beckner constant needs p in (1, 2]");
  if (kind == ConstantKind::DualBeckner && !(param >= 1.0 && param < 2.0))
    fail(Errc::DomainViolation, "dual Beckner constant needs q in [1, 2)");
}

std::uint64_t start_seed(std::uint64_t seed, int k) {
  return seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull * static_cast<std::uint64_t>(k + 1);
}

Mat start_point(const DbcLindbladian& L, int k, std::uint64_t seed) {
  Rng rng(start_seed(seed, k));
  int d = L.dim();
  Mat G = random_ginibre(d, rng);
  if (k % 2 == 0) return G;
  // near-diagonal in the eigenbasis of sigma
  RVec w(d);
  for (int i = 0; i < d; ++i) w(i) = std::sqrt(0.05 + 2.0 * rng.uniform());
  const Mat& V = L.sigma_eigh().vectors;
  return V * w.cast<cplx>().asDiagonal() * V.adjoint() + 0.1 * G;
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

LedgerEntry entry(std::string name, double lhs, double rhs, bool hard) {
  LedgerEntry e{std::move(name), lhs, rhs, rhs - lhs, hard, false};
  e.pass = e.slack >= -(hard ? kLedgerHardTol : kLedgerSoftTol);
  return e;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double trace_dist(const Mat& a, const Mat& b) { return trace_norm(herm(a - b)); }

}  // namespace

const char* constant_kind_name(ConstantKind k) {
  switch (k) {
    case ConstantKind::Poincare: return "poincare";
    case ConstantKind::Beckner: return "beckner";
    case ConstantKind::Mlsi: return "mlsi";
    case ConstantKind::Lsi: return "lsi";
    case ConstantKind::DualBeckner: return "dual_beckner";
  }
  return "?";
}

double inequality_ratio(const DbcLindbladian& L, ConstantKind kind, double param, const Mat& X) {
  check_param(kind, param);
  RatioParts r = ratio_parts(L, kind, param, X);
  return r.num / r.den;
}

std::optional<double> analytic_cap(ConstantKind kind, double param, double lambda) {
  switch (kind) {
    case ConstantKind::Beckner: return param * lambda / 2.0;
    case ConstantKind::Mlsi:
    case ConstantKind::Lsi: return lambda / 2.0;
    case ConstantKind::Poincare: return lambda;
    case ConstantKind::DualBeckner: return std::nullopt;
  }
  return std::nullopt;
}

ConstantEstimate estimate_constant(const DbcLindbladian& L, ConstantKind kind, double param,
                                   const EstimateOptions& opts) {
  check_param(kind, param);
  PrimitivityReport pr = primitivity(L);
  if (!pr.primitive()) fail(Errc::NotPrimitive, "constant estimation needs a primitive semigroup");
  ConstantEstimate out;
  out.kind = kind;
  out.param = param;
  const double lambda = pr.spectral_gap;
  if (kind == ConstantKind::Poincare) {
    out.value = lambda;
    out.best_ratio = lambda;
    return out;
  }
  const std::optional<double> cap = analytic_cap(kind, param, lambda);
  const int d = L.dim();
  RFn f = [&](const RVec& y) -> double {
    try {
      Mat X = feasible(y_to_mat(y, d), L.sigma());
      RatioParts r = ratio_parts(L, kind, param, X);
      if (!(r.den > kDenomFloor)) return cap ? *cap : kNan;
      return r.num / r.den;
    } catch (const Error&) {
      return kNan;
    }
  };
  double best = std::numeric_limits<double>::infinity();
  RVec best_y;
  double best_res = 0.0;
  for (int k = 0; k < opts.num_starts; ++k) {
    MinResult m = bfgs(f, mat_to_y(start_point(L, k, opts.seed)), opts.max_iters, opts.tol);
    if (std::isfinite(m.f) && m.f < best) {
      best = m.f;
      best_y = m.x;
      best_res = m.grad_norm;
    }
  }
  if (!std::isfinite(best)) fail(Errc::OptimizerDiverged, "no start produced a finite ratio");
  out.num_starts = opts.num_starts;
  out.best_residual = best_res;
  out.best_ratio = best;
  // Ratios within 1e-6 of the cap come from the near-identity region, where
  // the 0/0 quotient carries cancellation noise.
  if (cap && best >= *cap * (1.0 - 1e-6)) {
    out.value = std::min(best, *cap);
    out.capped = true;
  } else {
    out.value = best;
    out.witness = feasible(y_to_mat(best_y, d), L.sigma());
  }
  return out;
}

double depol_classical_theta(double p, double theta) {
  if (p == 2.0) return 1.0;
  auto ratio = [p, theta](double x) {
    double y = (1.0 - theta * x) / (1.0 - theta);
    y = std::max(y, 0.0);
    double A = theta * std::pow(x, p) + (1 - theta) * std::pow(y, p);
    double B = theta * std::pow(x, p - 1) + (1 - theta) * std::pow(y, p - 1);
    return p * p / 4.0 * (A - B) / (A - 1.0);
  };
  // x = 1 is the 0/0 point; its limit p/2 enters analytically and the grid
  // keeps a 1e-3 distance from it to avoid cancellation.
  const int n = 10000;
  const double hi = 1.0 / theta;
  double best = p / 2.0;
  int arg = -1;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = hi * i / (n - 1);
  for (int i = 0; i < n; ++i) {
    if (std::abs(xs[i] - 1.0) < 1e-3) continue;
    double r = ratio(xs[i]);
    if (std::isfinite(r) && r < best) {
      best = r;
      arg = i;
    }
  }
  if (arg < 0) return best;
  double a = xs[std::max(arg - 1, 0)], b = xs[std::min(arg + 1, n - 1)];
  if (a < 1.0 && b > 1.0) return best;
  return std::min(best, golden_min(ratio, a, b, 1e-10));
}

double depol_classical(double p, int d) {
  if (d < 2) fail(Errc::DomainViolation, "depolarizing reduction needs d >= 2");
  if (!(p > 1.0 && p <= 2.0)) fail(Errc::DomainViolation, "depolarizing reduction needs p in (1, 2]");
  double best = std::numeric_limits<double>::infinity();
  for (int n = 1; n < d; ++n) best = std::min(best, depol_classical_theta(p, static_cast<double>(n) / d));
  return best;
}

bool BoundLedger::hard_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const LedgerEntry& e) { return !e.hard || e.pass; });
}

bool BoundLedger::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const LedgerEntry& e) { return e.pass; });
}

BoundLedger bound_ledger(const ConstantSet& c, double sigma_min, const std::vector<double>& p_grid) {
  if (!c.lambda) fail(Errc::MissingEstimate, "ledger needs the Poincare constant");
  const double lam = *c.lambda;
  BoundLedger out;
  std::vector<std::pair<double, double>> alpha;
  for (double p : p_grid) {
    auto it = c.beckner.find(p);
    if (it == c.beckner.end()) fail(Errc::MissingEstimate, "no Beckner estimate at p = " + fmt(p));
    alpha.emplace_back(p, it->second.value);
  }
  for (auto [p, a] : alpha) {
    out.entries.push_back(entry("beckner_upper(p=" + fmt(p) + ")", a, p * lam / 2.0, true));
    double lower = std::max(lam * (p - 1.0), p * p * std::pow(sigma_min, 2.0 - p) * lam / 4.0);
    out.entries.push_back(entry("beckner_lower(p=" + fmt(p) + ")", lower, a, true));
  }
  std::sort(alpha.begin(), alpha.end());
  for (std::size_t i = 0; i + 1 < alpha.size(); ++i) {
    auto [p, a] = alpha[i];
    auto [pp, ap] = alpha[i + 1];
    if (p <= 1.0) continue;
    out.entries.push_back(entry("beckner_monotone(p=" + fmt(p) + "," + fmt(pp) + ")",
                                pp / (pp - 1.0) * ap, p / (p - 1.0) * a, false));
  }
  if (c.mlsi) {
    double a1 = c.mlsi->value;
    out.entries.push_back(entry("mlsi_upper", 2.0 * a1, lam, true));
    for (auto [p, a] : alpha) {
      double lower = std::max(2.0 * a1 * (p - 1.0), p * p * std::pow(sigma_min, 2.0 - p) * 2.0 * a1 / 4.0);
      out.entries.push_back(entry("beckner_lower_mlsi(p=" + fmt(p) + ")", lower, a, false));
    }
  }
  if (c.lsi) {
    out.entries.push_back(entry("lsi_upper", 2.0 * c.lsi->value, lam, true));
    if (c.mlsi) out.entries.push_back(entry("lsi_le_mlsi", c.lsi->value, c.mlsi->value, false));
  }
  std::vector<std::pair<double, double>> beta;
  for (const auto& [q, e] : c.dual_beckner) beta.emplace_back(q, e.value);
  for (std::size_t i = 0; i + 1 < beta.size(); ++i) {
    auto [q, b] = beta[i];
    auto [qq, bb] = beta[i + 1];
    std::string tag = "(q=" + fmt(q) + "," + fmt(qq) + ")";
    out.entries.push_back(entry("dual_increasing" + tag, b / (2.0 - q), bb / (2.0 - qq), false));
    out.entries.push_back(entry("dual_decreasing" + tag, bb / qq, b / q, false));
  }
  for (auto [q, b] : beta) {
    if (c.lsi) out.entries.push_back(entry("dual_from_lsi(q=" + fmt(q) + ")", q * c.lsi->value, b, false));
    double p = 2.0 / q;
    auto it = std::find_if(alpha.begin(), alpha.end(), [p](auto& pa) { return std::abs(pa.first - p) < 1e-12; });
    if (it != alpha.end())
      out.entries.push_back(entry("beckner_from_dual(p=" + fmt(p) + ")", p * b / 2.0, it->second, false));
  }
  return out;
}

double stability_factor(const DbcLindbladian& L, const DbcLindbladian& Lp, double p) {
  if (!(p > 1.0 && p <= 2.0)) fail(Errc::DomainViolation, "stability factor needs p in (1, 2]");
  const auto& J = L.jumps();
  const auto& Jp = Lp.jumps();
  if (L.dim() != Lp.dim() || J.size() != Jp.size() || J.empty())
    fail(Errc::IncompatibleJumps, "generators must share their jump operators");
  for (std::size_t j = 0; j < J.size(); ++j)
    if ((J[j].V - Jp[j].V).norm() > 1e-10 * (1.0 + J[j].V.norm()))
      fail(Errc::IncompatibleJumps, "jump operator " + std::to_string(j) + " differs");
  const Mat& s = L.sigma();
  const Mat& sp = Lp.sigma();
  if ((s * sp - sp * s).norm() > 1e-10) fail(Errc::IncompatibleJumps, "invariant states must commute");
  // common eigenbasis from a generic combination
  Eigh e = eigh(herm(s + std::sqrt(2.0) * sp));
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int k = 0; k < L.dim(); ++k) {
    auto v = e.vectors.col(k);
    double r = (v.adjoint() * s * v)(0, 0).real() / (v.adjoint() * sp * v)(0, 0).real();
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  double m = 1.0;
  for (std::size_t j = 0; j < J.size(); ++j)
    m = std::min(m, std::exp(-std::abs(J[j].omega - Jp[j].omega) * (2.0 - p) / (2.0 * p)));
  return lo / hi * m;
}

double mixing_bound(double p, double alpha_p, double sigma_min, double eps) {
  if (!(eps > 0.0 && eps < 2.0)) fail(Errc::DomainViolation, "mixing needs eps in (0, 2)");
  if (!(alpha_p > 0.0)) fail(Errc::DomainViolation, "mixing bound needs alpha_p > 0");
  double inner;
  if (std::abs(p - 1.0) < kNearOne) {
    inner = 2.0 * std::log(1.0 / sigma_min);
    return std::max(0.0, std::log(std::sqrt(inner) / eps) / (2.0 * alpha_p));
  }
  inner = 2.0 / (p * (p - 1.0)) * (std::pow(sigma_min, 2.0 / p - 2.0) - std::pow(sigma_min, p + 2.0 / p - 3.0));
  return std::max(0.0, p / (2.0 * alpha_p) * std::log(std::sqrt(inner) / eps));
}

double mixing_bound_inf(const std::map<double, double>& alpha, double sigma_min, double eps) {
  if (alpha.empty()) fail(Errc::MissingEstimate, "mixing bound needs at least one alpha_p");
  double best = std::numeric_limits<double>::infinity();
  for (auto [p, a] : alpha) best = std::min(best, mixing_bound(p, a, sigma_min, eps));
  return best;
}

std::vector<Mat> mixing_witnesses(const DbcLindbladian& L, std::uint64_t seed) {
  std::vector<Mat> w;
  const Eigh& e = L.sigma_eigh();
  for (int i = 0; i < L.dim(); ++i) w.push_back(e.vectors.col(i) * e.vectors.col(i).adjoint());
  Rng rng(seed);
  for (int k = 0; k < 8; ++k) w.push_back(random_pure(L.dim(), rng));
  return w;
}

MixingBracket mixing_empirical_bracket(const DbcLindbladian& L, double eps, std::uint64_t seed) {
  if (!(eps > 0.0)) fail(Errc::DomainViolation, "mixing needs eps > 0");
  PrimitivityReport pr = primitivity(L);
  if (!pr.primitive()) fail(Errc::NotPrimitive, "mixing needs a primitive semigroup");
  std::vector<Mat> W = mixing_witnesses(L, seed);
  auto dist = [&](double t) {
    double m = 0.0;
    for (const Mat& r : W) m = std::max(m, trace_dist(L.evolve_schrodinger(t, r), L.sigma()));
    return m;
  };
  if (dist(0.0) <= eps) return {0.0, 0.0};
  double lo = 0.0, hi = 1e-3 / pr.spectral_gap;
  for (int k = 0; dist(hi) > eps; ++k) {
    if (k > 200) fail(Errc::NotConverged, "mixing time search did not terminate");
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 0.01 * hi) {
    double mid = 0.5 * (lo + hi);
    (dist(mid) <= eps ? hi : lo) = mid;
  }
  return {lo, hi};
}

double mixing_empirical(const DbcLindbladian& L, double eps, std::uint64_t seed) {
  return mixing_empirical_bracket(L, eps, seed).upper;
}

double kappa_moment(double s) { return 1.0 / (1.0 - std::exp(-(s + 1.0) / 2.0)); }

MomentReport moment_concentration_check(const DbcLindbladian& L, const Mat& X, double r, double a,
                                        double s, double t) {
  if (!is_tracial(L)) fail(Errc::NotSymmetric, "moment estimates need sigma = I/d");
  if (r < 2.0) fail(Errc::DomainViolation, "moment estimate needs r >= 2");
  if (!(a > 0.0)) fail(Errc::DomainViolation, "moment estimate needs a > 0");
  const int d = L.dim();
  const Mat tau = identity(d) / static_cast<double>(d);
  Mat Xh = herm(X);
  Mat Y = Xh - (Xh.trace() / static_cast<double>(d)) * identity(d);
  Mat G = herm(carre_du_champ(L, Xh, Xh, 1));
  Eigh ge = eigh(G);
  double ginf = std::max(std::abs(ge.values(0)), std::abs(ge.values(ge.values.size() - 1)));
  MomentReport out;
  double k = kappa_moment(s);
  double yr = weighted_p_norm(Y, tau, r);
  out.moment_lhs = yr * yr;
  out.moment_rhs = std::pow(r, s + 1.0) * k / a * weighted_p_norm(G, tau, r / 2.0);
  Eigh ye = eigh(herm(Y));
  double k0 = kappa_moment(0.0);
  double ex = 0.0, tail = 0.0;
  for (int i = 0; i < d; ++i) {
    double v = std::abs(ye.values(i));
    ex += std::exp(v);
    tail += v >= t ? 1.0 : 0.0;
  }
  out.exp_lhs = ex / d;
  out.exp_rhs = 2.0 * std::exp(std::exp(1.0) * k0 * ginf / (2.0 * a));
  out.tail_lhs = tail / d;
  out.tail_rhs = ginf > 0.0 ? 2.0 * std::exp(-a * t * t / (2.0 * std::exp(1.0) * k0 * ginf)) : 0.0;
  return out;
}

}  // namespace qb
