#include "qbeckner/core.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qb {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonHermitian: return "NonHermitian";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::SingularState: return "SingularState";
    case Errc::NotModularEigenvector: return "NotModularEigenvector";
    case Errc::NotDbc: return "NotDbc";
    case Errc::ResidualTooLarge: return "ResidualTooLarge";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ZeroExponent: return "ZeroExponent";
    case Errc::NotPsd: return "NotPsd";
    case Errc::NoJumps: return "NoJumps";
    case Errc::NotPrimitive: return "NotPrimitive";
    case Errc::OptimizerDiverged: return "OptimizerDiverged";
    case Errc::MissingEstimate: return "MissingEstimate";
    case Errc::IncompatibleJumps: return "IncompatibleJumps";
    case Errc::KernelComponent: return "KernelComponent";
    case Errc::NotConverged: return "NotConverged";
    case Errc::LeftPositiveCone: return "LeftPositiveCone";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NonPositiveCurvature: return "NonPositiveCurvature";
    case Errc::ConfigError: return "ConfigError";
    case Errc::UnknownFixture: return "UnknownFixture";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc c, const std::string& what)
    : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}

void fail(Errc c, const std::string& what) { throw Error(c, what); }

Mat Eigh::compose(const RVec& f) const {
  return vectors * f.cast<cplx>().asDiagonal() * vectors.adjoint();
}

double herm_residual(const Mat& A) {
  if (A.size() == 0) return 0.0;
  return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

Mat herm(const Mat& A) { return 0.5 * (A + A.adjoint()); }

Eigh eigh(const Mat& A) {
  if (A.rows() != A.cols()) fail(Errc::NonHermitian, "matrix is not square");
  double scale = A.size() ? A.cwiseAbs().maxCoeff() : 0.0;
  if (herm_residual(A) > 1e-12 * (1.0 + scale)) {
    std::ostringstream os;
    os << "symmetry residual " << herm_residual(A);
    fail(Errc::NonHermitian, os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(herm(A));
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigh psd_eigh(const Mat& A) {
  Eigh e = eigh(A);
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) < 0.0) {
      if (e.values(i) > -kPsdFloor) {
        e.values(i) = 0.0;
      } else {
        std::ostringstream os;
        os << "eigenvalue " << e.values(i);
        fail(Errc::NotPsd, os.str());
      }
    }
  }
  return e;
}

Mat psd_clamp(const Mat& A) {
  Eigh e = psd_eigh(A);
  return e.compose(e.values);
}

bool near_equal(double a, double b) {
  return std::abs(a - b) <= kDegenerateRel * std::max({1.0, std::abs(a), std::abs(b)});
}

Fn1 fn_identity() {
  return {"identity", [](double x) { return x; }, [](double) { return 1.0; }};
}

Fn1 fn_power(double r) {
  Fn1 f;
  f.name = "power";
  f.f = [r](double x) { return (x == 0.0 && r > 0.0) ? 0.0 : std::pow(x, r); };
  f.df = [r](double x) { return r * std::pow(x, r - 1.0); };
  f.lo = 0.0;
  f.lo_open = r <= 0.0;
  return f;
}

Fn1 fn_log() {
  Fn1 f;
  f.name = "log";
  f.f = [](double x) { return std::log(x); };
  f.df = [](double x) { return 1.0 / x; };
  f.lo = 0.0;
  f.lo_open = true;
  return f;
}

Fn1 fn_exp() {
  return {"exp", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }};
}

Fn1 fn_fp(double p) {
  Fn1 f;
  f.name = "f_p";
  f.f = [p](double x) { return std::pow(x, p - 1.0) / (p - 1.0); };
  f.df = [p](double x) { return std::pow(x, p - 2.0); };
  f.lo = 0.0;
  f.lo_open = true;
  return f;
}

namespace {

// expm1(a u) / expm1(b u), with the u -> 0 limit a / b.
double em_ratio(double a, double b, double u) {
  if (std::abs(b * u) < 1e-300 || std::abs(u) < 1e-12) return a / b;
  return std::expm1(a * u) / std::expm1(b * u);
}

// c expm1(d) / expm1(c d) and its derivative in d.
double g_ratio(double c, double d) {
  if (std::abs(d) < 1e-2) {
    double d2 = d * d;
    double l = (1 - c) * d / 2 + (1 - c * c) * d2 / 24 - (1 - c * c * c * c) * d2 * d2 / 2880;
    return std::exp(l);
  }
  if (c == 0.0) return std::expm1(d) / d;
  return c * std::expm1(d) / std::expm1(c * d);
}

double g_ratio_d(double c, double d) {
  if (std::abs(d) < 1e-2) {
    double d2 = d * d;
    double dl = (1 - c) / 2 + (1 - c * c) * d / 12 - (1 - c * c * c * c) * d2 * d / 720;
    return g_ratio(c, d) * dl;
  }
  if (c == 0.0) return (std::exp(d) * d - std::expm1(d)) / (d * d);
  double den = std::expm1(c * d);
  return c * (std::exp(d) * den - c * std::exp(c * d) * std::expm1(d)) / (den * den);
}

}  // namespace

Fn1 fn_phi(double p) {
  Fn1 f;
  f.name = "phi_p";
  f.f = [p](double x) {
    double u = std::log(x);
    return std::exp(u / p) * em_ratio(1.0 - 1.0 / p, 1.0 / p, u) / (p - 1.0);
  };
  f.df = [p](double x) {
    double h = 1e-6 * std::max(1.0, x);
    double u1 = std::log(x + h), u0 = std::log(x - h);
    double f1 = std::exp(u1 / p) * em_ratio(1.0 - 1.0 / p, 1.0 / p, u1) / (p - 1.0);
    double f0 = std::exp(u0 / p) * em_ratio(1.0 - 1.0 / p, 1.0 / p, u0) / (p - 1.0);
    return (f1 - f0) / (2 * h);
  };
  f.lo = 0.0;
  f.lo_open = true;
  return f;
}

Fn1 fn_kappa(double alpha) {
  Fn1 f;
  f.name = "kappa_alpha";
  f.f = [alpha](double x) {
    double u = std::log(x);
    if (std::abs(alpha - 1.0) < 1e-12) return std::abs(u) < 1e-12 ? 1.0 : u / std::expm1(u);
    if (std::abs(alpha) < 1e-12) return std::abs(u) < 1e-12 ? 1.0 : -std::expm1(-u) / u;
    return alpha / (alpha - 1.0) * em_ratio(alpha - 1.0, alpha, u);
  };
  f.df = [f0 = f.f](double x) {
    double h = 1e-6 * std::max(1.0, x);
    return (f0(x + h) - f0(x - h)) / (2 * h);
  };
  f.lo = 0.0;
  f.lo_open = true;
  return f;
}

Fn2 fn2_const(double c) {
  Fn2 f;
  f.name = "const";
  f.f = [c](double, double) { return c; };
  f.dx = [](double, double) { return 0.0; };
  f.dy = [](double, double) { return 0.0; };
  return f;
}

Fn2 fn2_left(const Fn1& g) {
  Fn2 f;
  f.name = "left_" + g.name;
  f.f = [g](double x, double) { return g.f(x); };
  f.dx = [g](double x, double) { return g.df(x); };
  f.dy = [](double, double) { return 0.0; };
  f.lo = g.lo;
  f.lo_open = g.lo_open;
  return f;
}

Fn2 divdiff(const Fn1& g) {
  Fn2 f;
  f.name = g.name + "[1]";
  f.f = [g](double x, double y) {
    if (near_equal(x, y)) return g.df(x);
    return (g.f(x) - g.f(y)) / (x - y);
  };
  f.lo = g.lo;
  f.lo_open = g.lo_open;
  return f;
}

double theta_p(double p, double x, double y) {
  double c = p - 1.0;
  return std::pow(y, 1.0 - c) * g_ratio(c, std::log(x) - std::log(y));
}

double theta_p_dx(double p, double x, double y) {
  double c = p - 1.0;
  return std::pow(y, 1.0 - c) * g_ratio_d(c, std::log(x) - std::log(y)) / x;
}

double theta_log(double x, double y) { return y * g_ratio(0.0, std::log(x) - std::log(y)); }

Fn2 fn2_theta(double p) {
  Fn2 f;
  f.name = "theta_p";
  f.f = [p](double x, double y) { return theta_p(p, x, y); };
  f.dx = [p](double x, double y) { return theta_p_dx(p, x, y); };
  f.dy = [p](double x, double y) { return theta_p_dx(p, y, x); };
  f.lo = 0.0;
  f.lo_open = true;
  return f;
}

Fn2 fn2_fp_divdiff(double p) {
  Fn2 f;
  f.name = "f_p[1]";
  f.f = [p](double x, double y) { return 1.0 / theta_p(p, x, y); };
  f.dx = [p](double x, double y) {
    double t = theta_p(p, x, y);
    return -theta_p_dx(p, x, y) / (t * t);
  };
  f.dy = [p](double x, double y) {
    double t = theta_p(p, x, y);
    return -theta_p_dx(p, y, x) / (t * t);
  };
  f.lo = 0.0;
  f.lo_open = true;
  return f;
}

Fn2 fn2_theta_log() {
  Fn2 f;
  f.name = "theta_log";
  f.f = [](double x, double y) { return theta_log(x, y); };
  f.dx = [](double x, double y) { return y * g_ratio_d(0.0, std::log(x) - std::log(y)) / x; };
  f.dy = [](double x, double y) { return x * g_ratio_d(0.0, std::log(y) - std::log(x)) / y; };
  f.lo = 0.0;
  f.lo_open = true;
  return f;
}

namespace {

double checked_arg(const Fn1& f, double x) {
  if (f.in_domain(x)) return x;
  if (!f.lo_open && x > f.lo - kPsdFloor) return f.lo;
  std::ostringstream os;
  os << f.name << " evaluated at " << x;
  fail(Errc::DomainViolation, os.str());
}

void check_domain(const Fn2& f, const RVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!f.in_domain(v(i))) {
      std::ostringstream os;
      os << f.name << " evaluated at " << v(i);
      fail(Errc::DomainViolation, os.str());
    }
  }
}

double fd_dx(const Fn2& f, double x, double y) {
  if (f.dx) return f.dx(x, y);
  double h = 1e-6 * std::max(1.0, std::abs(x));
  return (f.f(x + h, y) - f.f(x - h, y)) / (2 * h);
}

double fd_dy(const Fn2& f, double x, double y) {
  if (f.dy) return f.dy(x, y);
  double h = 1e-6 * std::max(1.0, std::abs(y));
  return (f.f(x, y + h) - f.f(x, y - h)) / (2 * h);
}

}  // namespace

Mat matrix_function(const Eigh& e, const Fn1& f) {
  RVec v(e.values.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f.f(checked_arg(f, e.values(i)));
  return e.compose(v);
}

Mat matrix_function(const Mat& A, const Fn1& f) { return matrix_function(eigh(A), f); }

Mat mpow(const Mat& A, double r) {
  Eigh e = psd_eigh(A);
  return matrix_function(e, fn_power(r));
}

Mat mlog(const Mat& A) { return matrix_function(eigh(A), fn_log()); }

Vec vec(const Mat& X) { return Eigen::Map<const Vec>(X.data(), X.size()); }

Mat unvec(const Vec& v, int d) { return Eigen::Map<const Mat>(v.data(), d, d); }

Mat Superoperator::apply(const Mat& X) const { return unvec(matrix * vec(X), dim); }

Superoperator Superoperator::compose(const Superoperator& other) const {
  return {dim, matrix * other.matrix};
}

Superoperator Superoperator::adjoint() const { return {dim, matrix.adjoint()}; }

Mat identity(int d) { return Mat::Identity(d, d); }

Superoperator super_identity(int d) { return {d, Mat::Identity(d * d, d * d)}; }

Superoperator super_from_map(int d, const std::function<Mat(const Mat&)>& map) {
  Superoperator S{d, Mat::Zero(d * d, d * d)};
  for (int b = 0; b < d; ++b) {
    for (int a = 0; a < d; ++a) {
      Mat E = Mat::Zero(d, d);
      E(a, b) = 1.0;
      S.matrix.col(a + b * d) = vec(map(E));
    }
  }
  return S;
}

Superoperator super_left(const Mat& A) {
  int d = static_cast<int>(A.rows());
  return {d, Eigen::kroneckerProduct(identity(d), A).eval()};
}

Superoperator super_right(const Mat& B) {
  int d = static_cast<int>(B.rows());
  return {d, Eigen::kroneckerProduct(B.transpose(), identity(d)).eval()};
}

Eigh full_rank_eigh(const Mat& sigma) {
  Eigh e = eigh(sigma);
  if (e.values.size() == 0 || e.values(0) < kStrictFloor)
    fail(Errc::SingularState, "state is not full rank");
  return e;
}

Mat gamma_apply(const Eigh& sigma, double s, const Mat& X) {
  RVec h(sigma.values.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    double v = sigma.values(i);
    if (s < 0 && v < kStrictFloor) fail(Errc::SingularState, "negative power of a singular state");
    h(i) = v <= 0.0 ? 0.0 : std::pow(v, s / 2);
  }
  Mat H = sigma.compose(h);
  return H * X * H;
}

Superoperator super_modular(const Mat& sigma) {
  Eigh e = full_rank_eigh(sigma);
  Mat inv = e.compose(e.values.cwiseInverse());
  return super_left(sigma).compose(super_right(inv));
}

Superoperator super_gamma_power(const Mat& sigma, double s) {
  Eigh e = full_rank_eigh(sigma);
  Mat h = e.compose(e.values.array().pow(s / 2).matrix());
  return super_left(h).compose(super_right(h));
}

Mat j_kernel_apply(const Eigh& sigma, const Fn1& f, const Mat& X) {
  const Mat& Q = sigma.vectors;
  Mat Xt = Q.adjoint() * X * Q;
  int d = static_cast<int>(Xt.rows());
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      double sk = sigma.values(k);
      Xt(i, k) *= sk * f.f(sigma.values(i) / sk);
    }
  }
  return Q * Xt * Q.adjoint();
}

Superoperator super_j_kernel(const Mat& sigma, const Fn1& f) {
  Eigh e = full_rank_eigh(sigma);
  int d = static_cast<int>(sigma.rows());
  return super_from_map(d, [&](const Mat& X) { return j_kernel_apply(e, f, X); });
}

Mat double_sum_apply(const Fn2& f, const Eigh& A, const Eigh& B, const Mat& X) {
  check_domain(f, A.values);
  check_domain(f, B.values);
  Mat Xt = A.vectors.adjoint() * X * B.vectors;
  for (Eigen::Index i = 0; i < Xt.rows(); ++i)
    for (Eigen::Index k = 0; k < Xt.cols(); ++k) Xt(i, k) *= f.f(A.values(i), B.values(k));
  return A.vectors * Xt * B.vectors.adjoint();
}

Mat double_sum_apply(const Fn2& f, const Mat& A, const Mat& B, const Mat& X) {
  return double_sum_apply(f, eigh(A), eigh(B), X);
}

Mat partial_divdiff_apply(const Fn2& f, int which, const Eigh& A, const Eigh& B,
                          const Mat& X, const Mat& Y) {
  check_domain(f, A.values);
  check_domain(f, B.values);
  const Eigen::Index n = A.values.size(), m = B.values.size();
  Mat R = Mat::Zero(n, m);
  if (which == 1) {
    Mat Xt = A.vectors.adjoint() * X * A.vectors;
    Mat Yt = A.vectors.adjoint() * Y * B.vectors;
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index i = 0; i < m; ++i) {
        cplx acc = 0.0;
        double lk = A.values(k), mi = B.values(i);
        for (Eigen::Index l = 0; l < n; ++l) {
          double ll = A.values(l);
          double w = near_equal(lk, ll) ? fd_dx(f, lk, mi) : (f.f(lk, mi) - f.f(ll, mi)) / (lk - ll);
          acc += w * Xt(k, l) * Yt(l, i);
        }
        R(k, i) = acc;
      }
    }
  } else if (which == 2) {
    Mat Xt = A.vectors.adjoint() * X * B.vectors;
    Mat Yt = B.vectors.adjoint() * Y * B.vectors;
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index mm = 0; mm < m; ++mm) {
        cplx acc = 0.0;
        double lk = A.values(k), um = B.values(mm);
        for (Eigen::Index i = 0; i < m; ++i) {
          double ui = B.values(i);
          double w = near_equal(ui, um) ? fd_dy(f, lk, ui) : (f.f(lk, ui) - f.f(lk, um)) / (ui - um);
          acc += w * Xt(k, i) * Yt(i, mm);
        }
        R(k, mm) = acc;
      }
    }
  } else {
    fail(Errc::IndexOutOfRange, "partial divided difference index must be 1 or 2");
  }
  return A.vectors * R * B.vectors.adjoint();
}

Mat partial_divdiff_apply(const Fn2& f, int which, const Mat& A, const Mat& B, const Mat& X,
                          const Mat& Y) {
  return partial_divdiff_apply(f, which, eigh(A), eigh(B), X, Y);
}

cplx inner_hs(const Mat& X, const Mat& Y) { return (X.adjoint() * Y).trace(); }

cplx inner_product(InnerKind kind, const Mat& X, const Mat& Y, const Mat& sigma, double s,
                   const Fn1* f) {
  if (kind == InnerKind::HilbertSchmidt) return inner_hs(X, Y);
  Eigh e = full_rank_eigh(sigma);
  if (kind == InnerKind::Kms) s = 0.5;
  if (kind == InnerKind::Gns) s = 1.0;
  if (kind == InnerKind::FWeighted) {
    if (!f) fail(Errc::DomainViolation, "weighted inner product needs a kernel");
    return inner_hs(X, j_kernel_apply(e, *f, Y));
  }
  Mat a = e.compose(e.values.array().pow(s).matrix());
  Mat b = e.compose(e.values.array().pow(1.0 - s).matrix());
  return (a * X.adjoint() * b * Y).trace();
}

double trace_re(const Mat& X) { return X.trace().real(); }

double fro(const Mat& X) { return X.norm(); }

double trace_norm(const Mat& X) {
  Eigh e = eigh(herm(X));
  return e.values.cwiseAbs().sum();
}

}  // namespace qb
