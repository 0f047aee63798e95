#include "qbeckner/transport.hpp"

#include "qbeckner/entropy.hpp"
#include "qbeckner/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qb {

namespace {

void check_p(double p) {
  if (!(p > 1.0 && p <= 2.0)) fail(Errc::DomainViolation, "transport exponent must lie in (1, 2]");
}

Mat floor_state(const Mat& rho, double floor) {
  Eigh e = eigh(herm(rho));
  RVec v = e.values.cwiseMax(floor);
  return herm(e.compose(v));
}

double sq_re(const Mat& A, const Mat& B) { return inner_hs(A, B).real(); }

}  // namespace

RhoKernel::RhoKernel(const Eigh& sigma, const Mat& rho, double p, double floor)
    : sig_(sigma), p_(p), a_(1.0 - 1.0 / p) {
  check_p(p);
  if (sig_.values(0) < kStrictFloor) fail(Errc::SingularState, "reference state is not full rank");
  rho_ = floor > 0.0 ? floor_state(rho, floor) : herm(rho);
  m_ = eigh(herm(gamma_apply(sig_, -a_, rho_)));
  if (m_.values(0) <= 0.0) fail(Errc::SingularState, "metric kernel needs a full-rank state");
}

Mat RhoKernel::apply(double omega, const Mat& A, KernelDirection dir) const {
  const double s = std::exp(omega / (2 * p_));
  const Mat& Q = m_.vectors;
  const bool fwd = dir == KernelDirection::Forward;
  Mat X = Q.adjoint() * gamma_apply(sig_, fwd ? a_ : -a_, A) * Q;
  const Eigen::Index d = X.rows();
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < d; ++i) {
      double t = theta_p(p_, s * m_.values(k), m_.values(i) / s);
      X(k, i) *= fwd ? t : 1.0 / t;
    }
  return gamma_apply(sig_, fwd ? a_ : -a_, Q * X * Q.adjoint());
}

Mat RhoKernel::to_m(double omega, const Mat& Delta) const {
  return std::exp(omega / (2 * p_)) * gamma_apply(sig_, -a_, Delta);
}

double RhoKernel::weight1(double omega, int k, int l, int i) const {
  const double s = std::exp(omega / (2 * p_));
  double xk = s * m_.values(k), xl = s * m_.values(l), yi = m_.values(i) / s;
  if (near_equal(xk, xl)) return theta_p_dx(p_, xk, yi);
  return (theta_p(p_, xk, yi) - theta_p(p_, xl, yi)) / (xk - xl);
}

double RhoKernel::weight2(double omega, int k, int i, int m) const {
  const double s = std::exp(omega / (2 * p_));
  double xk = s * m_.values(k), yi = m_.values(i) / s, ym = m_.values(m) / s;
  if (near_equal(yi, ym)) return theta_p_dx(p_, yi, xk);
  return (theta_p(p_, xk, yi) - theta_p(p_, xk, ym)) / (yi - ym);
}

Mat RhoKernel::derivative(double omega, const Mat& Delta, const Mat& A, KernelSlot slot) const {
  const Mat& Q = m_.vectors;
  const int d = static_cast<int>(A.rows());
  Mat Y = Q.adjoint() * gamma_apply(sig_, a_, A) * Q;
  Mat Dl = Q.adjoint() * to_m(omega, Delta) * Q;
  Mat Dr = Q.adjoint() * to_m(-omega, Delta) * Q;
  Mat T1 = Mat::Zero(d, d), T2 = Mat::Zero(d, d);
  if (slot != KernelSlot::Second) {
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) T1(k, i) += weight1(omega, k, l, i) * Dl(k, l) * Y(l, i);
  }
  if (slot != KernelSlot::First) {
    for (int k = 0; k < d; ++k)
      for (int m = 0; m < d; ++m)
        for (int i = 0; i < d; ++i) T2(k, m) += weight2(omega, k, i, m) * Y(k, i) * Dr(i, m);
  }
  Mat T = slot == KernelSlot::Symmetrized ? Mat(0.5 * (T1 + T2)) : Mat(T1 + T2);
  return gamma_apply(sig_, a_, Q * T * Q.adjoint());
}

Mat RhoKernel::derivative_gradient(double omega, const Mat& C, KernelSlot slot) const {
  const Mat& Q = m_.vectors;
  const int d = static_cast<int>(C.rows());
  Mat Y = Q.adjoint() * gamma_apply(sig_, a_, C) * Q;  // both slots of the form
  Mat G = Mat::Zero(d, d);
  const double s = std::exp(omega / (2 * p_));
  if (slot != KernelSlot::Second) {
    Mat g = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i) g(k, l) += weight1(omega, k, l, i) * std::conj(Y(l, i)) * Y(k, i);
    G += s * gamma_apply(sig_, -a_, Q * g * Q.adjoint());
  }
  if (slot != KernelSlot::First) {
    Mat g = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i)
      for (int m = 0; m < d; ++m)
        for (int k = 0; k < d; ++k) g(i, m) += weight2(omega, k, i, m) * std::conj(Y(k, i)) * Y(k, m);
    G += gamma_apply(sig_, -a_, Q * g * Q.adjoint()) / s;
  }
  if (slot == KernelSlot::Symmetrized) G *= 0.5;
  return herm(G);
}

Mat metric_kernel_apply(const MetricKernel& K, const Mat& A, KernelDirection dir) {
  return RhoKernel(full_rank_eigh(K.sigma), K.rho, K.p).apply(K.omega, A, dir);
}

Superoperator metric_kernel_super(const MetricKernel& K) {
  RhoKernel R(full_rank_eigh(K.sigma), K.rho, K.p);
  return super_from_map(static_cast<int>(K.rho.rows()), [&](const Mat& A) { return R.apply(K.omega, A); });
}

Mat log_mean_kernel_apply(const Mat& rho, double omega, const Mat& A) {
  Eigh e = full_rank_eigh(herm(rho));
  const double s = std::exp(omega / 2);
  Mat X = e.vectors.adjoint() * A * e.vectors;
  for (Eigen::Index k = 0; k < X.rows(); ++k)
    for (Eigen::Index i = 0; i < X.cols(); ++i) X(k, i) *= theta_log(s * e.values(k), e.values(i) / s);
  return e.vectors * X * e.vectors.adjoint();
}

std::vector<Mat> traceless_hermitian_basis(int d) {
  std::vector<Mat> b;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int k = i + 1; k < d; ++k) {
      Mat s = Mat::Zero(d, d), a = Mat::Zero(d, d);
      s(i, k) = s(k, i) = r;
      a(i, k) = cplx(0, -r);
      a(k, i) = cplx(0, r);
      b.push_back(s);
      b.push_back(a);
    }
  for (int l = 1; l < d; ++l) {
    Mat z = Mat::Zero(d, d);
    double n = 1.0 / std::sqrt(l * (l + 1.0));
    for (int i = 0; i < l; ++i) z(i, i) = n;
    z(l, l) = -l * n;
    b.push_back(z);
  }
  return b;
}

Eigen::VectorXd basis_coords(const std::vector<Mat>& basis, const Mat& X) {
  Eigen::VectorXd c(basis.size());
  for (std::size_t a = 0; a < basis.size(); ++a) c(a) = sq_re(basis[a], X);
  return c;
}

Mat basis_combine(const std::vector<Mat>& basis, const Eigen::VectorXd& c) {
  Mat X = Mat::Zero(basis[0].rows(), basis[0].cols());
  for (std::size_t a = 0; a < basis.size(); ++a) X += c(a) * basis[a];
  return X;
}

Onsager::Onsager(const DbcLindbladian& L, const Mat& rho, double p, double floor)
    : L_(&L), K_(L.sigma_eigh(), rho, p, floor) {
  if (L.jumps().empty()) fail(Errc::NoJumps, "Onsager operator needs jump operators");
}

Mat Onsager::apply(const Mat& U) const {
  Mat r = Mat::Zero(U.rows(), U.cols());
  for (std::size_t j = 0; j < L_->jumps().size(); ++j)
    r += L_->partial_adj_hs(j, K_.apply(L_->jumps()[j].omega, L_->partial(j, U)));
  return r;
}

double Onsager::form(const Mat& U) const {
  double s = 0.0;
  for (std::size_t j = 0; j < L_->jumps().size(); ++j) {
    Mat g = L_->partial(j, U);
    s += sq_re(g, K_.apply(L_->jumps()[j].omega, g));
  }
  return s;
}

const Eigen::MatrixXd& Onsager::basis_matrix() const {
  if (!have_m_) {
    auto basis = traceless_hermitian_basis(L_->dim());
    const int n = static_cast<int>(basis.size());
    M_.resize(n, n);
    for (int b = 0; b < n; ++b) {
      Mat img = apply(basis[b]);
      for (int a = 0; a < n; ++a) M_(a, b) = sq_re(basis[a], img);
    }
    M_ = 0.5 * (M_ + M_.transpose()).eval();
    have_m_ = true;
  }
  return M_;
}

Mat Onsager::pinv(const Mat& nu) const {
  if (herm_residual(nu) > 1e-10) fail(Errc::NonHermitian, "tangent vector must be Hermitian");
  if (std::abs(nu.trace()) > 1e-10) fail(Errc::KernelComponent, "tangent vector has a trace component");
  auto basis = traceless_hermitian_basis(L_->dim());
  Eigen::VectorXd c = basis_coords(basis, nu);
  Eigen::VectorXd x = basis_matrix().ldlt().solve(c);
  return basis_combine(basis, x);
}

double Onsager::tensor(const Mat& nu1, const Mat& nu2) const { return sq_re(pinv(nu1), nu2); }

Mat functional_derivative(const Eigh& sigma, const Mat& rho, double p) {
  check_p(p);
  const double a = 1.0 - 1.0 / p;
  Mat M = herm(gamma_apply(sigma, -a, rho));
  return gamma_apply(sigma, -a, mpow(M, p - 1)) / (p - 1);
}

double grad_flow_residual(const DbcLindbladian& L, const Mat& rho, double p) {
  Onsager D(L, rho, p);
  Mat lhs = D.apply(functional_derivative(L.sigma_eigh(), rho, p));
  Mat flow = L.apply_dual(rho);
  double n = fro(flow);
  double r = fro(lhs + flow);
  return n < 1e-14 ? r : r / n;
}

std::vector<int> jump_pairing(const DbcLindbladian& L) {
  const auto& J = L.jumps();
  std::vector<int> pair(J.size(), -1);
  for (std::size_t j = 0; j < J.size(); ++j) {
    if (pair[j] >= 0) continue;
    for (std::size_t k = j; k < J.size(); ++k) {
      if (pair[k] >= 0) continue;
      double scale = std::max(1.0, fro(J[j].V));
      if (fro(J[k].V - J[j].V.adjoint()) <= 1e-10 * scale && std::abs(J[k].omega + J[j].omega) <= 1e-10) {
        pair[j] = static_cast<int>(k);
        pair[k] = static_cast<int>(j);
        break;
      }
    }
    if (pair[j] < 0) fail(Errc::IncompatibleJumps, "jump list is not closed under adjoints");
  }
  return pair;
}

double flat_w22(const DbcLindbladian& L, const Mat& rho0, const Mat& rho1) {
  if (L.jumps().empty()) fail(Errc::NoJumps, "transport needs jump operators");
  Onsager D(L, L.sigma(), 2.0);
  Mat delta = herm(rho1 - rho0);
  return std::sqrt(std::max(0.0, D.tensor(delta, delta)));
}

double transport_lower_bound_constant(const DbcLindbladian& L, double p) {
  check_p(p);
  if (L.jumps().empty()) fail(Errc::NoJumps, "transport needs jump operators");
  const RVec& s = L.sigma_eigh().values;
  const double a = 1.0 - 1.0 / p;
  const double cp = std::pow(2.0, 2.0 - p);
  double tr = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) tr += std::pow(s(i), (p - 2) * a);
  double sum = 0.0;
  for (const auto& j : L.jumps()) {
    double vn = Eigen::JacobiSVD<Mat>(j.V).singularValues()(0);
    double w = j.omega / (2 * p);
    sum += (std::exp((2 - p) * w) + std::exp((p - 2) * w)) * vn * vn;
  }
  return std::sqrt(4.0 / cp * tr * std::pow(s(s.size() - 1), 2 * a) * sum);
}

// ---------------------------------------------------------------------------
// Discrete Benamou-Brenier problem. Variables are the momenta B[k][j]; states
// follow from the discrete continuity equation, and the endpoint constraint is
// linear in B, so descent directions are projected onto its null space.

namespace {

using Momenta = std::vector<std::vector<Mat>>;

struct Problem {
  const DbcLindbladian& L;
  Mat rho0, rho1;
  double p;
  int N;
  double h;
  double floor;
  std::vector<int> pair;
  std::vector<Mat> basis;
  Eigen::LDLT<Eigen::MatrixXd> flat;  // sum_j d_j^dag d_j on the traceless basis

  Problem(const DbcLindbladian& L_, const Mat& r0, const Mat& r1, double p_, int N_, double floor_)
      : L(L_), rho0(r0), rho1(r1), p(p_), N(N_), h(1.0 / N_), floor(floor_) {
    pair = jump_pairing(L);
    basis = traceless_hermitian_basis(L.dim());
    const int n = static_cast<int>(basis.size());
    Eigen::MatrixXd P(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (std::size_t j = 0; j < L.jumps().size(); ++j)
          s += sq_re(L.partial(j, basis[a]), L.partial(j, basis[b]));
        P(a, b) = s;
      }
    flat.compute(P);
  }

  std::size_t J() const { return L.jumps().size(); }

  Mat flux(const std::vector<Mat>& Bk) const {
    Mat r = Mat::Zero(L.dim(), L.dim());
    for (std::size_t j = 0; j < J(); ++j) r += L.partial_adj_hs(j, Bk[j]);
    return r;
  }

  std::vector<Mat> states(const Momenta& B) const {
    std::vector<Mat> g(N + 1);
    g[0] = rho0;
    for (int k = 0; k < N; ++k) g[k + 1] = g[k] + h * herm(flux(B[k]));
    return g;
  }

  // (B_j - B_{j'}^*) / 2
  void symmetrize(Momenta& G) const {
    for (auto& Gk : G) {
      std::vector<Mat> s(J());
      for (std::size_t j = 0; j < J(); ++j) s[j] = 0.5 * (Gk[j] - Gk[pair[j]].adjoint());
      Gk = std::move(s);
    }
  }

  // Remove the component of G that changes the endpoint, scaled by `target`.
  void project(Momenta& G, const Mat* target) const {
    Mat r = Mat::Zero(L.dim(), L.dim());
    for (int k = 0; k < N; ++k) r += h * herm(flux(G[k]));
    if (target) r -= *target;
    Eigen::VectorXd c = basis_coords(basis, r);
    Eigen::VectorXd x = flat.solve(c) / (N * h * h);
    Mat psi = basis_combine(basis, x);
    for (int k = 0; k < N; ++k)
      for (std::size_t j = 0; j < J(); ++j) G[k][j] -= h * L.partial(j, psi);
  }

  double evaluate(const Momenta& B, Momenta* grad, std::vector<double>* speed2) const {
    std::vector<Mat> g = states(B);
    double action = 0.0;
    std::vector<Mat> G(N);
    if (grad) grad->assign(N, std::vector<Mat>(J()));
    if (speed2) speed2->assign(N, 0.0);
    for (int k = 0; k < N; ++k) {
      RhoKernel K(L.sigma_eigh(), 0.5 * (g[k] + g[k + 1]), p, floor);
      double a = 0.0;
      G[k] = Mat::Zero(L.dim(), L.dim());
      for (std::size_t j = 0; j < J(); ++j) {
        double w = L.jumps()[j].omega;
        Mat C = K.apply(w, B[k][j], KernelDirection::Inverse);
        a += sq_re(B[k][j], C);
        if (grad) {
          (*grad)[k][j] = 2 * h * C;
          G[k] -= 2 * h * K.derivative_gradient(w, C, KernelSlot::Symmetrized);
        }
      }
      if (speed2) (*speed2)[k] = a;
      action += h * a;
    }
    if (grad) {
      Mat S = Mat::Zero(L.dim(), L.dim());
      for (int k = N - 1; k >= 0; --k) {
        // gradient w.r.t. gamma_{k+1}
        S += 0.5 * G[k];
        if (k + 1 < N) S += 0.5 * G[k + 1];
        for (std::size_t j = 0; j < J(); ++j) (*grad)[k][j] += h * L.partial(j, S);
      }
    }
    return action;
  }

  Momenta initial() const {
    Momenta B(N, std::vector<Mat>(J()));
    Mat delta = herm(rho1 - rho0);
    for (int k = 0; k < N; ++k) {
      Mat mid = rho0 + (k + 0.5) * h * delta;
      Onsager D(L, mid, p, floor);
      Mat U = D.pinv(delta - delta.trace() / double(L.dim()) * identity(L.dim()));
      for (std::size_t j = 0; j < J(); ++j) B[k][j] = D.kernel().apply(L.jumps()[j].omega, L.partial(j, U));
    }
    return B;
  }
};

double dot(const Momenta& A, const Momenta& B) {
  double s = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k)
    for (std::size_t j = 0; j < A[k].size(); ++j) s += sq_re(A[k][j], B[k][j]);
  return s;
}

void axpy(Momenta& Y, double a, const Momenta& X) {
  for (std::size_t k = 0; k < Y.size(); ++k)
    for (std::size_t j = 0; j < Y[k].size(); ++j) Y[k][j] += a * X[k][j];
}

Momenta scaled(const Momenta& X, double a) {
  Momenta Y = X;
  for (auto& Yk : Y)
    for (auto& y : Yk) y *= a;
  return Y;
}

}  // namespace

W2pResult w2p_solve(const DbcLindbladian& L, const Mat& rho0, const Mat& rho1, double p,
                    const W2pOptions& opts) {
  check_p(p);
  if (L.jumps().empty()) fail(Errc::NoJumps, "transport needs jump operators");
  if (opts.N < 1) fail(Errc::DomainViolation, "need at least one interval");
  Mat r0 = psd_clamp(herm(rho0)), r1 = psd_clamp(herm(rho1));
  const int N = opts.N;
  const std::size_t J = L.jumps().size();
  W2pResult out;
  TransportPath& path = out.path;
  path.N = N;

  if (fro(r1 - r0) < 1e-14) {
    path.states.assign(N + 1, r0);
    path.momenta.assign(N, std::vector<Mat>(J, Mat::Zero(L.dim(), L.dim())));
    path.speed2.assign(N, 0.0);
    path.history.push_back(0.0);
    return out;
  }

  Problem P(L, r0, r1, p, N, opts.floor);
  Mat delta = herm(r1 - r0);
  Momenta B = P.initial();
  P.symmetrize(B);
  P.project(B, &delta);

  auto safe_eval = [&](const Momenta& X, Momenta* g) {
    try {
      double f = P.evaluate(X, g, nullptr);
      return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto tangent_grad = [&](const Momenta& X) {
    Momenta g;
    P.evaluate(X, &g, nullptr);
    P.symmetrize(g);
    P.project(g, nullptr);
    return g;
  };

  double f = P.evaluate(B, nullptr, nullptr);
  Momenta g = tangent_grad(B);
  path.history.push_back(f);

  // Limited-memory BFGS restricted to the feasible affine subspace.
  const int mem = 8;
  std::vector<Momenta> S, Y;
  std::vector<double> rho_hist;
  int quiet = 0;
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    double gn = std::sqrt(dot(g, g));
    if (gn < 1e-13) {
      converged = true;
      break;
    }
    Momenta q = g;
    std::vector<double> alpha(S.size());
    for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * dot(S[i], q);
      axpy(q, -alpha[i], Y[i]);
    }
    double gamma = S.empty() ? 1.0 / gn : dot(S.back(), Y.back()) / dot(Y.back(), Y.back());
    q = scaled(q, gamma);
    for (std::size_t i = 0; i < S.size(); ++i) {
      double beta = rho_hist[i] * dot(Y[i], q);
      axpy(q, alpha[i] - beta, S[i]);
    }
    Momenta d = scaled(q, -1.0);
    double slope = dot(g, d);
    if (slope >= 0) {
      d = scaled(g, -1.0 / gn);
      slope = dot(g, d);
      S.clear();
      Y.clear();
      rho_hist.clear();
    }
    double step = 1.0, fn = 0.0;
    Momenta Bn;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      Bn = B;
      axpy(Bn, step, d);
      fn = safe_eval(Bn, nullptr);
      if (fn <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = std::abs(slope) < 1e-12 * std::max(1.0, f);
      break;
    }
    if (it % 50 == 49) P.project(Bn, &delta);
    Momenta gnew = tangent_grad(Bn);
    Momenta s = Bn, y = gnew;
    axpy(s, -1.0, B);
    axpy(y, -1.0, g);
    double sy = dot(s, y);
    if (sy > 1e-300) {
      if (static_cast<int>(S.size()) == mem) {
        S.erase(S.begin());
        Y.erase(Y.begin());
        rho_hist.erase(rho_hist.begin());
      }
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    double change = f - fn;
    B = std::move(Bn);
    g = std::move(gnew);
    f = fn;
    path.history.push_back(f);
    quiet = change <= opts.tol * std::max(1.0, f) ? quiet + 1 : 0;
    if (quiet >= 5) {
      converged = true;
      ++it;
      break;
    }
  }

  P.project(B, &delta);
  path.action = P.evaluate(B, nullptr, &path.speed2);
  path.states = P.states(B);
  path.momenta = B;
  path.iterations = it;
  path.converged = converged;
  for (int k = 0; k < N; ++k) {
    Mat res = (path.states[k + 1] - path.states[k]) / P.h + L.divergence(B[k]);
    path.continuity_residual = std::max(path.continuity_residual, fro(res));
  }
  path.endpoint_residual = fro(path.states[N] - r1);
  out.distance = std::sqrt(std::max(0.0, path.action));
  return out;
}

double w2p_gradient_self_test(const DbcLindbladian& L, double p, std::uint64_t seed) {
  Rng rng(seed);
  const int d = L.dim();
  Mat r0 = 0.5 * random_density(d, rng) + 0.5 * L.sigma();
  Mat r1 = 0.5 * random_density(d, rng) + 0.5 * L.sigma();
  Problem P(L, r0, r1, p, 6, 0.0);
  Momenta B = P.initial();
  Momenta D = B;
  for (auto& Dk : D)
    for (auto& x : Dk) x = 0.05 * random_ginibre(d, rng);
  axpy(B, 1.0, scaled(D, 0.2));
  for (auto& Dk : D)
    for (auto& x : Dk) x = random_ginibre(d, rng);
  Momenta g;
  P.evaluate(B, &g, nullptr);
  double an = dot(g, D);
  const double eps = 1e-6;
  Momenta Bp = B, Bm = B;
  axpy(Bp, eps, D);
  axpy(Bm, -eps, D);
  double fd = (P.evaluate(Bp, nullptr, nullptr) - P.evaluate(Bm, nullptr, nullptr)) / (2 * eps);
  return std::abs(an - fd) / std::max(1e-12, std::abs(fd));
}

// ---------------------------------------------------------------------------

Mat hamiltonian_rho_gradient(const DbcLindbladian& L, const RhoKernel& K, const Mat& U, KernelSlot slot) {
  const int d = L.dim();
  Mat G = Mat::Zero(d, d);
  for (std::size_t j = 0; j < L.jumps().size(); ++j)
    G += K.derivative_gradient(L.jumps()[j].omega, L.partial(j, U), slot);
  return G - G.trace() / double(d) * identity(d);
}

namespace {

struct Flow {
  Mat drho, dU;
};

Flow geodesic_field(const DbcLindbladian& L, const Mat& rho, const Mat& U, double p, KernelSlot slot) {
  Onsager D(L, rho, p);
  Mat dU = -hamiltonian_rho_gradient(L, D.kernel(), U, slot);
  return {herm(D.apply(U)), herm(dU)};
}

}  // namespace

std::vector<GeodesicState> geodesic_shoot(const DbcLindbladian& L, const Mat& rho0, const Mat& U0,
                                          double p, double T, int steps, const GeodesicOptions& opts) {
  check_p(p);
  if (L.jumps().empty()) fail(Errc::NoJumps, "geodesics need jump operators");
  if (steps < 1) fail(Errc::DomainViolation, "need at least one step");
  const int d = L.dim();
  if (std::abs(U0.trace()) > 1e-12 * std::max(1.0, fro(U0)))
    fail(Errc::KernelComponent, "initial cotangent vector must be traceless");
  if (eigh(herm(rho0)).values(0) < opts.floor) fail(Errc::SingularState, "geodesics start at a full-rank state");
  auto ham = [&](const Mat& rho, const Mat& U) { return 0.5 * Onsager(L, rho, p).form(U); };

  std::vector<GeodesicState> traj;
  Mat rho = herm(rho0), U = herm(U0);
  traj.push_back({rho, U, ham(rho, U)});
  const double dt = T / steps;
  for (int n = 0; n < steps; ++n) {
    double remaining = dt, hstep = dt;
    int halvings = 0;
    while (remaining > 1e-15 * std::abs(dt)) {
      hstep = std::min(hstep, remaining);
      Mat r_new, u_new;
      bool ok = true;
      try {
        Flow k1 = geodesic_field(L, rho, U, p, opts.slot);
        Flow k2 = geodesic_field(L, rho + 0.5 * hstep * k1.drho, U + 0.5 * hstep * k1.dU, p, opts.slot);
        Flow k3 = geodesic_field(L, rho + 0.5 * hstep * k2.drho, U + 0.5 * hstep * k2.dU, p, opts.slot);
        Flow k4 = geodesic_field(L, rho + hstep * k3.drho, U + hstep * k3.dU, p, opts.slot);
        r_new = herm(rho + hstep / 6 * (k1.drho + 2 * k2.drho + 2 * k3.drho + k4.drho));
        u_new = herm(U + hstep / 6 * (k1.dU + 2 * k2.dU + 2 * k3.dU + k4.dU));
        ok = eigh(r_new).values(0) >= opts.floor;
      } catch (const Error& e) {
        if (e.code() != Errc::SingularState && e.code() != Errc::DomainViolation) throw;
        ok = false;
      }
      if (!ok) {
        if (++halvings > 20) fail(Errc::LeftPositiveCone, "geodesic left the positive cone");
        hstep *= 0.5;
        continue;
      }
      rho = r_new;
      U = u_new - u_new.trace() / double(d) * identity(d);
      remaining -= hstep;
    }
    traj.push_back({rho, U, ham(rho, U)});
  }
  return traj;
}

}  // namespace qb
