#include "qbeckner/semigroup.hpp"

#include "qbeckner/random.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qb {

double rel_diff(const Mat& A, const Mat& B) {
  double s = std::max(A.norm(), B.norm());
  if (s == 0.0) return 0.0;
  return (A - B).norm() / s;
}

std::vector<Mat> pauli_matrices() {
  Mat x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, cplx(0, -1), cplx(0, 1), 0;
  z << 1, 0, 0, -1;
  return {x, y, z};
}

Mat matrix_unit(int d, int i, int k) {
  Mat E = Mat::Zero(d, d);
  E(i, k) = 1.0;
  return E;
}

double DbcResiduals::worst() const {
  return std::max({unitality, invariance, gns_symmetry, modular_commute, pairing});
}

namespace {

Eigh full_rank(const Mat& sigma) {
  Eigh e = eigh(sigma);
  if (e.values.size() == 0 || e.values(0) < kStrictFloor)
    fail(Errc::SingularState, "invariant state is not full rank");
  return e;
}

bool is_partner(const JumpTerm& a, const JumpTerm& b) {
  double s = std::max({1.0, a.V.norm(), b.V.norm()});
  return (a.V.adjoint() - b.V).norm() <= 1e-9 * s && std::abs(a.omega + b.omega) <= 1e-9;
}

}  // namespace

std::vector<JumpTerm> pairing_closure(std::vector<JumpTerm> jumps) {
  const std::size_t n = jumps.size();
  for (std::size_t j = 0; j < n; ++j) {
    bool found = false;
    for (const auto& other : jumps) {
      if (is_partner(jumps[j], other)) {
        found = true;
        break;
      }
    }
    if (!found) jumps.push_back({jumps[j].V.adjoint(), -jumps[j].omega});
  }
  return jumps;
}

Superoperator generator_from_jumps(const Mat& sigma, const std::vector<JumpTerm>& jumps) {
  int d = static_cast<int>(sigma.rows());
  Mat I = identity(d);
  Mat G = Mat::Zero(d * d, d * d);
  for (const auto& jt : jumps) {
    const Mat& V = jt.V;
    Mat Vs = V.adjoint();
    double a = std::exp(-jt.omega / 2), b = std::exp(jt.omega / 2);
    // a (V* X V - V* V X) + b (V X V* - X V V*)
    Mat VsV = Vs * V, VVs = V * Vs;
    G += a * (Eigen::kroneckerProduct(V.transpose(), Vs).eval() -
              Eigen::kroneckerProduct(I, VsV).eval());
    G += b * (Eigen::kroneckerProduct(Vs.transpose(), V).eval() -
              Eigen::kroneckerProduct(VVs.transpose(), I).eval());
  }
  return {d, G};
}

DbcLindbladian::DbcLindbladian(Mat sigma, std::vector<JumpTerm> jumps, Superoperator generator)
    : dim_(static_cast<int>(sigma.rows())),
      sigma_(std::move(sigma)),
      jumps_(std::move(jumps)),
      gen_(std::move(generator)) {
  sig_ = full_rank(sigma_);
  dual_ = gen_.adjoint();
  prepare();
}

void DbcLindbladian::prepare() {
  Sp_ = super_right(sigma_pow(0.5)).matrix;
  Sm_ = super_right(sigma_pow(-0.5)).matrix;
  Mat H = Sp_ * gen_.matrix * Sm_;
  double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  sym_ok_ = herm_residual(H) <= 1e-8 * scale;
  if (sym_ok_) {
    Eigen::SelfAdjointEigenSolver<Mat> es(herm(H));
    lam_ = es.eigenvalues();
    W_ = es.eigenvectors();
  }
}

Mat DbcLindbladian::sigma_pow(double s) const {
  return sig_.compose(sig_.values.array().pow(s).matrix());
}

Mat DbcLindbladian::gamma(double s, const Mat& X) const {
  Mat h = sigma_pow(s / 2);
  return h * X * h;
}

Mat DbcLindbladian::partial(std::size_t j, const Mat& X) const {
  if (j >= jumps_.size()) fail(Errc::IndexOutOfRange, "jump index");
  const Mat& V = jumps_[j].V;
  return V * X - X * V;
}

Mat DbcLindbladian::partial_adj_kms(std::size_t j, const Mat& B) const {
  if (j >= jumps_.size()) fail(Errc::IndexOutOfRange, "jump index");
  const Mat Vs = jumps_[j].V.adjoint();
  double w = jumps_[j].omega;
  return std::exp(-w / 2) * Vs * B - std::exp(w / 2) * B * Vs;
}

Mat DbcLindbladian::partial_adj_hs(std::size_t j, const Mat& B) const {
  if (j >= jumps_.size()) fail(Errc::IndexOutOfRange, "jump index");
  const Mat Vs = jumps_[j].V.adjoint();
  return Vs * B - B * Vs;
}

std::vector<Mat> DbcLindbladian::gradient(const Mat& X) const {
  std::vector<Mat> g;
  g.reserve(jumps_.size());
  for (std::size_t j = 0; j < jumps_.size(); ++j) g.push_back(partial(j, X));
  return g;
}

Mat DbcLindbladian::divergence(const std::vector<Mat>& B) const {
  if (B.size() != jumps_.size()) fail(Errc::IndexOutOfRange, "divergence needs one entry per jump");
  Mat r = Mat::Zero(dim_, dim_);
  for (std::size_t j = 0; j < B.size(); ++j) r -= partial_adj_hs(j, B[j]);
  return r;
}

Superoperator DbcLindbladian::propagator(double t) const {
  if (t < 0) fail(Errc::DomainViolation, "negative time");
  if (sym_ok_) {
    RVec e = (t * lam_).array().exp().matrix();
    return {dim_, Sm_ * W_ * e.cast<cplx>().asDiagonal() * W_.adjoint() * Sp_};
  }
  Mat tm = t * gen_.matrix;
  return {dim_, tm.exp()};
}

Mat DbcLindbladian::evolve_heisenberg(double t, const Mat& X) const {
  if (t == 0.0) return X;
  return propagator(t).apply(X);
}

Mat DbcLindbladian::evolve_schrodinger(double t, const Mat& rho) const {
  if (t == 0.0) return rho;
  return propagator(t).adjoint().apply(rho);
}

DbcResiduals DbcLindbladian::residuals() const {
  DbcResiduals r;
  Mat I = identity(dim_);
  double gs = std::max(1.0, gen_.matrix.norm());
  r.unitality = apply(I).cwiseAbs().maxCoeff();
  r.invariance = apply_dual(sigma_).cwiseAbs().maxCoeff();
  Mat S = super_right(sigma_).matrix;
  r.gns_symmetry = (S * gen_.matrix - gen_.matrix.adjoint() * S).norm() / gs;
  Mat D = super_modular(sigma_).matrix;
  r.modular_commute = (gen_.matrix * D - D * gen_.matrix).norm() / gs;
  for (const auto& j : jumps_) {
    bool found = false;
    for (const auto& o : jumps_) found = found || is_partner(j, o);
    if (!found) r.pairing = 1.0;
  }
  return r;
}

DbcLindbladian build_from_jumps(const Mat& sigma, std::vector<JumpTerm> jumps) {
  int d = static_cast<int>(sigma.rows());
  Eigh e = full_rank(sigma);
  Mat sinv = e.compose(e.values.cwiseInverse());
  for (const auto& j : jumps) {
    if (j.V.rows() != d || j.V.cols() != d) fail(Errc::NotModularEigenvector, "jump has wrong shape");
    double n = j.V.norm();
    if (std::abs(j.V.trace()) > 1e-10 * std::max(n, 1e-300) && n > 0)
      fail(Errc::NotModularEigenvector, "jump operator is not traceless");
    Mat r = sigma * j.V * sinv - std::exp(-j.omega) * j.V;
    if (r.norm() > 1e-9 * n) {
      std::ostringstream os;
      os << "modular eigen-residual " << r.norm() / std::max(n, 1e-300);
      fail(Errc::NotModularEigenvector, os.str());
    }
  }
  jumps = pairing_closure(std::move(jumps));
  Superoperator G = generator_from_jumps(sigma, jumps);
  return DbcLindbladian(sigma, std::move(jumps), std::move(G));
}

DbcLindbladian depolarizing(const Mat& sigma, double gamma) {
  if (!(gamma > 0)) fail(Errc::DomainViolation, "depolarizing rate must be positive");
  int d = static_cast<int>(sigma.rows());
  full_rank(sigma);
  // X -> gamma (tr(sigma X) I - X)
  Mat G = gamma * (vec(identity(d)) * vec(sigma).adjoint() - Mat::Identity(d * d, d * d));
  Superoperator gen{d, G};
  std::vector<JumpTerm> jumps = alicki_decompose(gen, sigma);
  return DbcLindbladian(sigma, std::move(jumps), gen);
}

DbcLindbladian random_dbc(const Mat& sigma, int num_offdiag_pairs, int num_diag,
                          std::uint64_t seed) {
  int d = static_cast<int>(sigma.rows());
  Eigh e = full_rank(sigma);
  const Mat& Q = e.vectors;
  Rng rng(seed);
  std::vector<std::pair<int, int>> pairs;
  // Random spanning tree first, so d-1 pairs already connect all levels.
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  for (int i = d - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
  for (int m = 1; m < d && static_cast<int>(pairs.size()) < num_offdiag_pairs; ++m) {
    int parent = order[rng.index(m)];
    pairs.emplace_back(std::min(parent, order[m]), std::max(parent, order[m]));
  }
  while (static_cast<int>(pairs.size()) < num_offdiag_pairs && d > 1) {
    int i = rng.index(d), k = rng.index(d - 1);
    if (k >= i) ++k;
    pairs.emplace_back(std::min(i, k), std::max(i, k));
  }
  std::vector<JumpTerm> jumps;
  for (auto [i, k] : pairs) {
    double c = rng.uniform(0.5, 1.5);
    Mat V = c * Q * matrix_unit(d, i, k) * Q.adjoint();
    jumps.push_back({V, std::log(e.values(k) / e.values(i))});
  }
  for (int m = 0; m < num_diag && d > 1; ++m) {
    RVec v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.normal();
    v.array() -= v.mean();
    Mat D = Q * v.cast<cplx>().asDiagonal() * Q.adjoint();
    jumps.push_back({herm(D), 0.0});
  }
  return build_from_jumps(sigma, std::move(jumps));
}

std::vector<JumpTerm> alicki_decompose(const Superoperator& generator, const Mat& sigma) {
  const int d = static_cast<int>(sigma.rows());
  const int n = d * d;
  Eigh e = full_rank(sigma);
  const Mat& Q = e.vectors;
  const Mat& M = generator.matrix;
  const double scale = std::max(1.0, M.norm());
  if (d == 1) return {};

  // Work in the eigenbasis of sigma.
  Mat U = Eigen::kroneckerProduct(Q.conjugate(), Q).eval();
  Mat Mt = U.adjoint() * M * U;

  // Orthonormal basis F_0 = I/sqrt(d), off-diagonal units, traceless diagonal.
  std::vector<Mat> F;
  std::vector<double> ratio;
  F.push_back(identity(d) / std::sqrt(static_cast<double>(d)));
  ratio.push_back(1.0);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      if (i != k) {
        F.push_back(matrix_unit(d, i, k));
        ratio.push_back(e.values(i) / e.values(k));
      }
  for (int l = 1; l < d; ++l) {
    Mat D = Mat::Zero(d, d);
    for (int m = 0; m < l; ++m) D(m, m) = 1.0;
    D(l, l) = -static_cast<double>(l);
    F.push_back(D / std::sqrt(static_cast<double>(l * (l + 1))));
    ratio.push_back(1.0);
  }

  // Coefficients of Mt in the basis {E_uv^T kron E_xy^*}, then in {F_b^T kron F_a^*}.
  Mat mE(n, n);
  for (int v = 0; v < d; ++v)
    for (int u = 0; u < d; ++u)
      for (int y = 0; y < d; ++y)
        for (int x = 0; x < d; ++x) mE(x + y * d, u + v * d) = Mt(y + v * d, x + u * d);
  Mat P(n, n);
  for (int a = 0; a < n; ++a) P.col(a) = vec(F[a]).conjugate();
  Mat c = P.adjoint() * mE * P;

  // Coherent part: the remainder N = Mt - Phi must have the form I kron K + conj(K) kron I.
  Mat Phi = Mat::Zero(n, n);
  for (int a = 1; a < n; ++a)
    for (int b = 1; b < n; ++b)
      if (c(a, b) != cplx(0.0))
        Phi += c(a, b) * Eigen::kroneckerProduct(F[b].transpose(), F[a].adjoint()).eval();
  Mat N = Mt - Phi;
  Mat A = Mat::Zero(d, d);
  for (int b = 0; b < d; ++b) A += N.block(b * d, b * d, d, d);
  A /= static_cast<double>(d);
  Mat K = A - (A.trace() / (2.0 * d)) * identity(d);
  Mat Nrec = Eigen::kroneckerProduct(identity(d), K).eval() +
             Eigen::kroneckerProduct(K.conjugate(), identity(d)).eval();
  double struct_res = (N - Nrec).norm() / scale;
  Mat PhiI = unvec(Phi * vec(identity(d)), d);
  Mat H = (K + 0.5 * PhiI) / cplx(0, 1);
  H -= (H.trace() / static_cast<double>(d)) * identity(d);
  double coherent = std::max(struct_res, H.norm() / scale);
  if (coherent > 1e-8) {
    std::ostringstream os;
    os << "generator has a coherent or non-GKSL part, residual " << coherent;
    fail(Errc::ResidualTooLarge, os.str());
  }

  // Self-adjointness in the GNS inner product.
  Mat S = super_right(sigma).matrix;
  double sa = (S * M - M.adjoint() * S).norm() / scale;
  if (sa > 1e-8) {
    std::ostringstream os;
    os << "GNS self-adjointness residual " << sa;
    fail(Errc::NotDbc, os.str());
  }

  // Group basis elements by modular eigenvalue.
  std::vector<int> group(n, -1);
  std::vector<double> gratio;
  for (int a = 1; a < n; ++a) {
    for (std::size_t g = 0; g < gratio.size(); ++g) {
      if (std::abs(std::log(ratio[a]) - std::log(gratio[g])) <= kDegenerateRel) {
        group[a] = static_cast<int>(g);
        break;
      }
    }
    if (group[a] < 0) {
      group[a] = static_cast<int>(gratio.size());
      gratio.push_back(ratio[a]);
    }
  }
  double cross = 0.0;
  for (int a = 1; a < n; ++a)
    for (int b = 1; b < n; ++b)
      if (group[a] != group[b]) cross = std::max(cross, std::abs(c(a, b)));
  if (cross > 1e-8 * scale) {
    std::ostringstream os;
    os << "coefficients couple distinct modular eigenspaces, residual " << cross;
    fail(Errc::NotDbc, os.str());
  }

  std::vector<JumpTerm> jumps;
  double discarded = 0.0;
  for (std::size_t g = 0; g < gratio.size(); ++g) {
    double r = gratio[g];
    bool unit = std::abs(std::log(r)) <= kDegenerateRel;
    if (!unit && r < 1.0) continue;  // emitted as adjoints of the r > 1 groups
    std::vector<int> idx;
    for (int a = 1; a < n; ++a)
      if (group[a] == static_cast<int>(g)) idx.push_back(a);
    const int m = static_cast<int>(idx.size());
    Mat cg(m, m);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) cg(i, k) = c(idx[i], idx[k]);
    Eigen::SelfAdjointEigenSolver<Mat> es(herm(cg));
    const double omega = unit ? 0.0 : -std::log(r);
    for (int k = 0; k < m; ++k) {
      double mu = es.eigenvalues()(k);
      if (mu < 0) {
        discarded = std::max(discarded, -mu);
        continue;
      }
      if (mu <= 1e-14 * scale) continue;
      Mat L = Mat::Zero(d, d);
      for (int b = 0; b < m; ++b) L += std::conj(es.eigenvectors()(b, k)) * F[idx[b]];
      L *= std::sqrt(mu);
      if (unit) {
        jumps.push_back({Q * (L / 2.0) * Q.adjoint(), 0.0});
        jumps.push_back({Q * (L.adjoint() / 2.0) * Q.adjoint(), 0.0});
      } else {
        Mat V = L / std::sqrt(2.0 * std::exp(-omega / 2));
        jumps.push_back({Q * V * Q.adjoint(), omega});
        jumps.push_back({Q * V.adjoint() * Q.adjoint(), -omega});
      }
    }
  }
  if (discarded > 1e-8 * scale) {
    std::ostringstream os;
    os << "PSD projection discarded weight " << discarded;
    fail(Errc::ResidualTooLarge, os.str());
  }

  Superoperator rebuilt = generator_from_jumps(sigma, jumps);
  double res = (rebuilt.matrix - M).norm() / scale;
  if (res > 1e-8) {
    std::ostringstream os;
    os << "reconstruction residual " << res;
    fail(Errc::ResidualTooLarge, os.str());
  }
  return jumps;
}

Mat evolve(const DbcLindbladian& L, double t, Picture picture, const Mat& X) {
  if (t < 0) fail(Errc::DomainViolation, "negative time");
  return picture == Picture::Heisenberg ? L.evolve_heisenberg(t, X) : L.evolve_schrodinger(t, X);
}

PrimitivityReport primitivity(const DbcLindbladian& L, double threshold) {
  PrimitivityReport r;
  const Mat& G = L.generator().matrix;
  Eigen::ComplexEigenSolver<Mat> ces(G);
  Vec ev = ces.eigenvalues();
  double scale = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    r.eigenvalue_realness_residual = std::max(r.eigenvalue_realness_residual, std::abs(ev(i).imag()));
  RVec re(ev.size());
  if (L.symmetric_spectrum()) {
    Mat H = super_right(L.sigma_pow(0.5)).matrix * G * super_right(L.sigma_pow(-0.5)).matrix;
    re = Eigen::SelfAdjointEigenSolver<Mat>(herm(H)).eigenvalues();
  } else {
    re = ev.real();
  }
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < re.size(); ++i) {
    if (std::abs(re(i)) <= threshold * scale || scale == 0.0) {
      ++r.kernel_dimension;
    } else {
      gap = std::min(gap, -re(i));
    }
  }
  r.spectral_gap = std::isfinite(gap) ? gap : 0.0;
  return r;
}

}  // namespace qb
