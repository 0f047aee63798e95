#include "qbeckner/ricci.hpp"

#include "qbeckner/dirichlet.hpp"
#include "qbeckner/entropy.hpp"
#include "qbeckner/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace qb {

namespace {

// U -> sum_j d_j^dag K_{rho,A}[d_j U] - L^dag D U, the linear map behind the Hessian.
Mat hessian_image(const DbcLindbladian& L, const Onsager& D, const Mat& A, const Mat& V, KernelSlot slot) {
  Mat r = Mat::Zero(V.rows(), V.cols());
  for (std::size_t j = 0; j < L.jumps().size(); ++j)
    r += L.partial_adj_hs(j, D.kernel().derivative(L.jumps()[j].omega, A, L.partial(j, V), slot));
  return r - L.apply_dual(D.apply(V));
}

bool needs_positive(InequalityCheck c) {
  return c == InequalityCheck::BecknerFromRicci || c == InequalityCheck::Diameter || c == InequalityCheck::Tcp;
}

CheckEntry entry(const std::string& name, int index, double t, double lhs, double rhs, double tol) {
  CheckEntry e{name, index, t, lhs, rhs, rhs - lhs, false};
  e.pass = e.slack >= -tol;
  return e;
}

}  // namespace

double hessian_form(const DbcLindbladian& L, const Mat& rho, double p, const Mat& U, KernelSlot slot) {
  Onsager D(L, rho, p);
  return inner_hs(U, hessian_image(L, D, L.apply_dual(rho), U, slot)).real();
}

// Polarization of the quadratic form; the direct bilinear extension of the
// formula is not symmetric once the metric depends on the state.
double hessian_bilinear(const DbcLindbladian& L, const Mat& rho, double p, const Mat& U, const Mat& V,
                        KernelSlot slot) {
  return 0.25 * (hessian_form(L, rho, p, Mat(U + V), slot) - hessian_form(L, rho, p, Mat(U - V), slot));
}

double hessian_finite_difference(const DbcLindbladian& L, const Mat& rho, double p, const Mat& U, double step) {
  auto F = [&](const Mat& r) { return p_divergence(r, L.sigma_eigh(), p).value; };
  auto fwd = geodesic_shoot(L, rho, U, p, step, 4);
  auto bwd = geodesic_shoot(L, rho, Mat(-U), p, step, 4);
  return (F(fwd.back().rho) - 2 * F(rho) + F(bwd.back().rho)) / (step * step);
}

double ricci_at_state(const DbcLindbladian& L, const Mat& rho, double p, KernelSlot slot, Mat* worst_direction) {
  Onsager D(L, rho, p);
  auto basis = traceless_hermitian_basis(L.dim());
  const int n = static_cast<int>(basis.size());
  Mat A = L.apply_dual(rho);
  Eigen::MatrixXd H(n, n);
  for (int b = 0; b < n; ++b) {
    Mat img = hessian_image(L, D, A, basis[b], slot);
    for (int a = 0; a < n; ++a) H(a, b) = inner_hs(basis[a], img).real();
  }
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(H, D.basis_matrix());
  if (es.info() != Eigen::Success) fail(Errc::ResidualTooLarge, "generalized eigenproblem failed");
  if (worst_direction) {
    Eigen::VectorXd v = es.eigenvectors().col(0);
    *worst_direction = basis_combine(basis, v / v.norm());
  }
  return es.eigenvalues()(0);
}

std::vector<Mat> ricci_sample_states(const DbcLindbladian& L, int n, std::uint64_t seed) {
  static const double weights[] = {0.0, 0.25, 0.5, 0.75};
  Rng rng(seed);
  std::vector<Mat> out;
  // sigma and I/d first, then Hilbert-Schmidt states mixed toward sigma
  if (n > 0) out.push_back(L.sigma());
  if (n > 1) out.push_back(identity(L.dim()) / double(L.dim()));
  for (int i = 2; i < n; ++i) {
    double w = weights[(i - 2) % 4];
    out.push_back(herm((1 - w) * random_density(L.dim(), rng) + w * L.sigma()));
  }
  return out;
}

RicciEstimate ricci_estimate(const DbcLindbladian& L, double p, const RicciOptions& opts) {
  if (L.jumps().empty()) fail(Errc::NoJumps, "curvature needs jump operators");
  RicciEstimate best;
  best.kappa = std::numeric_limits<double>::infinity();
  for (const Mat& rho : ricci_sample_states(L, opts.num_states, opts.seed)) {
    Mat dir;
    double k = ricci_at_state(L, rho, p, opts.slot, &dir);
    ++best.samples;
    if (k < best.kappa) {
      best.kappa = k;
      best.worst_state = rho;
      best.worst_direction = dir;
    }
  }
  return best;
}

bool CheckReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.pass; });
}

double CheckReport::worst_slack() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) w = std::min(w, e.slack);
  return w;
}

const char* inequality_check_name(InequalityCheck c) {
  switch (c) {
    case InequalityCheck::Hwi: return "hwi";
    case InequalityCheck::BecknerFromRicci: return "beckner_from_ricci";
    case InequalityCheck::Tcp: return "tcp";
    case InequalityCheck::Diameter: return "diameter";
  }
  return "?";
}

const char* dynamic_mode_name(DynamicMode m) {
  switch (m) {
    case DynamicMode::Contraction: return "contraction";
    case DynamicMode::GradientEstimate: return "gradient_estimate";
    case DynamicMode::Intertwining: return "intertwining";
  }
  return "?";
}

CheckReport inequality_checks(const DbcLindbladian& L, double p, double kappa, const std::vector<Mat>& states,
                              const std::vector<InequalityCheck>& checks, const W2pOptions& wopts) {
  for (InequalityCheck c : checks)
    if (needs_positive(c) && !(kappa > 0))
      fail(Errc::NonPositiveCurvature, std::string(inequality_check_name(c)) + " needs positive curvature");
  CheckReport rep;
  const Mat& sigma = L.sigma();
  const double smin = L.sigma_min();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Mat& rho = states[i];
    const int idx = static_cast<int>(i);
    double F = p_divergence(rho, L.sigma_eigh(), p).value;
    // E_{p,L}(Gamma^{-1} rho) = (p^2 / 4) times the decay rate of F_p
    double E = p * p / 4 * entropy_production(L, rho, p);
    bool need_w = std::any_of(checks.begin(), checks.end(), [](InequalityCheck c) {
      return c == InequalityCheck::Hwi || c == InequalityCheck::Tcp;
    });
    double W = need_w ? w2p_solve(L, rho, sigma, p, wopts).distance : 0.0;
    for (InequalityCheck c : checks) {
      switch (c) {
        case InequalityCheck::Hwi: {
          double t1 = 2.0 / p * W * std::sqrt(std::max(0.0, E)), t2 = kappa / 2 * W * W;
          double scale = std::max({std::abs(F), t1, std::abs(t2)});
          rep.entries.push_back(entry("hwi", idx, 0.0, F, t1 - t2, kTransportTol * scale));
          break;
        }
        case InequalityCheck::BecknerFromRicci:
          rep.entries.push_back(entry("beckner_from_ricci", idx, 0.0, kappa * p / 2 * F, E / p, 1e-9));
          break;
        case InequalityCheck::Tcp: {
          double rhs = std::sqrt(2.0 / kappa * std::max(0.0, F));
          rep.entries.push_back(entry("tcp", idx, 0.0, W, rhs, kTransportTol * std::max(W, rhs)));
          break;
        }
        case InequalityCheck::Diameter: {
          double bound = 8.0 * (std::pow(smin, 1 - p) - 1) / (kappa * p * (p - 1));
          const Mat& other = i + 1 < states.size() ? states[i + 1] : sigma;
          double w = w2p_solve(L, rho, other, p, wopts).distance;
          rep.entries.push_back(entry("diameter", idx, 0.0, w * w, bound, kTransportTol * w * w));
          break;
        }
      }
    }
  }
  return rep;
}

CheckReport dynamic_checks(const DbcLindbladian& L, double p, double kappa, DynamicMode mode,
                           const std::vector<Mat>& states, const std::vector<double>& times, std::uint64_t seed,
                           const W2pOptions& wopts) {
  CheckReport rep;
  Rng rng(seed);
  const int d = L.dim();
  const std::string name = dynamic_mode_name(mode);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const int idx = static_cast<int>(i);
    const Mat& rho = states[i];
    switch (mode) {
      case DynamicMode::Contraction: {
        if (i + 1 >= states.size()) break;
        const Mat& rho1 = states[i + 1];
        double w0 = w2p_solve(L, rho, rho1, p, wopts).distance;
        for (double t : times) {
          double wt = w2p_solve(L, L.evolve_schrodinger(t, rho), L.evolve_schrodinger(t, rho1), p, wopts).distance;
          double rhs = std::exp(-kappa * t) * w0;
          rep.entries.push_back(entry(name, idx, t, wt, rhs, kTransportTol * rhs));
        }
        break;
      }
      case DynamicMode::GradientEstimate: {
        Mat U = random_hermitian(d, rng);
        U -= U.trace() / double(d) * identity(d);
        for (double t : times) {
          double lhs = Onsager(L, rho, p).form(L.evolve_heisenberg(t, U));
          double rhs = std::exp(-2 * kappa * t) * Onsager(L, L.evolve_schrodinger(t, rho), p).form(U);
          rep.entries.push_back(entry(name, idx, t, lhs, rhs, 1e-8));
        }
        break;
      }
      case DynamicMode::Intertwining: {
        Mat X = random_ginibre(d, rng);
        X /= fro(X);
        for (double t : times) {
          double worst = 0.0;
          for (std::size_t j = 0; j < L.jumps().size(); ++j) {
            Mat a = L.partial(j, L.evolve_heisenberg(t, X));
            Mat b = std::exp(-kappa * t) * L.evolve_heisenberg(t, L.partial(j, X));
            worst = std::max(worst, fro(a - b));
          }
          rep.entries.push_back(entry(name, idx, t, worst, 0.0, 1e-10));
        }
        break;
      }
    }
  }
  return rep;
}

}  // namespace qb
