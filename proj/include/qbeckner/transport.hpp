#pragma once

#include "qbeckner/semigroup.hpp"

#include <cstdint>
#include <vector>

namespace qb {

enum class KernelDirection { Forward, Inverse };

// Which first-order kernel in the rho-derivative of [rho]_{p,omega}: the left
// slot (i = 1), the right slot (i = 2), or their average.
enum class KernelSlot { First = 1, Second = 2, Symmetrized = 0 };

struct MetricKernel {
  Mat rho;
  Mat sigma;
  double p = 2.0;
  double omega = 0.0;
};

// [rho]_{p,omega} A, or its inverse.
Mat metric_kernel_apply(const MetricKernel& K, const Mat& A, KernelDirection dir = KernelDirection::Forward);
Superoperator metric_kernel_super(const MetricKernel& K);
// Logarithmic-mean kernel sum theta_log(e^{w/2} l_k, e^{-w/2} l_i) E_k A E_i (the p -> 1 limit).
Mat log_mean_kernel_apply(const Mat& rho, double omega, const Mat& A);

// Spectral data of M = Gamma^{-1/p'} rho shared by every omega.
class RhoKernel {
 public:
  RhoKernel(const Eigh& sigma, const Mat& rho, double p, double floor = 0.0);

  double p() const { return p_; }
  const Mat& rho() const { return rho_; }

  Mat apply(double omega, const Mat& A, KernelDirection dir = KernelDirection::Forward) const;
  // (d/de) [rho + e Delta]_{p,omega} A restricted to one slot (Symmetrized: half the sum).
  Mat derivative(double omega, const Mat& Delta, const Mat& A, KernelSlot slot) const;
  // Hermitian G with Re<G, Delta> = Re<C, derivative(omega, Delta, C, slot)> for Hermitian Delta.
  Mat derivative_gradient(double omega, const Mat& C, KernelSlot slot) const;

 private:
  Mat to_m(double omega, const Mat& Delta) const;  // e^{w/2p} Gamma^{-1/p'} Delta
  double weight1(double omega, int k, int l, int i) const;
  double weight2(double omega, int k, int i, int m) const;

  Eigh sig_;
  Mat rho_;
  double p_ = 2.0;
  double a_ = 0.5;  // 1/p'
  Eigh m_;          // eigendecomposition of Gamma^{-1/p'} rho
};

// The Onsager operator D_{p,rho} U = sum_j d_j^dag([rho]_{p,w_j} d_j U).
class Onsager {
 public:
  Onsager(const DbcLindbladian& L, const Mat& rho, double p, double floor = 0.0);

  const RhoKernel& kernel() const { return K_; }
  Mat apply(const Mat& U) const;
  // <D^{-1} nu1, nu2> on the traceless Hermitian subspace.
  double tensor(const Mat& nu1, const Mat& nu2) const;
  // D^{-1} nu; KernelComponent if nu has a trace part.
  Mat pinv(const Mat& nu) const;
  // <U, D U> = sum_j <d_j U, [rho] d_j U>
  double form(const Mat& U) const;
  // Matrix of the form in the traceless Hermitian basis.
  const Eigen::MatrixXd& basis_matrix() const;

 private:
  const DbcLindbladian* L_;
  RhoKernel K_;
  mutable Eigen::MatrixXd M_;
  mutable bool have_m_ = false;
};

// Orthonormal Hilbert-Schmidt basis of traceless Hermitian d x d matrices.
std::vector<Mat> traceless_hermitian_basis(int d);
Eigen::VectorXd basis_coords(const std::vector<Mat>& basis, const Mat& X);
Mat basis_combine(const std::vector<Mat>& basis, const Eigen::VectorXd& c);

// Gamma^{-1/p'}((Gamma^{-1/p'} rho)^{p-1}) / (p-1)
Mat functional_derivative(const Eigh& sigma, const Mat& rho, double p);
// |D(delta F) + L^dag rho| / |L^dag rho|; absolute when L^dag rho vanishes.
double grad_flow_residual(const DbcLindbladian& L, const Mat& rho, double p);

// Pairing j -> j' with V_{j'} = V_j^*, omega_{j'} = -omega_j. IncompatibleJumps if none.
std::vector<int> jump_pairing(const DbcLindbladian& L);

struct W2pOptions {
  int N = 20;
  int max_iters = 5000;
  double tol = 1e-7;
  double floor = 1e-10;
};

struct TransportPath {
  int N = 0;
  std::vector<Mat> states;                // gamma_0 .. gamma_N
  std::vector<std::vector<Mat>> momenta;  // B[k][j] at midpoints
  std::vector<double> speed2;             // |B_k|^2_{-1,p,midpoint}
  std::vector<double> history;            // action per accepted iteration
  double action = 0.0;
  double continuity_residual = 0.0;  // max_k |(g_{k+1} - g_k)/h + div B_k|
  double endpoint_residual = 0.0;
  int iterations = 0;
  bool converged = true;
};

struct W2pResult {
  double distance = 0.0;
  TransportPath path;
};

W2pResult w2p_solve(const DbcLindbladian& L, const Mat& rho0, const Mat& rho1, double p,
                    const W2pOptions& opts = {});
// Exact distance for p = 2, where the metric does not depend on the state.
double flat_w22(const DbcLindbladian& L, const Mat& rho0, const Mat& rho1);

// |rho1 - rho0|_1 <= C W_{2,p}(rho0, rho1) with this C.
double transport_lower_bound_constant(const DbcLindbladian& L, double p);

// Max relative error of the analytic state gradient of the discrete action
// against central differences at a random interior path.
double w2p_gradient_self_test(const DbcLindbladian& L, double p, std::uint64_t seed = 0);

struct GeodesicState {
  Mat rho;
  Mat U;
  double hamiltonian = 0.0;
};

struct GeodesicOptions {
  KernelSlot slot = KernelSlot::Symmetrized;
  double floor = 1e-10;
};

// Hermitian G with <G, A> = sum_j <d_j U, K^{(i),j}_{rho,A}[d_j U]> for traceless Hermitian A.
Mat hamiltonian_rho_gradient(const DbcLindbladian& L, const RhoKernel& K, const Mat& U, KernelSlot slot);

std::vector<GeodesicState> geodesic_shoot(const DbcLindbladian& L, const Mat& rho0, const Mat& U0,
                                          double p, double T, int steps,
                                          const GeodesicOptions& opts = {});

}  // namespace qb
