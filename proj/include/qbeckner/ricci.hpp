#pragma once

#include "qbeckner/transport.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qb {

// Hess F_{p,sigma}(rho)[U, U] = sum_j <d_j U, K_{rho, L^dag rho}[d_j U]> - <U, L^dag D U>.
double hessian_form(const DbcLindbladian& L, const Mat& rho, double p, const Mat& U,
                   KernelSlot slot = KernelSlot::Symmetrized);
// Polarized form.
double hessian_bilinear(const DbcLindbladian& L, const Mat& rho, double p, const Mat& U, const Mat& V,
                        KernelSlot slot = KernelSlot::Symmetrized);

// Second central difference of F_{p,sigma} along the shot geodesic through (rho, U).
double hessian_finite_difference(const DbcLindbladian& L, const Mat& rho, double p, const Mat& U,
                                 double step = 1e-3);

struct RicciEstimate {
  double kappa = 0.0;
  int samples = 0;
  Mat worst_state;
  Mat worst_direction;
};

struct RicciOptions {
  int num_states = 64;
  std::uint64_t seed = 0;
  KernelSlot slot = KernelSlot::Symmetrized;
};

// Smallest generalized eigenvalue of (Hess, D_{p,rho}) on traceless Hermitian U.
double ricci_at_state(const DbcLindbladian& L, const Mat& rho, double p, KernelSlot slot = KernelSlot::Symmetrized,
                      Mat* worst_direction = nullptr);
std::vector<Mat> ricci_sample_states(const DbcLindbladian& L, int n, std::uint64_t seed);
// Minimum over a seeded state family; an upper bound on the true infimum.
RicciEstimate ricci_estimate(const DbcLindbladian& L, double p, const RicciOptions& opts = {});

// Slack tolerance for checks that involve a solved distance.
inline constexpr double kTransportTol = 0.02;

struct CheckEntry {
  std::string check;
  int index = 0;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckEntry> entries;
  bool all_pass() const;
  double worst_slack() const;
};

enum class InequalityCheck { Hwi, BecknerFromRicci, Tcp, Diameter };
const char* inequality_check_name(InequalityCheck c);

// Per state: HWI, Beckner with alpha = kappa p / 2, transport cost with
// c = 2 / kappa, and the diameter bound on consecutive pairs.
CheckReport inequality_checks(const DbcLindbladian& L, double p, double kappa, const std::vector<Mat>& states,
                              const std::vector<InequalityCheck>& checks, const W2pOptions& wopts = {});

enum class DynamicMode { Contraction, GradientEstimate, Intertwining };
const char* dynamic_mode_name(DynamicMode m);

CheckReport dynamic_checks(const DbcLindbladian& L, double p, double kappa, DynamicMode mode,
                           const std::vector<Mat>& states, const std::vector<double>& times = {0.1, 0.5, 1.0},
                           std::uint64_t seed = 0, const W2pOptions& wopts = {});

}  // namespace qb
