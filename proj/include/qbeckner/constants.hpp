#pragma once

#include "qbeckner/semigroup.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qb {

enum class ConstantKind { Poincare, Beckner, Mlsi, Lsi, DualBeckner };

const char* constant_kind_name(ConstantKind k);

struct ConstantEstimate {
  ConstantKind kind = ConstantKind::Poincare;
  double param = 0.0;  // p for Beckner, q for dual Beckner
  double value = 0.0;
  Mat witness;         // empty when the analytic cap binds
  int num_starts = 0;
  double best_residual = 0.0;  // gradient norm at the best start
  bool capped = false;
  double best_ratio = 0.0;     // raw optimizer value before the cap
};

struct EstimateOptions {
  int num_starts = 32;
  int max_iters = 2000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

// Rayleigh ratio of the defining inequality at a PSD witness (no cap).
double inequality_ratio(const DbcLindbladian& L, ConstantKind kind, double param, const Mat& X);

// Linearization limit of the ratio at X -> I, if known: p lambda / 2 or lambda / 2.
std::optional<double> analytic_cap(ConstantKind kind, double param, double lambda);

ConstantEstimate estimate_constant(const DbcLindbladian& L, ConstantKind kind, double param = 0.0,
                                   const EstimateOptions& opts = {});

// Beckner constant of the depolarizing semigroup with sigma = I/d, via the
// two-point reduction.
double depol_classical(double p, int d);
double depol_classical_theta(double p, double theta);

struct LedgerEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs for lhs <= rhs
  bool hard = false;
  bool pass = false;
};

struct BoundLedger {
  std::vector<LedgerEntry> entries;
  bool hard_pass() const;
  bool all_pass() const;
};

struct ConstantSet {
  std::optional<double> lambda;
  std::map<double, ConstantEstimate> beckner;       // keyed by p
  std::map<double, ConstantEstimate> dual_beckner;  // keyed by q
  std::optional<ConstantEstimate> mlsi, lsi;
};

inline constexpr double kLedgerHardTol = 1e-4;
inline constexpr double kLedgerSoftTol = 1e-3;

BoundLedger bound_ledger(const ConstantSet& c, double sigma_min, const std::vector<double>& p_grid);

double stability_factor(const DbcLindbladian& L, const DbcLindbladian& Lp, double p);

// Mixing-time bound h(p, sigma_min, eps) given alpha_p.
double mixing_bound(double p, double alpha_p, double sigma_min, double eps);
double mixing_bound_inf(const std::map<double, double>& alpha, double sigma_min, double eps);
// Smallest t with max over witness states of |P_t^dag rho - sigma|_1 <= eps,
// refined by bisection to 1% in t.
double mixing_empirical(const DbcLindbladian& L, double eps, std::uint64_t seed = 0);
// The bisection bracket: distance > eps at lower (or lower = 0), <= eps at upper.
struct MixingBracket {
  double lower = 0.0, upper = 0.0;
};
MixingBracket mixing_empirical_bracket(const DbcLindbladian& L, double eps, std::uint64_t seed = 0);
std::vector<Mat> mixing_witnesses(const DbcLindbladian& L, std::uint64_t seed);

struct MomentReport {
  double moment_lhs = 0.0, moment_rhs = 0.0;
  double exp_lhs = 0.0, exp_rhs = 0.0;
  double tail_lhs = 0.0, tail_rhs = 0.0;
  double moment_slack() const { return moment_rhs - moment_lhs; }
  double exp_slack() const { return exp_rhs - exp_lhs; }
  double tail_slack() const { return tail_rhs - tail_lhs; }
};

double kappa_moment(double s);  // (1 - e^{-(s+1)/2})^{-1}

// Moment, exponential-integrability and tail bounds for a tracial generator.
// X is centered at its mean tr(X)/d.
MomentReport moment_concentration_check(const DbcLindbladian& L, const Mat& X, double r, double a,
                                        double s, double t);

}  // namespace qb
