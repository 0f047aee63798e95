#pragma once

#include "qbeckner/core.hpp"

#include <string>

namespace qb {

struct DivergenceValue {
  double value = 0.0;  // +inf signals a support violation
  std::string kind;
  double param = 0.0;
};

// tr(|Gamma^{1/p} X|^p)^{1/p}; p = +inf gives the operator norm of X.
double weighted_p_norm(const Mat& X, const Eigh& sigma, double p);
double weighted_p_norm(const Mat& X, const Mat& sigma, double p);

// Gamma^{-1/q}(|Gamma^{1/p} X|^{p/q})
Mat power_operator(const Mat& X, const Eigh& sigma, double q, double p);
Mat power_operator(const Mat& X, const Mat& sigma, double q, double p);

double entropy_functional(const Mat& X, const Eigh& sigma, double p);
double entropy_functional(const Mat& X, const Mat& sigma, double p);

// d/dp ||Y||_{p,sigma} for self-adjoint Y, via the entropy functional.
double norm_p_derivative(const Mat& Y, const Mat& sigma, double p);

enum class RelKind { Umegaki, Sandwiched, Max };
DivergenceValue relative_entropy(const Mat& rho, const Mat& sigma, RelKind kind, double p = 2.0);
DivergenceValue p_divergence(const Mat& rho, const Mat& sigma, double p);
DivergenceValue p_divergence(const Mat& rho, const Eigh& sigma, double p);

double variance(const Mat& X, const Mat& sigma);
double q_variance(const Mat& Y, const Mat& sigma, double q);

DivergenceValue chi2_divergence(const Mat& rho, const Mat& sigma, const Fn1& kappa);

struct SandwichConstants {
  double k_p = 0.0;
  double C_sigma = 0.0;
};
SandwichConstants sandwich_constants(const Mat& sigma, double p, double c);
double sandwich_k(double p, double c);

// Support threshold for singular reference states.
inline constexpr double kSupportFloor = 1e-12;

}  // namespace qb
