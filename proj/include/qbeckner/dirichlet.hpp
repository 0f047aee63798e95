#pragma once

#include "qbeckner/semigroup.hpp"

namespace qb {

enum class DirichletRoute { Definition, Representation };

struct DirichletValue {
  double value = 0.0;
  double p = 2.0;
  DirichletRoute route = DirichletRoute::Definition;
};

// p-Dirichlet form of a PSD X; |p - 1| < kNearOne uses the logarithmic limit.
DirichletValue dirichlet_form(const DbcLindbladian& L, const Mat& X, double p,
                              DirichletRoute route = DirichletRoute::Definition);
DirichletValue dirichlet_form(const DbcLindbladian& L, const Mat& X, double p, const Eigh& Xeig,
                              DirichletRoute route);

// |definition - representation| / (1 + definition)
double representation_check(const DbcLindbladian& L, const Mat& X, double p);

// (4/p^2) E_p(Gamma^{-1} rho), the decay rate of F_p along the flow.
double entropy_production(const DbcLindbladian& L, const Mat& rho, double p);

// Gamma(X,Y) for order 1, Gamma_2(X,Y) for order 2. Requires sigma = I/d.
Mat carre_du_champ(const DbcLindbladian& L, const Mat& X, const Mat& Y, int order);

bool is_tracial(const DbcLindbladian& L, double tol = 1e-10);

}  // namespace qb
