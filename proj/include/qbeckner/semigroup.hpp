#pragma once

#include "qbeckner/core.hpp"

#include <cstdint>
#include <vector>

namespace qb {

struct JumpTerm {
  Mat V;
  double omega = 0.0;
};

struct PrimitivityReport {
  int kernel_dimension = 0;
  double spectral_gap = 0.0;
  double eigenvalue_realness_residual = 0.0;
  bool primitive() const { return kernel_dimension == 1; }
};

struct DbcResiduals {
  double unitality = 0.0;       // |L(I)|
  double invariance = 0.0;      // |L^dag(sigma)|
  double gns_symmetry = 0.0;    // |S L - L^dag S|, relative
  double modular_commute = 0.0; // |L Delta - Delta L|, relative
  double pairing = 0.0;         // 0 if jump list is closed under adjoints
  double worst() const;
};

class DbcLindbladian {
 public:
  DbcLindbladian() = default;
  // Unchecked assembly; prefer the named constructors below.
  DbcLindbladian(Mat sigma, std::vector<JumpTerm> jumps, Superoperator generator);

  int dim() const { return dim_; }
  const Mat& sigma() const { return sigma_; }
  const Eigh& sigma_eigh() const { return sig_; }
  double sigma_min() const { return sig_.values(0); }
  const std::vector<JumpTerm>& jumps() const { return jumps_; }
  const Superoperator& generator() const { return gen_; }
  const Superoperator& dual_generator() const { return dual_; }

  Mat apply(const Mat& X) const { return gen_.apply(X); }
  Mat apply_dual(const Mat& rho) const { return dual_.apply(rho); }

  Mat sigma_pow(double s) const;
  // Gamma_sigma^s X = sigma^{s/2} X sigma^{s/2}
  Mat gamma(double s, const Mat& X) const;

  // Derivations.
  Mat partial(std::size_t j, const Mat& X) const;           // [V_j, X]
  Mat partial_adj_kms(std::size_t j, const Mat& B) const;   // e^{-w/2} V* B - e^{w/2} B V*
  Mat partial_adj_hs(std::size_t j, const Mat& B) const;    // V* B - B V*
  std::vector<Mat> gradient(const Mat& X) const;
  Mat divergence(const std::vector<Mat>& B) const;  // -sum_j partial_adj_hs(j, B_j)

  Mat evolve_heisenberg(double t, const Mat& X) const;
  Mat evolve_schrodinger(double t, const Mat& rho) const;
  Superoperator propagator(double t) const;  // exp(t L)

  DbcResiduals residuals() const;
  bool symmetric_spectrum() const { return sym_ok_; }

 private:
  void prepare();

  int dim_ = 0;
  Mat sigma_;
  Eigh sig_;
  std::vector<JumpTerm> jumps_;
  Superoperator gen_, dual_;
  // exp(tL) = Sm * W exp(t lam) W^dag * Sp
  bool sym_ok_ = false;
  RVec lam_;
  Mat W_, Sp_, Sm_;
};

enum class Picture { Heisenberg, Schrodinger };
enum class DerivationMode { Forward, AdjointKms, Gradient, Divergence };

DbcLindbladian build_from_jumps(const Mat& sigma, std::vector<JumpTerm> jumps);
DbcLindbladian depolarizing(const Mat& sigma, double gamma);
DbcLindbladian random_dbc(const Mat& sigma, int num_offdiag_pairs, int num_diag,
                          std::uint64_t seed);
std::vector<JumpTerm> alicki_decompose(const Superoperator& generator, const Mat& sigma);

// Assemble the Heisenberg generator sum_j e^{-w/2} V*[X,V] + e^{w/2} [V,X] V*.
Superoperator generator_from_jumps(const Mat& sigma, const std::vector<JumpTerm>& jumps);
std::vector<JumpTerm> pairing_closure(std::vector<JumpTerm> jumps);

Mat evolve(const DbcLindbladian& L, double t, Picture picture, const Mat& X);
PrimitivityReport primitivity(const DbcLindbladian& L, double threshold = 1e-9);

std::vector<Mat> pauli_matrices();  // x, y, z
Mat matrix_unit(int d, int i, int k);

double rel_diff(const Mat& A, const Mat& B);

}  // namespace qb
