#pragma once

#include "qbeckner/core.hpp"

#include <cstdint>
#include <random>

namespace qb {

// Portable draws on top of mt19937_64 (std distributions are not bit-stable
// across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal();
  int index(int n);  // uniform in [0, n)
  cplx cnormal();

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Mat random_ginibre(int d, Rng& rng);
Mat random_hermitian(int d, Rng& rng);
Mat random_unitary(int d, Rng& rng);
Mat random_density(int d, Rng& rng);  // Hilbert-Schmidt measure
Mat random_psd(int d, Rng& rng);      // unnormalized, full rank almost surely
Mat random_pure(int d, Rng& rng);
Mat diag_state(const std::vector<double>& eigenvalues);

}  // namespace qb
