#include "qbeckner/random.hpp"

#include <cmath>
#include <numbers>

namespace qb {

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

int Rng::index(int n) { return static_cast<int>(uniform() * n) % n; }

cplx Rng::cnormal() {
  double a = normal();
  double b = normal();
  return {a / std::sqrt(2.0), b / std::sqrt(2.0)};
}

Mat random_ginibre(int d, Rng& rng) {
  Mat G(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) G(i, j) = rng.cnormal();
  return G;
}

Mat random_hermitian(int d, Rng& rng) { return herm(random_ginibre(d, rng)); }

Mat random_unitary(int d, Rng& rng) {
  Mat G = random_ginibre(d, rng);
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ();
  Mat R = qr.matrixQR();
  for (int i = 0; i < d; ++i) {
    cplx r = R(i, i);
    double a = std::abs(r);
    if (a > 0) Q.col(i) *= r / a;
  }
  return Q;
}

Mat random_density(int d, Rng& rng) {
  Mat G = random_ginibre(d, rng);
  Mat rho = G * G.adjoint();
  return herm(rho / rho.trace().real());
}

Mat random_psd(int d, Rng& rng) {
  Mat G = random_ginibre(d, rng);
  return herm(G * G.adjoint());
}

Mat random_pure(int d, Rng& rng) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.cnormal();
  v.normalize();
  return v * v.adjoint();
}

Mat diag_state(const std::vector<double>& eigenvalues) {
  int d = static_cast<int>(eigenvalues.size());
  Mat s = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) s(i, i) = eigenvalues[i];
  return s;
}

}  // namespace qb
