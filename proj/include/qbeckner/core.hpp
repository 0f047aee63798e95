#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qb {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

enum class Errc {
  NonHermitian,
  DomainViolation,
  SingularState,
  NotModularEigenvector,
  NotDbc,
  ResidualTooLarge,
  IndexOutOfRange,
  ZeroExponent,
  NotPsd,
  NoJumps,
  NotPrimitive,
  OptimizerDiverged,
  MissingEstimate,
  IncompatibleJumps,
  KernelComponent,
  NotConverged,
  LeftPositiveCone,
  NotSymmetric,
  NonPositiveCurvature,
  ConfigError,
  UnknownFixture,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc c, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc c, const std::string& what);

// Tolerances shared across modules.
inline constexpr double kDegenerateRel = 1e-9;
inline constexpr double kPsdFloor = 1e-10;
inline constexpr double kStrictFloor = 1e-12;
inline constexpr double kNearOne = 1e-4;

struct Eigh {
  RVec values;  // ascending
  Mat vectors;  // columns are eigenvectors
  Mat compose(const RVec& f) const;
};

double herm_residual(const Mat& A);
Mat herm(const Mat& A);
Eigh eigh(const Mat& A);

// Clamp eigenvalues in (-kPsdFloor, 0) to zero; anything more negative is NotPsd.
Mat psd_clamp(const Mat& A);
Eigh psd_eigh(const Mat& A);

struct Fn1 {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  double lo = -std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool in_domain(double x) const { return lo_open ? x > lo : x >= lo; }
};

Fn1 fn_identity();
Fn1 fn_power(double r);  // x^r on x >= 0 (x > 0 if r <= 0)
Fn1 fn_log();
Fn1 fn_exp();
Fn1 fn_fp(double p);        // x^{p-1}/(p-1)
Fn1 fn_phi(double p);       // (x - x^{1/p}) / ((p-1)(x^{1/p} - 1))
Fn1 fn_kappa(double alpha);  // power difference mean kernel

struct Fn2 {
  std::string name;
  std::function<double(double, double)> f;
  std::function<double(double, double)> dx;
  std::function<double(double, double)> dy;
  double lo = -std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool in_domain(double x) const { return lo_open ? x > lo : x >= lo; }
};

Fn2 fn2_const(double c);
Fn2 fn2_left(const Fn1& g);  // (x, y) -> g(x)
Fn2 divdiff(const Fn1& g);   // g^{[1]}
Fn2 fn2_theta(double p);     // (p-1)(x-y)/(x^{p-1}-y^{p-1})
Fn2 fn2_fp_divdiff(double p);  // 1/theta_p, the divided difference of f_p
Fn2 fn2_theta_log();         // logarithmic mean

bool near_equal(double a, double b);

// Scalar forms used in several places.
double theta_p(double p, double x, double y);
double theta_p_dx(double p, double x, double y);
double theta_log(double x, double y);

Mat matrix_function(const Mat& A, const Fn1& f);
Mat matrix_function(const Eigh& e, const Fn1& f);
Mat mpow(const Mat& A, double r);  // A PSD
Mat mlog(const Mat& A);            // A PD

// Column-stacking vectorization: vec(AXB) = (B^T kron A) vec(X).
Vec vec(const Mat& X);
Mat unvec(const Vec& v, int d);

struct Superoperator {
  int dim = 0;
  Mat matrix;
  Mat apply(const Mat& X) const;
  Superoperator compose(const Superoperator& other) const;  // this * other
  Superoperator adjoint() const;                           // Hilbert-Schmidt adjoint
};

Superoperator super_identity(int d);
Superoperator super_from_map(int d, const std::function<Mat(const Mat&)>& map);
Superoperator super_left(const Mat& A);
Superoperator super_right(const Mat& B);
Superoperator super_modular(const Mat& sigma);
Superoperator super_gamma_power(const Mat& sigma, double s);
Superoperator super_j_kernel(const Mat& sigma, const Fn1& f);

// Sum_{i,k} f(lambda_i, mu_k) A_i X B_k over eigenprojections.
Mat double_sum_apply(const Fn2& f, const Eigh& A, const Eigh& B, const Mat& X);
Mat double_sum_apply(const Fn2& f, const Mat& A, const Mat& B, const Mat& X);

// which = 1: (delta_1 f)((A,A),B)[X, Y] = sum f1(l_k, l_l, m_i) A_k X A_l Y B_i
// which = 2: (delta_2 f)(A,(B,B))[X, Y] = sum f2(l_k, m_i, m_m) A_k X B_i Y B_m
Mat partial_divdiff_apply(const Fn2& f, int which, const Eigh& A, const Eigh& B,
                          const Mat& X, const Mat& Y);
Mat partial_divdiff_apply(const Fn2& f, int which, const Mat& A, const Mat& B,
                          const Mat& X, const Mat& Y);

enum class InnerKind { HilbertSchmidt, SWeighted, Kms, Gns, FWeighted };

cplx inner_hs(const Mat& X, const Mat& Y);
cplx inner_product(InnerKind kind, const Mat& X, const Mat& Y, const Mat& sigma = Mat(),
                   double s = 0.5, const Fn1* f = nullptr);

// sigma^{s/2} X sigma^{s/2}; sigma given by its eigendecomposition (full rank when s < 0).
Mat gamma_apply(const Eigh& sigma, double s, const Mat& X);
Eigh full_rank_eigh(const Mat& sigma);

// Apply R_sigma f(Delta_sigma) with sigma given by its eigendecomposition.
Mat j_kernel_apply(const Eigh& sigma, const Fn1& f, const Mat& X);

Mat identity(int d);
double trace_re(const Mat& X);
double fro(const Mat& X);
double trace_norm(const Mat& X);  // Hermitian X

}  // namespace qb
