#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "npplab/partition.hpp"
#include "npplab/wide_int.hpp"

namespace npplab {

// h_b(p) = -p log2 p - (1-p) log2 (1-p), with h_b(0) = h_b(1) = 0. Throws
// std::invalid_argument outside [0, 1].
double binary_entropy(double p);

// The p in [0, 1/2] with h_b(p) = h, for h in [0, 1].
double binary_entropy_inverse(double h);

// Exact binomial coefficient for 0 <= k <= n <= 200; std::invalid_argument
// otherwise.
BigInt binom_exact(int n, int k);

// log2 C(n, k) computed from the exact integer, any n.
double log2_binom(std::int64_t n, std::int64_t k);

// sum_k C(k_plus, k) C(n - k_plus, k) == C(n, k_plus) in exact arithmetic,
// for 0 <= 2 k_plus <= n (k_plus is pn).
bool vandermonde_identity_check(int n, int k_plus);

// Both sides of the entropy sandwich for C(n, k), 1 <= k <= n - 1:
// sqrt(n / (8k(n-k))) 2^(n h_b(k/n)) <= C(n,k) <= sqrt(n / (pi k(n-k))) 2^(n h_b(k/n)).
// Evaluated in 100-digit arithmetic against the exact coefficient.
struct BinomialSandwich {
  double lower = 0.0;
  double exact = 0.0;
  double upper = 0.0;
  bool holds = false;
};
BinomialSandwich binomial_sandwich(int n, int k);

// sum_{i <= k} C(n, i) <= 2^(n h_b(k/n)) for 2k <= n, in 100-digit arithmetic.
bool binomial_sum_bound_holds(int n, int k);

// log2 C(n, d) / (d log2(n/d)) from the exact coefficient.
double sublinear_binomial_ratio(std::int64_t n, std::int64_t d);

// Constant of the cubic correction in the one-dimensional box bound:
// 1 / (3 sqrt(2 pi)), the Taylor coefficient of the error function.
double gauss_box_cubic_constant();

struct GaussBox1 {
  double lower = 0.0;   // sqrt(2/pi) z - c z^3
  double upper = 0.0;   // sqrt(2/pi) z
  double approx = 0.0;  // sqrt(2/pi) z
};
// Bracket of P[|Z| <= z], 0 < z < 1.
GaussBox1 gauss_box_1(double z);

struct GaussBox2 {
  // 2 z1 z2 / (pi sqrt(1-rho^2)) * (1 - (z1^2+z2^2)/sqrt(1-rho^2))
  double lower = 0.0;
  // 2 z1 z2 / (pi sqrt(1-rho^2))
  double upper = 0.0;
  // The same with (z1^2+z2^2)/(1-rho^2) in the correction, which is what
  // the bound exp(-x) >= 1 - x on the density actually gives.
  double lower_from_proof = 0.0;
};
// Bracket of P[|Z| <= z1, |Z_rho| <= z2] for standard normals with
// correlation rho in [0, 1). Throws std::invalid_argument when z1, z2 <= 0 or
// (z1^2 + z2^2) / sqrt(1 - rho^2) >= 1.
GaussBox2 gauss_box_2(double z1, double z2, double rho);

// Smallest eigenvalue of the 3x3 matrix with unit diagonal and off-diagonal
// entries (rb^2, rb, rb), rb = 1 - 2 rho, in closed form:
// (rb^2 + 2 - |rb| sqrt(rb^2 + 8)) / 2. Requires 0 < rho < 1; for
// rho <= 1/2 the absolute value is vacuous.
double lambda_rho(double rho);
// The same eigenvalue from a numerical symmetric eigensolve.
double lambda_rho_numeric(double rho);

using Matrix3 = std::array<std::array<double, 3>, 3>;
// Eigenvalues of a symmetric 3x3 matrix, descending.
std::array<double, 3> symmetric_eigenvalues(const Matrix3& a);

// Determinant of the 3x3 overlap Gram matrix n^-1 <s_i, s_j> as the exact
// rational numerator / n^3. Throws std::invalid_argument when two inputs are
// equal or antipodal or dimensions differ.
struct GramDet {
  std::int64_t numerator = 0;  // det of the integer matrix <s_i, s_j>
  int n = 0;
  double value() const;
};
GramDet gram_det3(const Partition& s1, const Partition& s2, const Partition& s3);

enum class MomentRegime { vanishing, diverging };
std::string to_string(MomentRegime r);

struct MomentPrediction {
  int n = 0;
  double rho = 0.0;
  double scale = 0.0;
  double expected_count = 0.0;
  double log2_expected_count = 0.0;
  MomentRegime regime = MomentRegime::vanishing;
};
// Leading-order expected number of partitions at distance rho n from sigma*
// with H <= scale sqrt(n) 2^(-n h_b(rho)) under the planted measure:
// C(n, rho n) 2 scale sqrt(n) 2^(-n h_b(rho)) / sqrt(2 pi (1 - rb^2)),
// rb = 1 - 2 rho. Requires rho n integer and 0 < rho <= 1/2. The regime is
// vanishing for scale < 1 and diverging otherwise.
MomentPrediction first_moment_zeta(int n, double rho, double scale);

struct OgpParams {
  double eps = 0.0;
  double delta = 0.0;
  int m = 0;
  double c = 0.0;
  double beta = 0.0;
  double eta = 0.0;
};
// m = ceil(8 (1 + log2 3) / (eps - delta)), c = (eps - delta) / 2, beta the
// root of h_b((1-beta)/2 + (1-beta)/(4m)) = (eps - delta)/4 on (0, 1), and
// eta = (1 - beta) / (2m). Requires 0 <= delta < eps <= 1.
OgpParams ogp_parameters(double eps, double delta);

inline constexpr double kDefaultConcentrationConstant = 2.0;

// Parameters of the stable-algorithm hardness statement. T and the three
// probabilities underflow any floating type, so they are reported through
// iterated logarithms: log2_log2_T = 4 m Q log2 Q, and for p in {p_f 3^n,
// p_st, p_l}, log2(-log2 p).
struct HardnessParams {
  double eps = 0.0;
  double L = 0.0;
  double eta = 0.0;
  int m = 0;
  double c2 = kDefaultConcentrationConstant;
  double C1 = 0.0;  // eta^2 / 1600
  double Q = 0.0;   // 40 C2 pi sqrt(L) / eta
  double log2_log2_T = 0.0;
  double loglog_pf_times_3n = 0.0;  // p_f = 3^-n / (108 Q T sqrt(pi))
  double loglog_pst = 0.0;          // p_st = pi / (648 Q^2 T)
  double loglog_pl = 0.0;           // p_l = 1 / (54 T)
  double rho = 0.0;                 // cos(pi / (2Q))
};
HardnessParams theorem42_parameters(double eps, double L, double eta, int m,
                                    double c2 = kDefaultConcentrationConstant);

// eta* in (0, 1] with h_b(eta* / 2) = eps / 2, for 0 < eps <= 2.
double chaos_eta_star(double eps);

}  // namespace npplab
