#include "npplab/analytics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace npplab {

namespace {

using BigFloat = boost::multiprecision::cpp_bin_float_100;

BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt c = 1;
  for (std::int64_t i = 0; i < k; ++i) {
    c *= n - i;
    c /= i + 1;
  }
  return c;
}

double log2_big(const BigInt& v) {
  if (v <= 0) throw std::invalid_argument("log2_big: nonpositive argument");
  const unsigned top = boost::multiprecision::msb(v);
  if (top < 53) return std::log2(static_cast<double>(v));
  const BigInt head = v >> (top - 52);
  return static_cast<double>(top - 52) + std::log2(static_cast<double>(head));
}

BigFloat entropy_big(const BigFloat& p) {
  using boost::multiprecision::log;
  if (p == 0 || p == 1) return 0;
  const BigFloat ln2 = log(BigFloat(2));
  return -(p * log(p) + (1 - p) * log(1 - p)) / ln2;
}

double bisect(auto&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// log2(2^a + b) for b > 0, stable when 2^a overflows.
double log2_pow2_plus(double a, double b) {
  if (a > 1000) return a;
  const double t = b * std::exp2(-a);
  return a + std::log1p(t) / std::numbers::ln2;
}

}  // namespace

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binary_entropy: p must lie in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

double binary_entropy_inverse(double h) {
  if (!(h >= 0.0 && h <= 1.0)) throw std::invalid_argument("binary_entropy_inverse: h must lie in [0, 1]");
  if (h == 0.0) return 0.0;
  if (h == 1.0) return 0.5;
  return bisect([&](double p) { return binary_entropy(p) - h; }, 0.0, 0.5);
}

BigInt binom_exact(int n, int k) {
  if (n < 0 || n > 200 || k < 0 || k > n) throw std::invalid_argument("binom_exact: need 0 <= k <= n <= 200");
  return binomial(n, k);
}

double log2_binom(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) throw std::invalid_argument("log2_binom: need 0 <= k <= n");
  return log2_big(binomial(n, k));
}

bool vandermonde_identity_check(int n, int k_plus) {
  if (n < 0 || k_plus < 0 || 2 * k_plus > n) throw std::invalid_argument("vandermonde_identity_check: need 0 <= 2 pn <= n");
  BigInt lhs = 0;
  for (int k = 0; k <= k_plus; ++k) lhs += binomial(k_plus, k) * binomial(n - k_plus, k);
  return lhs == binomial(n, k_plus);
}

BinomialSandwich binomial_sandwich(int n, int k) {
  if (k < 1 || k > n - 1) throw std::invalid_argument("binomial_sandwich: need 1 <= k <= n - 1");
  using boost::multiprecision::pow;
  using boost::multiprecision::sqrt;
  const BigFloat nn = n;
  const BigFloat prod = BigFloat(k) * (n - k);
  const BigFloat core = pow(BigFloat(2), nn * entropy_big(BigFloat(k) / nn));
  const BigFloat lo = sqrt(nn / (8 * prod)) * core;
  const BigFloat hi = sqrt(nn / (boost::math::constants::pi<BigFloat>() * prod)) * core;
  const BigFloat exact = BigFloat(binomial(n, k));
  return {static_cast<double>(lo), static_cast<double>(exact), static_cast<double>(hi), lo <= exact && exact <= hi};
}

bool binomial_sum_bound_holds(int n, int k) {
  if (n < 1 || k < 0 || 2 * k > n) throw std::invalid_argument("binomial_sum_bound_holds: need 0 <= 2k <= n");
  BigInt sum = 0;
  for (int i = 0; i <= k; ++i) sum += binomial(n, i);
  const BigFloat bound = boost::multiprecision::pow(BigFloat(2), BigFloat(n) * entropy_big(BigFloat(k) / n));
  return BigFloat(sum) <= bound;
}

double sublinear_binomial_ratio(std::int64_t n, std::int64_t d) {
  if (d < 1 || d >= n) throw std::invalid_argument("sublinear_binomial_ratio: need 1 <= d < n");
  return log2_binom(n, d) / (static_cast<double>(d) * std::log2(static_cast<double>(n) / static_cast<double>(d)));
}

double gauss_box_cubic_constant() { return 1.0 / (3.0 * std::sqrt(2.0 * std::numbers::pi)); }

GaussBox1 gauss_box_1(double z) {
  if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("gauss_box_1: z must lie in (0, 1)");
  const double lin = std::sqrt(2.0 / std::numbers::pi) * z;
  return {lin - gauss_box_cubic_constant() * z * z * z, lin, lin};
}

GaussBox2 gauss_box_2(double z1, double z2, double rho) {
  if (!(z1 > 0.0 && z2 > 0.0)) throw std::invalid_argument("gauss_box_2: z1, z2 must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("gauss_box_2: rho must lie in [0, 1)");
  const double s = std::sqrt(1.0 - rho * rho);
  const double q = z1 * z1 + z2 * z2;
  if (!(q / s < 1.0)) throw std::invalid_argument("gauss_box_2: need (z1^2 + z2^2) / sqrt(1 - rho^2) < 1");
  const double upper = 2.0 * z1 * z2 / (std::numbers::pi * s);
  return {upper * (1.0 - q / s), upper, upper * (1.0 - q / (s * s))};
}

double lambda_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("lambda_rho: rho must lie in (0, 1)");
  const double rb = std::fabs(1.0 - 2.0 * rho);
  return (rb * rb + 2.0 - rb * std::sqrt(rb * rb + 8.0)) / 2.0;
}

std::array<double, 3> symmetric_eigenvalues(const Matrix3& a) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("symmetric_eigenvalues: solver failed");
  const auto& ev = es.eigenvalues();
  return {ev(2), ev(1), ev(0)};
}

double lambda_rho_numeric(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("lambda_rho_numeric: rho must lie in (0, 1)");
  const double rb = 1.0 - 2.0 * rho;
  const Matrix3 m{{{1.0, rb * rb, rb}, {rb * rb, 1.0, rb}, {rb, rb, 1.0}}};
  return symmetric_eigenvalues(m)[2];
}

double GramDet::value() const {
  const double nn = n;
  return static_cast<double>(numerator) / (nn * nn * nn);
}

GramDet gram_det3(const Partition& s1, const Partition& s2, const Partition& s3) {
  const int n = s1.size();
  if (s2.size() != n || s3.size() != n || n < 1) throw std::invalid_argument("gram_det3: dimension mismatch");
  if (n > (1 << 20)) throw std::invalid_argument("gram_det3: dimension too large");
  const Partition* s[3] = {&s1, &s2, &s3};
  std::int64_t g[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      g[i][j] = overlap(*s[i], *s[j]).numerator;
      if (i != j && (g[i][j] == n || g[i][j] == -n)) {
        throw std::invalid_argument("gram_det3: inputs must be pairwise distinct and non-antipodal");
      }
    }
  }
  using i128 = __int128;
  const i128 det = static_cast<i128>(g[0][0]) * (static_cast<i128>(g[1][1]) * g[2][2] - static_cast<i128>(g[1][2]) * g[2][1]) -
                   static_cast<i128>(g[0][1]) * (static_cast<i128>(g[1][0]) * g[2][2] - static_cast<i128>(g[1][2]) * g[2][0]) +
                   static_cast<i128>(g[0][2]) * (static_cast<i128>(g[1][0]) * g[2][1] - static_cast<i128>(g[1][1]) * g[2][0]);
  return {static_cast<std::int64_t>(det), n};
}

std::string to_string(MomentRegime r) { return r == MomentRegime::vanishing ? "vanishing" : "diverging"; }

MomentPrediction first_moment_zeta(int n, double rho, double scale) {
  if (n < 1) throw std::invalid_argument("first_moment_zeta: n must be positive");
  if (!(rho > 0.0 && rho <= 0.5)) throw std::invalid_argument("first_moment_zeta: rho must lie in (0, 1/2]");
  if (!(scale >= 0.0)) throw std::invalid_argument("first_moment_zeta: scale must be nonnegative");
  const double kr = rho * n;
  const auto k = static_cast<std::int64_t>(std::llround(kr));
  if (std::fabs(kr - static_cast<double>(k)) > 1e-9) throw std::invalid_argument("first_moment_zeta: rho n must be an integer");
  const double rb = 1.0 - 2.0 * rho;
  MomentPrediction p;
  p.n = n;
  p.rho = rho;
  p.scale = scale;
  p.log2_expected_count = log2_binom(n, k) + 1.0 + std::log2(scale) + 0.5 * std::log2(static_cast<double>(n)) -
                          n * binary_entropy(rho) - 0.5 * std::log2(2.0 * std::numbers::pi * (1.0 - rb * rb));
  p.expected_count = std::exp2(p.log2_expected_count);
  p.regime = scale < 1.0 ? MomentRegime::vanishing : MomentRegime::diverging;
  return p;
}

OgpParams ogp_parameters(double eps, double delta) {
  if (!(delta >= 0.0 && delta < eps && eps <= 1.0)) throw std::invalid_argument("ogp_parameters: need 0 <= delta < eps <= 1");
  OgpParams p;
  p.eps = eps;
  p.delta = delta;
  const double gap = eps - delta;
  p.m = static_cast<int>(std::ceil(8.0 * (1.0 + std::log2(3.0)) / gap));
  p.c = gap / 2.0;
  const double m = p.m;
  auto phi = [&](double beta) {
    return binary_entropy((1.0 - beta) / 2.0 + (1.0 - beta) / (4.0 * m)) - gap / 4.0;
  };
  if (!(phi(0.0) > 0.0 && phi(1.0) < 0.0)) throw std::logic_error("ogp_parameters: root not bracketed");
  p.beta = bisect(phi, 0.0, 1.0);
  p.eta = (1.0 - p.beta) / (2.0 * m);
  if (!(p.eta < (1.0 - p.beta) / m)) throw std::logic_error("ogp_parameters: eta condition violated");
  return p;
}

HardnessParams theorem42_parameters(double eps, double L, double eta, int m, double c2) {
  if (!(eps > 0.0 && L > 0.0 && eta > 0.0 && m > 0 && c2 > 0.0)) {
    throw std::invalid_argument("theorem42_parameters: inputs must be positive");
  }
  HardnessParams h;
  h.eps = eps;
  h.L = L;
  h.eta = eta;
  h.m = m;
  h.c2 = c2;
  h.C1 = eta * eta / 1600.0;
  h.Q = 40.0 * c2 * std::numbers::pi * std::sqrt(L) / eta;
  h.log2_log2_T = 4.0 * m * h.Q * std::log2(h.Q);
  h.loglog_pf_times_3n = log2_pow2_plus(h.log2_log2_T, std::log2(108.0 * h.Q * std::sqrt(std::numbers::pi)));
  h.loglog_pst = log2_pow2_plus(h.log2_log2_T, std::log2(648.0 * h.Q * h.Q / std::numbers::pi));
  h.loglog_pl = log2_pow2_plus(h.log2_log2_T, std::log2(54.0));
  h.rho = std::cos(std::numbers::pi / (2.0 * h.Q));
  return h;
}

double chaos_eta_star(double eps) {
  if (!(eps > 0.0 && eps <= 2.0)) throw std::invalid_argument("chaos_eta_star: eps must lie in (0, 2]");
  if (eps == 2.0) return 1.0;
  return bisect([&](double eta) { return binary_entropy(eta / 2.0) - eps / 2.0; }, 0.0, 1.0);
}

}  // namespace npplab
