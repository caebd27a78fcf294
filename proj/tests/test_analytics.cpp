#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "npplab/analytics.hpp"
#include "npplab/enumerate.hpp"
#include "npplab/sampler.hpp"
#include "npplab/stats.hpp"

using namespace npplab;

namespace {

const boost::math::normal_distribution<double> kStd;
constexpr double kUlp = std::numeric_limits<double>::epsilon();

double quad(auto&& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 8, 1e-13);
}

// P[|Z| <= z] by integrating the density.
double box1_truth(double z) {
  return quad([](double x) { return boost::math::pdf(kStd, x); }, -z, z);
}

// P[|Z| <= z1, |Z_rho| <= z2]: outer integral over x of the conditional
// probability of Z_rho | Z = x ~ N(rho x, 1 - rho^2) landing in [-z2, z2].
double box2_truth(double z1, double z2, double rho) {
  const double s = std::sqrt(1 - rho * rho);
  return quad(
      [&](double x) {
        return boost::math::pdf(kStd, x) *
               (boost::math::cdf(kStd, (z2 - rho * x) / s) - boost::math::cdf(kStd, (-z2 - rho * x) / s));
      },
      -z1, z1);
}

std::vector<std::vector<BigInt>> pascal(int nmax) {
  std::vector<std::vector<BigInt>> t(static_cast<std::size_t>(nmax) + 1);
  for (int n = 0; n <= nmax; ++n) {
    t[n].assign(static_cast<std::size_t>(n) + 1, 1);
    for (int k = 1; k < n; ++k) t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
  }
  return t;
}

Partition random_partition(std::mt19937_64& gen, int n) {
  Partition p(n);
  for (int i = 0; i < n; ++i) {
    if (gen() & 1) p.flip(i);
  }
  return p;
}

}  // namespace

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781244591328).epsilon(1e-14));
  CHECK(binary_entropy(0.3) == doctest::Approx(binary_entropy(0.7)).epsilon(1e-15));
  CHECK_THROWS_AS(binary_entropy(-0.01), std::invalid_argument);
  for (double h : {0.0, 0.1, 0.4, 0.8112781244591328, 0.99, 1.0}) {
    const double p = binary_entropy_inverse(h);
    CHECK(p >= 0.0);
    CHECK(p <= 0.5);
    CHECK(std::fabs(binary_entropy(p) - h) <= 1e-12);
  }
  CHECK(binary_entropy_inverse(0.8112781244591328) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(binary_entropy(1.01), std::invalid_argument);
}

TEST_CASE("exact binomials agree with Pascal's triangle") {
  const auto t = pascal(200);
  for (int n = 0; n <= 200; ++n) {
    for (int k = 0; k <= n; ++k) REQUIRE(binom_exact(n, k) == t[n][k]);
  }
  CHECK(binom_exact(4, 2) == 6);
  CHECK_THROWS_AS(binom_exact(201, 3), std::invalid_argument);
  CHECK_THROWS_AS(binom_exact(5, 6), std::invalid_argument);
  CHECK(log2_binom(200, 100) == doctest::Approx(std::log2(static_cast<double>(t[200][100]))).epsilon(1e-14));
}

TEST_CASE("entropy sandwich for binomials, n <= 100") {
  int violations = 0;
  for (int n = 2; n <= 100; ++n) {
    for (int k = 1; k < n; ++k) {
      const auto s = binomial_sandwich(n, k);
      if (!s.holds) ++violations;
      CHECK(s.lower <= s.exact);
    }
  }
  CHECK(violations == 0);
  CHECK(binomial_sandwich(4, 2).exact == 6.0);
  CHECK_THROWS_AS(binomial_sandwich(4, 0), std::invalid_argument);
}

TEST_CASE("binomial tail sum bound, n <= 60") {
  int violations = 0;
  for (int n = 1; n <= 60; ++n) {
    for (int k = 0; 2 * k <= n; ++k) violations += binomial_sum_bound_holds(n, k) ? 0 : 1;
  }
  CHECK(violations == 0);
}

TEST_CASE("Vandermonde identity, n <= 60") {
  CHECK(vandermonde_identity_check(4, 2));
  CHECK(vandermonde_identity_check(7, 0));
  for (int n = 0; n <= 60; ++n) {
    for (int k = 0; 2 * k <= n; ++k) REQUIRE(vandermonde_identity_check(n, k));
  }
  CHECK_THROWS_AS(vandermonde_identity_check(4, 3), std::invalid_argument);
}

TEST_CASE("sublinear binomial ratio") {
  // Exact value: log2 C(1000, 32) from Pascal-free product.
  BigInt c = 1;
  for (int i = 0; i < 32; ++i) c = c * (1000 - i) / (i + 1);
  CHECK(log2_binom(1000, 32) == doctest::Approx(std::log2(static_cast<double>(c))).epsilon(1e-14));

  std::vector<double> ratios;
  for (std::int64_t n : {1000, 3000, 10000, 30000, 100000, 300000, 1000000}) {
    const auto d = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
    ratios.push_back(sublinear_binomial_ratio(n, d));
  }
  for (std::size_t i = 1; i < ratios.size(); ++i) CHECK(ratios[i] < ratios[i - 1]);
  for (double r : ratios) CHECK(r > 1.0);
  // The ratio is 1 + O(1 / log n): within [0.8, 1.2] from n = 3e4 on, but
  // still 1.26 at n = 1000.
  for (std::size_t i = 3; i < ratios.size(); ++i) {
    CHECK(ratios[i] >= 0.8);
    CHECK(ratios[i] <= 1.2);
  }
  CHECK(ratios[0] == doctest::Approx(1.2618765931).epsilon(1e-8));
}

TEST_CASE("one-dimensional Gaussian box") {
  const auto g = gauss_box_1(1e-3);
  CHECK(g.approx == doctest::Approx(7.978845608e-4).epsilon(1e-9));
  CHECK(gauss_box_cubic_constant() == doctest::Approx(0.1329807601338109).epsilon(1e-14));
  double prev = 0.0;
  for (int i = 0; i <= 60; ++i) {
    const double z = 1e-4 * std::pow(0.99 / 1e-4, i / 60.0);
    const auto b = gauss_box_1(z);
    const double truth = box1_truth(z);
    // With c the exact cubic Taylor coefficient, lower and truth differ by
    // O(z^5), below double resolution at small z: allow 4 ulps.
    CHECK(b.lower <= truth * (1 + 4 * kUlp));
    CHECK(truth <= b.upper);
    CHECK(b.upper > prev);
    prev = b.upper;
  }
  CHECK_THROWS_AS(gauss_box_1(0.0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_box_1(1.0), std::invalid_argument);
}

TEST_CASE("two-dimensional Gaussian box") {
  CHECK(gauss_box_2(1e-3, 1e-3, 0.0).upper == doctest::Approx(6.366197723675814e-7).epsilon(1e-12));
  CHECK(gauss_box_2(0.01, 0.2, 0.3).upper == gauss_box_2(0.2, 0.01, 0.3).upper);
  CHECK(gauss_box_2(0.01, 0.2, 0.3).lower == gauss_box_2(0.2, 0.01, 0.3).lower);

  int checked = 0;
  for (double rho : {0.0, 0.25, 0.5, 0.75, 0.9}) {
    for (double z1 : {1e-4, 1e-3, 1e-2, 0.1, 0.3}) {
      for (double z2 : {1e-4, 1e-2, 0.2}) {
        const auto b = gauss_box_2(z1, z2, rho);
        const double truth = box2_truth(z1, z2, rho);
        CHECK(b.lower <= truth);
        CHECK(truth <= b.upper);
        CHECK(b.lower_from_proof <= truth);
        ++checked;
      }
    }
  }
  CHECK(checked == 75);

  // Close to rho = 1 the printed lower bound exceeds the probability; the
  // bound derived from exp(-x) >= 1 - x does not.
  const double truth = box2_truth(0.05, 0.05, 0.999);
  const auto b = gauss_box_2(0.05, 0.05, 0.999);
  CHECK(b.lower > truth);
  CHECK(b.lower_from_proof <= truth);
  CHECK(truth <= b.upper);

  CHECK_THROWS_AS(gauss_box_2(0.7, 0.7, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(gauss_box_2(0.0, 0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(gauss_box_2(0.1, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("lambda(rho) against a numeric eigensolve") {
  CHECK(lambda_rho(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambda_rho(0.25) == doctest::Approx(0.4069296691827464).epsilon(1e-14));
  CHECK(lambda_rho(1e-12) == doctest::Approx(0.0).epsilon(1e-9));
  double worst = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double rho = i / 1001.0;  // both sides of 1/2
    const double rb = 1 - 2 * rho;
    Eigen::Matrix3d m;
    m << 1, rb * rb, rb, rb * rb, 1, rb, rb, rb, 1;
    const double numeric = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m).eigenvalues()(0);
    worst = std::max(worst, std::fabs(lambda_rho(rho) - numeric));
    CHECK(std::fabs(lambda_rho_numeric(rho) - numeric) <= 1e-12);
  }
  CHECK(worst <= 1e-10);
  CHECK_THROWS_AS(lambda_rho(0.0), std::invalid_argument);
}

TEST_CASE("Hoffman-Wielandt for the eigensolver") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    Matrix3 a{}, b{};
    double frob = 0.0;
    const double scale = std::pow(10.0, -static_cast<double>(t % 6));
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        const double v = nd(gen);
        const double e = scale * nd(gen);
        a[i][j] = a[j][i] = v;
        b[i][j] = b[j][i] = v + e;
        frob += (i == j ? 1.0 : 2.0) * e * e;
      }
    }
    const auto la = symmetric_eigenvalues(a);
    const auto lb = symmetric_eigenvalues(b);
    CHECK(la[0] >= la[1]);
    CHECK(la[1] >= la[2]);
    double dist = 0.0;
    for (int i = 0; i < 3; ++i) dist += (la[i] - lb[i]) * (la[i] - lb[i]);
    if (std::sqrt(dist) > std::sqrt(frob) + 1e-9) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("Gram determinant of three partitions") {
  const auto d = gram_det3(Partition::parse("++++"), Partition::parse("++--"), Partition::parse("+-+-"));
  CHECK(d.numerator == 64);
  CHECK(d.value() == 1.0);
  CHECK_THROWS_AS(gram_det3(Partition::parse("++++"), Partition::parse("----"), Partition::parse("+-+-")),
                  std::invalid_argument);
  CHECK_THROWS_AS(gram_det3(Partition::parse("++-+"), Partition::parse("++-+"), Partition::parse("+-+-")),
                  std::invalid_argument);

  std::mt19937_64 gen(6);
  int violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const int n = 8 + static_cast<int>(gen() % 23);
    Partition s[3];
    for (;;) {
      for (auto& p : s) p = random_partition(gen, n);
      bool ok = true;
      for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) ok = ok && s[i] != s[j] && s[i] != s[j].negated();
      }
      if (ok) break;
    }
    const auto g = gram_det3(s[0], s[1], s[2]);
    if (g.numerator < 1) ++violations;
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double dot = 0;
        for (int k = 0; k < n; ++k) dot += s[i].sign(k) * s[j].sign(k);
        m(i, j) = dot / n;
      }
    }
    CHECK(std::fabs(m.determinant() - g.value()) <= 1e-12);
  }
  CHECK(violations == 0);
}

TEST_CASE("first moment of the distance-restricted level set") {
  const auto a = first_moment_zeta(20, 0.25, 1.0);
  const auto b = first_moment_zeta(20, 0.25, 8.0);
  CHECK(b.expected_count / 8.0 == doctest::Approx(a.expected_count).epsilon(1e-12));
  CHECK(a.regime == MomentRegime::diverging);
  CHECK(first_moment_zeta(20, 0.25, 0.5).regime == MomentRegime::vanishing);
  double prev = 0;
  for (double s : {0.1, 1.0, 10.0, 100.0}) {
    const double v = first_moment_zeta(24, 0.5, s).expected_count;
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(first_moment_zeta(10, 0.25, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(first_moment_zeta(10, 0.6, 1.0), std::invalid_argument);

  // Monte Carlo: at n = 14, rho = 1/2 count sigma in the whole cube with
  // d_H(sigma, sigma*) = 7 and H <= sqrt(n) 2^-n over 500 planted instances.
  const int n = 14;
  const int k = 7;
  const double h = std::sqrt(static_cast<double>(n)) * std::exp2(-n * binary_entropy(0.5));
  double total = 0.0;
  for (int t = 0; t < 500; ++t) {
    PlantedSpec spec;
    spec.n = n;
    spec.seed = substream_seed(2024, static_cast<std::uint64_t>(t));
    const Instance inst = sample_planted(spec);
    const auto r = full_scan(inst, inst.planted()->sigma_star, {Energy::at_most(h, n, inst.frac_bits())});
    total += static_cast<double>(r.distance_counts[0][k] + r.distance_counts[0][n - k]);
  }
  const double mc = total / 500.0;
  const double pred = first_moment_zeta(n, 0.5, 1.0).expected_count;
  MESSAGE("Monte Carlo " << mc << " vs leading order " << pred);
  CHECK(mc >= pred / 3.0);
  CHECK(mc <= pred * 3.0);
}

TEST_CASE("OGP parameter prescription") {
  const auto p = ogp_parameters(1.0, 0.5);
  CHECK(p.m == 42);
  CHECK(p.c == 0.25);
  for (double eps : {0.2, 0.5, 0.8, 1.0}) {
    for (double frac : {0.0, 0.3, 0.9}) {
      const auto q = ogp_parameters(eps, frac * eps);
      const double gap = eps - q.delta;
      CHECK(q.m == static_cast<int>(std::ceil(8 * (1 + std::log2(3.0)) / gap)));
      CHECK(q.beta > 0.0);
      CHECK(q.beta < 1.0);
      CHECK(std::fabs(binary_entropy((1 - q.beta) / 2 + (1 - q.beta) / (4.0 * q.m)) - gap / 4) <= 1e-10);
      CHECK(std::fabs(binary_entropy((1 - q.beta + q.eta) / 2) - gap / 4) <= 1e-10);
      CHECK(q.eta / ((1 - q.beta) / q.m) == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(q.eta < (1 - q.beta) / q.m);
      CHECK(q.eta < q.beta);
    }
  }
  CHECK_THROWS_AS(ogp_parameters(0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ogp_parameters(1.2, 0.0), std::invalid_argument);
}

TEST_CASE("hardness parameters") {
  const auto h = theorem42_parameters(0.5, 1.0, 0.1, 42);
  CHECK(h.Q == doctest::Approx(800 * std::numbers::pi).epsilon(1e-14));
  CHECK(h.Q == doctest::Approx(2513.2741228718).epsilon(1e-12));
  CHECK(h.log2_log2_T == doctest::Approx(4.0 * 42 * h.Q * std::log2(h.Q)).epsilon(1e-14));
  CHECK(theorem42_parameters(0.5, 1.0, 0.4, 3).C1 == doctest::Approx(1e-4).epsilon(1e-14));
  // T overflows; every probability is then 2^-T to leading order.
  CHECK(h.loglog_pl == h.log2_log2_T);

  // Small Q, where the iterated logs are computable directly.
  const auto s = theorem42_parameters(0.5, 1.0, 1.0, 1, 0.01);
  const double log2_T = std::exp2(4.0 * s.Q * std::log2(s.Q));
  CHECK(s.loglog_pl == doctest::Approx(std::log2(log2_T + std::log2(54.0))).epsilon(1e-12));
  CHECK(s.loglog_pst == doctest::Approx(std::log2(log2_T + std::log2(648 * s.Q * s.Q / std::numbers::pi))).epsilon(1e-12));
  CHECK(s.loglog_pf_times_3n ==
        doctest::Approx(std::log2(log2_T + std::log2(108 * s.Q * std::sqrt(std::numbers::pi)))).epsilon(1e-12));

  double prev = 0.0;
  for (double eta : {0.9, 0.5, 0.1, 0.01}) {
    const double rho = theorem42_parameters(0.5, 1.0, eta, 2).rho;
    CHECK(rho > prev);
    CHECK(rho < 1.0);
    prev = rho;
  }
  CHECK(theorem42_parameters(0.5, 1.0, 1e-9, 2).rho == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chaos overlap threshold") {
  const double e = chaos_eta_star(1.0);
  CHECK(e == doctest::Approx(0.220).epsilon(0.005));
  for (double eps : {0.1, 0.5, 1.0, 1.5}) {
    CHECK(std::fabs(binary_entropy(chaos_eta_star(eps) / 2) - eps / 2) <= 1e-10);
  }
  CHECK_THROWS_AS(chaos_eta_star(0.0), std::invalid_argument);
}

TEST_CASE("statistics helpers") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);

  const auto f = ols({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
  // sxy = 9.9, sxx = 5 around the means (2.5, 6).
  const auto g = ols({1, 2, 3, 4}, {3.1, 4.8, 7.2, 8.9});
  CHECK(g.slope == doctest::Approx(1.98).epsilon(1e-12));
  CHECK(g.intercept == doctest::Approx(1.05).epsilon(1e-12));
  CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));

  CHECK(auc({2, 3}, {0, 1}) == 1.0);
  CHECK(auc({0, 1}, {2, 3}) == 0.0);
  CHECK(auc({1}, {1}) == 0.5);
  CHECK(best_threshold_accuracy({2, 3}, {0, 1}) == 1.0);
  CHECK(best_threshold_accuracy({0, 1}, {2, 3}) == 1.0);
  CHECK(best_threshold_accuracy({1, 1}, {1, 1}) == 0.5);

  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> p, q;
    for (int i = 0; i < 30; ++i) p.push_back(std::round(nd(gen) * 3) + 1);
    for (int i = 0; i < 25; ++i) q.push_back(std::round(nd(gen) * 3));
    double wins = 0;
    for (double a : p) {
      for (double b : q) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
    }
    CHECK(auc(p, q) == doctest::Approx(wins / (30.0 * 25.0)).epsilon(1e-14));
    double best = 0;
    std::vector<double> cuts(p);
    cuts.insert(cuts.end(), q.begin(), q.end());
    cuts.push_back(1e9);
    for (double c : cuts) {
      double ok = 0;
      for (double a : p) ok += a >= c;
      for (double b : q) ok += b < c;
      best = std::max({best, ok / 55.0, 1.0 - ok / 55.0});
    }
    CHECK(best_threshold_accuracy(p, q) == doctest::Approx(best).epsilon(1e-14));
  }
}
