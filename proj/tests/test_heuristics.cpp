#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "npplab/enumerate.hpp"
#include "npplab/heuristics.hpp"
#include "npplab/sampler.hpp"

using namespace npplab;

namespace {

Instance from_ints(const std::vector<long>& v, int frac_bits = 0) {
  std::vector<double> d(v.begin(), v.end());
  return quantize(d, frac_bits);
}

// Differencing loop on plain big integers: repeatedly replace the two
// largest values by their difference.
BigInt oracle_residue(const Instance& inst) {
  std::vector<BigInt> v;
  for (const auto& x : inst.numerators()) v.push_back(abs(x.to_big()));
  while (v.size() > 1) {
    std::sort(v.begin(), v.end());
    const BigInt a = v.back();
    v.pop_back();
    const BigInt b = v.back();
    v.pop_back();
    v.push_back(a - b);
  }
  return v[0];
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

PlantedSpec planted(int n, std::uint64_t seed) {
  PlantedSpec s;
  s.n = n;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("ldm on small examples") {
  const auto r = ldm_with_residue(from_ints({4, 5, 6, 7}));
  CHECK(r.residue.is_zero());
  CHECK(r.sigma.to_string() == "-++-");

  const Instance two = from_ints({5, 3});
  const auto r2 = ldm_with_residue(two);
  CHECK(r2.residue == Int256(2));
  CHECK(hamiltonian(r2.sigma, two).to_double() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  const Instance one = from_ints({-9});
  CHECK(ldm_with_residue(one).residue == Int256(9));
  CHECK(hamiltonian(ldm(one), one).to_double() == doctest::Approx(9.0).epsilon(1e-15));

  const Instance neg = from_ints({-4, 5, -6, 7});
  const auto rn = ldm_with_residue(neg);
  CHECK(rn.residue.is_zero());
  CHECK(inner_product(rn.sigma, neg).is_zero());
}

TEST_CASE("ldm residue identity on random instances") {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(gen() % 200);
    const Instance inst = sample_unplanted(n, gen());
    const auto r = ldm_with_residue(inst);
    REQUIRE(r.sigma.size() == n);
    CHECK(inner_product(r.sigma, inst).abs() == r.residue);
    CHECK(r.residue.to_big() == oracle_residue(inst));
  }
}

TEST_CASE("ldm and greedy never beat the exact optimum") {
  std::mt19937_64 gen(12);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(gen() % 13);
    const Instance inst = (t % 2) ? sample_unplanted(n, gen()) : sample_planted(planted(n, gen()));
    const Energy opt = full_scan(inst, Partition(n)).global_min.energy;
    CHECK(hamiltonian(ldm(inst), inst) >= opt);
    CHECK(hamiltonian(greedy(inst), inst) >= opt);
    CHECK(hamiltonian(exact_ground_state(inst), inst) == opt);
  }
}

TEST_CASE("ldm energy decays like 2^-Theta(log^2 n)") {
  const std::vector<int> ns{64, 128, 256, 512};
  std::vector<double> xs, meds;
  for (int n : ns) {
    std::vector<double> logs;
    for (int t = 0; t < 100; ++t) {
      const Instance inst = sample_unplanted(n, trial_instance_seed(12345, static_cast<std::uint64_t>(t)));
      logs.push_back(hamiltonian(ldm(inst), inst).log2());
    }
    const double l = std::log2(static_cast<double>(n));
    xs.push_back(l * l);
    meds.push_back(median(logs));
  }
  for (std::size_t i = 1; i < meds.size(); ++i) CHECK(meds[i] < meds[i - 1]);
  CHECK(pearson(xs, meds) <= -0.9);
}

TEST_CASE("greedy follows the smaller-sum rule") {
  const Instance inst = from_ints({4, 5, 6, 7});
  // 7 -> +, 6 -> -, 5 -> - (6 < 7), 4 -> + (7 < 11).
  const Partition g = greedy(inst);
  CHECK(g.to_string() == "+--+");
  CHECK(inner_product(g, inst).is_zero());

  CHECK(greedy(from_ints({3})).to_string() == "+");
  CHECK(greedy(from_ints({-3})).to_string() == "-");
  // Equal sums go to the + side; negative numbers enter by magnitude.
  CHECK(greedy(from_ints({2, -2})).to_string() == "++");
}

TEST_CASE("random search") {
  std::mt19937_64 gen(13);
  SUBCASE("full budget is exhaustive") {
    for (int t = 0; t < 20; ++t) {
      const int n = 2 + static_cast<int>(gen() % 12);
      const Instance inst = sample_unplanted(n, gen());
      const Partition p = random_search(inst, 1ULL << (n - 1), gen());
      CHECK(hamiltonian(p, inst) == full_scan(inst, Partition(n)).global_min.energy);
    }
  }
  SUBCASE("best of draws is at most the first draw") {
    for (int t = 0; t < 50; ++t) {
      const int n = 20 + static_cast<int>(gen() % 40);
      const Instance inst = sample_unplanted(n, gen());
      const std::uint64_t seed = gen();
      const Partition p = random_search(inst, 50, seed);
      CHECK(p.is_canonical());
      const Partition first = random_search(inst, 1, seed);
      CHECK(hamiltonian(p, inst) <= hamiltonian(first, inst));
      CHECK(random_search(inst, 50, seed) == p);
    }
  }
  SUBCASE("wide instances") {
    const Instance inst = sample_unplanted(150, 3);
    const Partition p = random_search(inst, 30, 4);
    CHECK(p.size() == 150);
    CHECK(p.is_canonical());
  }
  SUBCASE("ldm beats random search at n = 20") {
    std::vector<double> rs, ld;
    for (int t = 0; t < 100; ++t) {
      const Instance inst = sample_unplanted(20, trial_instance_seed(99, static_cast<std::uint64_t>(t)));
      rs.push_back(hamiltonian(random_search(inst, 1000, static_cast<std::uint64_t>(t)), inst).log2());
      ld.push_back(hamiltonian(ldm(inst), inst).log2());
    }
    CHECK(median(rs) > median(ld));
  }
  CHECK_THROWS_AS(random_search(sample_unplanted(5, 1), 0, 1), std::invalid_argument);
}

TEST_CASE("algorithm wrappers") {
  const Instance inst = sample_unplanted(6, 1);
  CHECK(algorithm_by_name("ldm")(inst, 0) == ldm(inst));
  CHECK(algorithm_by_name("greedy")(inst, 0) == greedy(inst));
  CHECK(algorithm_by_name("random")(inst, 5) == random_search(inst, 1000, 5));
  CHECK(algorithm_by_name("exact")(inst, 0) == exact_ground_state(inst));
  CHECK_THROWS_AS(algorithm_by_name("anneal"), std::invalid_argument);
  const Algorithm bad = constant_algorithm(Partition(3));
  CHECK_THROWS_AS(bad(inst, 0), std::logic_error);
}

TEST_CASE("success probe") {
  // sigma* has H <= 3^-n < 2^-(n/10), so the exact solver always succeeds.
  CHECK(success_probe(exact_algorithm(), planted(12, 1), 0.1, 30) == 1.0);
  CHECK(success_probe(constant_algorithm(Partition::parse("+-+-+-+-+-+-+-+-+-+-+-+-")), planted(24, 2), 0.9, 100) ==
        0.0);
  const Algorithm alg = ldm_algorithm();
  double prev = 1.0;
  for (double eps : {0.0, 0.1, 0.2, 0.3, 0.5, 0.8}) {
    const double f = success_probe(alg, planted(16, 3), eps, 60);
    CHECK(f <= prev);
    prev = f;
  }
  CHECK(success_probe(alg, planted(16, 3), 0.2, 60) == success_probe(alg, planted(16, 3), 0.2, 60, 3));
}

TEST_CASE("stability probe") {
  SUBCASE("constant map") {
    const auto recs = stability_probe(constant_algorithm(Partition(8)), 8, 0.5, 0.0, 0.0, 50, 7);
    REQUIRE(recs.size() == 50);
    for (const auto& r : recs) {
      CHECK(r.d_h == 0);
      CHECK(r.bound_ok);
    }
  }
  SUBCASE("sign-of-first-coordinate gadget") {
    const Algorithm gadget{"sign1", [](const Instance& inst, std::uint64_t) {
                             Partition p(inst.size());
                             if (inst.numerators()[0].is_negative()) p.flip(0);
                             return p;
                           }};
    const double rho = 0.99;
    const int trials = 20000;
    const auto recs = stability_probe(gadget, 4, rho, 0.0, 0.0, trials, 8);
    const double frac =
        static_cast<double>(std::count_if(recs.begin(), recs.end(), [](const auto& r) { return r.d_h > 0; })) / trials;
    // P[sign X1 != sign Y1] = 2 P[X > 0, Y < 0] by quadrature over the
    // conditional law Y | X = x ~ N(rho x, 1 - rho^2).
    const boost::math::normal_distribution<double> nd;
    const double s = std::sqrt(1 - rho * rho);
    const double truth = 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                   [&](double x) { return boost::math::pdf(nd, x) * boost::math::cdf(nd, -rho * x / s); },
                                   0.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
    CHECK(truth == doctest::Approx(0.0450).epsilon(0.01));
    const double se = std::sqrt(truth * (1 - truth) / trials);
    CHECK(std::fabs(frac - truth) < 4 * se);
  }
  SUBCASE("squared distance concentrates near 2(1 - rho) n") {
    const int n = 10;
    const double rho = 0.5;
    const auto recs = stability_probe(constant_algorithm(Partition(n)), n, rho, 0.0, 0.0, 10000, 9);
    double mean = 0;
    for (const auto& r : recs) mean += r.dist_sq / n / static_cast<double>(recs.size());
    CHECK(mean == doctest::Approx(2 * (1 - rho)).epsilon(0.02));
  }
  SUBCASE("bound flag and planted pairs") {
    PlantedSpec spec = planted(12, 0);
    spec.bound_scale_sq = 2.0;
    const auto recs = stability_probe(ldm_algorithm(), 0, 0.9, 1.0, 0.5, 40, 10, spec, 2);
    for (const auto& r : recs) {
      CHECK(r.d_h >= 0);
      CHECK(r.d_h <= 12);
      CHECK(r.bound_ok == (r.d_h <= 1.0 + 0.5 * r.dist_sq));
    }
    CHECK(recs[3].dist_sq == stability_probe(ldm_algorithm(), 0, 0.9, 1.0, 0.5, 40, 10, spec)[3].dist_sq);
  }
  CHECK_THROWS_AS(stability_probe(ldm_algorithm(), 4, 1.0, 0, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("stability csv") {
  std::vector<StabilityRecord> recs{{0, 0.5, 1.25, 3, true}, {1, 0.5, 0.1, 0, false}};
  std::ostringstream os;
  write_stability_csv(os, recs);
  CHECK(os.str() ==
        "trial,rho,dist_sq,d_h,bound_ok\n"
        "0,0.5,1.25,3,1\n"
        "1,0.5,0.10000000000000001,0,0\n");
}

TEST_CASE("anticoncentration probe") {
  const Partition star = Partition::parse("+-+--+-+");
  PlantedSpec spec = planted(8, 4);
  spec.sigma_star = star;
  CHECK(anticoncentration_probe(constant_algorithm(star), spec, 20) == 0.0);
  CHECK(anticoncentration_probe(constant_algorithm(star.negated()), spec, 20) == 0.0);
  CHECK(anticoncentration_probe(constant_algorithm(Partition(8)), spec, 20) == 1.0);
  const double f = anticoncentration_probe(ldm_algorithm(), planted(20, 5), 200);
  CHECK(f >= 0.0);
  CHECK(f <= 1.0);
  MESSAGE("ldm anticoncentration fraction at n = 20: " << f);
  CHECK(f == anticoncentration_probe(ldm_algorithm(), planted(20, 5), 200, 4));
}
