#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "npplab/energy.hpp"
#include "npplab/instance.hpp"
#include "npplab/partition.hpp"
#include "npplab/wide_int.hpp"

using namespace npplab;

namespace {

BigInt random_big(std::mt19937_64& gen, int bits) {
  BigInt v = 0;
  for (int i = 0; i < (bits + 63) / 64; ++i) v = (v << 64) | BigInt(gen());
  v >>= ((bits + 63) / 64) * 64 - bits;
  return (gen() & 1) ? BigInt(-v) : v;
}

Partition random_partition(std::mt19937_64& gen, int n) {
  Partition p(n);
  for (int i = 0; i < n; ++i) {
    if (gen() & 1) p.flip(i);
  }
  return p;
}

Instance random_instance(std::mt19937_64& gen, int n) {
  std::normal_distribution<double> nd;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = nd(gen);
  return quantize(v);
}

// Round-half-even of a / 2^k computed with big integers only.
BigInt round_shift_oracle(const BigInt& a, unsigned k) {
  const BigInt mag = a < 0 ? BigInt(-a) : a;
  const BigInt unit = BigInt(1) << k;
  BigInt q = mag / unit;
  const BigInt r = mag % unit;
  const BigInt twice = 2 * r;
  if (twice > unit || (twice == unit && (q & 1) == 1)) q += 1;
  return a < 0 ? BigInt(-q) : q;
}

}  // namespace

TEST_CASE("Int256 arithmetic agrees with big-integer arithmetic") {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 2000; ++t) {
    const BigInt a = random_big(gen, 1 + static_cast<int>(gen() % 250));
    const BigInt b = random_big(gen, 1 + static_cast<int>(gen() % 250));
    const Int256 ia = Int256::from_big(a);
    const Int256 ib = Int256::from_big(b);
    CHECK(ia.to_big() == a);
    CHECK((ia + ib).to_big() == a + b);
    CHECK((ia - ib).to_big() == a - b);
    CHECK((-ia).to_big() == -a);
    CHECK(((ia <=> ib) < 0) == (a < b));
    CHECK(Int256::parse(ia.to_string()) == ia);
    const unsigned k = static_cast<unsigned>(gen() % 200);
    CHECK(ia.shr_round_even(k).to_big() == round_shift_oracle(a, k));
    const auto f = static_cast<std::int64_t>(gen() % 2000001) - 1000000;
    const BigInt small = a >> 20;
    CHECK(Int256::from_big(small).mul(f).to_big() == small * f);
    const std::uint64_t d = 1 + gen() % 1000;
    const auto dm = ia.divmod_floor(d);
    CHECK(dm.remainder < d);
    CHECK(dm.quotient.to_big() * d + dm.remainder == a);
  }
}

TEST_CASE("Int256 log2 and double conversion") {
  CHECK(Int256(0).log2_abs() == -INFINITY);
  CHECK(Int256(1024).log2_abs() == doctest::Approx(10.0));
  const Int256 big = Int256(3).shl(200);
  CHECK(big.log2_abs() == doctest::Approx(200 + std::log2(3.0)).epsilon(1e-14));
  CHECK(big.bit_width_abs() == 202);
  CHECK((-big).to_double() == doctest::Approx(-3.0 * std::ldexp(1.0, 200)));
  CHECK_THROWS_AS(Int256(1).shl(200).mul(1LL << 60), std::overflow_error);
}

TEST_CASE("scale_round and mul_round round half to even") {
  CHECK(scale_round(0.5, 1) == Int256(1));
  CHECK(scale_round(1.0 / 3.0, 2) == Int256(1));
  CHECK(scale_round(0.125, 2) == Int256(0));
  CHECK(scale_round(0.375, 2) == Int256(2));
  CHECK(scale_round(-0.375, 2) == Int256(-2));
  CHECK(mul_round(Int256(3), 0.5) == Int256(2));
  CHECK(mul_round(Int256(5), 0.5) == Int256(2));
  CHECK(mul_round(Int256(-5), 0.5) == Int256(-2));
  CHECK(mul_round(Int256(7), 1.0) == Int256(7));
  CHECK(mul_round(Int256(7), 0.0) == Int256(0));
}

TEST_CASE("hamiltonian examples") {
  const std::vector<double> x = {1.5, 0.5, -0.25, 0.75};
  const Instance inst = quantize(x);
  const Energy e = hamiltonian(Partition::parse("+-+-"), inst);
  CHECK(e.numerator().is_zero());
  CHECK(e.log2() == -INFINITY);

  const Instance zero = quantize(std::vector<double>(7, 0.0));
  std::mt19937_64 gen(3);
  for (int t = 0; t < 10; ++t) {
    CHECK(hamiltonian(random_partition(gen, 7), zero).numerator().is_zero());
  }

  const Energy h = hamiltonian(Partition::parse("++++"), inst);
  CHECK(h.to_double() == doctest::Approx(2.5 / 2.0));
  CHECK_THROWS_AS(hamiltonian(Partition(3), inst), std::invalid_argument);
}

TEST_CASE("hamiltonian is invariant under global sign flip") {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 100; ++t) {
    const Instance inst = random_instance(gen, 16);
    const Partition s = random_partition(gen, 16);
    CHECK(hamiltonian(s, inst) == hamiltonian(s.negated(), inst));
  }
}

TEST_CASE("energy log2 matches the real value") {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 100; ++t) {
    const Instance inst = random_instance(gen, 10);
    const Partition s = random_partition(gen, 10);
    const Energy e = hamiltonian(s, inst);
    double direct = 0.0;
    for (int i = 0; i < 10; ++i) direct += s.sign(i) * inst.at(i).to_double();
    const double expected = std::log2(std::fabs(direct) / std::sqrt(10.0));
    CHECK(e.log2() == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("energy thresholds are exact floors") {
  const int n = 9;
  const Energy t = Energy::at_most(1.0, n, 4);
  CHECK(t.numerator() == Int256(48));  // 1 * 3 * 16
  const Energy half = Energy::at_most_pow2(-1.0, n, 4);
  CHECK(half.numerator() == Int256(24));
  const Energy third = Energy::at_most_pow(3.0, -1.0, n, 4);
  CHECK(third.numerator() == Int256(16));
  const Energy two = Energy::at_most(std::sqrt(2.0), 2, 10);
  CHECK(two.numerator() == Int256(2048));  // the double nearest sqrt(2) lies above it
  CHECK(Energy::infinity(n, 4) > t);
  CHECK(Energy::from_inner(Int256(-48), n, 4) == t);
  CHECK_THROWS_AS(Energy::at_most(-1.0, n, 4), std::invalid_argument);
}

TEST_CASE("overlap and hamming distance") {
  const Partition a = Partition::parse("++++");
  CHECK(overlap(a, a).value() == 1.0);
  CHECK(overlap(a, a.negated()).value() == -1.0);
  CHECK(overlap(a, Partition::parse("++--")).numerator == 0);
  CHECK(hamming_distance(a, a) == 0);
  CHECK(hamming_distance(a, a.negated()) == 4);
  CHECK(hamming_distance(a, Partition::parse("+-+-")) == 2);
  CHECK_THROWS_AS(overlap(a, Partition(5)), std::invalid_argument);
  CHECK_THROWS_AS(hamming_distance(a, Partition(5)), std::invalid_argument);

  std::mt19937_64 gen(2);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(gen() % 150);
    const Partition x = random_partition(gen, n);
    const Partition y = random_partition(gen, n);
    int d = 0;
    for (int i = 0; i < n; ++i) d += x.sign(i) != y.sign(i);
    CHECK(hamming_distance(x, y) == d);
    CHECK(overlap(x, y).numerator == n - 2 * d);
  }
}

TEST_CASE("canonicalize") {
  CHECK(canonicalize(Partition::parse("+--")) == Partition::parse("+--"));
  CHECK(canonicalize(Partition::parse("-++")) == Partition::parse("+--"));
  std::mt19937_64 gen(4);
  for (int t = 0; t < 100; ++t) {
    const Partition s = random_partition(gen, 70);
    CHECK(canonicalize(canonicalize(s)) == canonicalize(s));
    CHECK(canonicalize(s).is_canonical());
  }
}

TEST_CASE("partition parsing and ordering") {
  CHECK(Partition::parse("+-+").to_string() == "+-+");
  CHECK_THROWS_AS(Partition::parse("+x"), std::invalid_argument);
  CHECK(Partition::parse("++-") < Partition::parse("+-+"));
  CHECK(Partition::from_mask(3, 0b010) == Partition::parse("+-+"));
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) {
      const bool lt = Partition::from_mask(4, a) < Partition::from_mask(4, b);
      CHECK(lt == (lex_key(4, a) < lex_key(4, b)));
    }
  }
}

TEST_CASE("quantize") {
  CHECK(quantize(std::vector<double>{0.5}, 1).numerators()[0] == Int256(1));
  CHECK(quantize(std::vector<double>{1.0 / 3.0}, 2).numerators()[0] == Int256(1));
  CHECK_THROWS_AS(quantize(std::vector<double>{0x1p20}), std::overflow_error);
  CHECK_THROWS_AS(quantize(std::vector<double>{1.0}, kMaxFracBits + 1), std::overflow_error);

  std::mt19937_64 gen(6);
  const Instance inst = random_instance(gen, 30);
  CHECK(quantize(dequantize(inst)) == inst);
  const auto v = dequantize(inst);
  CHECK(quantize(v) == quantize(v));
}

TEST_CASE("instance text round trip") {
  std::mt19937_64 gen(9);
  const Instance plain = random_instance(gen, 12);
  std::stringstream ss;
  write_instance(ss, plain);
  CHECK(read_instance(ss) == plain);

  // A planted instance constructed by hand: x = (a, a) with sigma* = (+,-).
  const Int256 a = Int256(12345).shl(100);
  Planting p;
  p.sigma_star = Partition::parse("+-");
  p.inner = {Int256(0), kDefaultFracBits};
  const Instance planted(kDefaultFracBits, {a, a}, p);
  CHECK(planting_bound_holds(planted));
  std::stringstream ps;
  write_instance(ps, planted);
  const Instance back = read_instance(ps);
  CHECK(back == planted);
  CHECK(back.planted()->sigma_star == p.sigma_star);

  Planting wrong = p;
  wrong.inner = {Int256(1), kDefaultFracBits};
  CHECK_THROWS_AS(Instance(kDefaultFracBits, {a, a}, wrong), std::invalid_argument);
}

TEST_CASE("planting bound check is exact at the boundary") {
  // n = 2, F = 10, C = 4: bound on the numerator is 2^-4 * sqrt(2) * 2^10 = 90.5...
  Planting p;
  p.sigma_star = Partition::parse("++");
  p.base_c = 4.0;
  const int f = 10;
  auto make = [&](std::int64_t inner) {
    Planting q = p;
    q.inner = {Int256(inner), f};
    return q;
  };
  CHECK_NOTHROW(Instance(f, {Int256(90), Int256(0)}, make(90)));
  CHECK_THROWS_AS(Instance(f, {Int256(91), Int256(0)}, make(91)), std::invalid_argument);
  Planting wide = make(91);
  wide.bound_scale_sq = 2.0;
  CHECK_NOTHROW(Instance(f, {Int256(91), Int256(0)}, wide));
}
