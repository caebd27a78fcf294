#include "npplab/sampler.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace npplab {

namespace {

using BigFloat = boost::multiprecision::cpp_bin_float_100;

std::vector<Int256> gaussian_numerators(int n, Rng& rng, int frac_bits) {
  std::vector<Int256> z;
  z.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z.push_back(scale_round(rng.normal(), frac_bits));
  return z;
}

Partition resolve_sigma(const PlantedSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("PlantedSpec: n must be positive");
  if (!(spec.base_c > 2.0)) throw std::invalid_argument("PlantedSpec: base_c must exceed 2");
  if (!(spec.bound_scale_sq > 0.0)) throw std::invalid_argument("PlantedSpec: bound_scale_sq must be positive");
  if (spec.sigma_star.size() == 0) return Partition(spec.n);
  if (spec.sigma_star.size() != spec.n) throw std::invalid_argument("PlantedSpec: sigma_star dimension mismatch");
  return spec.sigma_star;
}

double real_bound(const PlantedSpec& spec) {
  return std::sqrt(spec.bound_scale_sq) * std::pow(spec.base_c, -static_cast<double>(spec.n));
}

Int256 clamp_magnitude(const Int256& v, const Int256& bound) {
  if (v > bound) return bound;
  if (v < -bound) return -bound;
  return v;
}

// Target numerator round(sqrt(n) g 2^F), clamped into the admissible range.
Int256 target_numerator(double g, const PlantedSpec& spec, const Int256& bound) {
  return clamp_magnitude(scale_round(g * std::sqrt(static_cast<double>(spec.n)), spec.frac_bits), bound);
}

// Moves z along sigma so that <sigma, z> = target exactly. The integer
// residue of the division by n goes to the first coordinates.
void condition_on_target(std::vector<Int256>& z, const Partition& sigma, const Int256& target) {
  const int n = sigma.size();
  Int256 s;
  for (int i = 0; i < n; ++i) {
    if (sigma.minus(i)) {
      s -= z[static_cast<std::size_t>(i)];
    } else {
      s += z[static_cast<std::size_t>(i)];
    }
  }
  const auto [q, r] = (s - target).divmod_floor(static_cast<std::uint64_t>(n));
  for (int i = 0; i < n; ++i) {
    Int256 shift = q;
    if (static_cast<std::uint64_t>(i) < r) shift += Int256(1);
    if (sigma.minus(i)) {
      z[static_cast<std::size_t>(i)] += shift;
    } else {
      z[static_cast<std::size_t>(i)] -= shift;
    }
  }
}

Instance make_planted(std::vector<Int256> x, const Partition& sigma, const PlantedSpec& spec,
                      const Int256& target) {
  Planting p;
  p.sigma_star = sigma;
  p.base_c = spec.base_c;
  p.bound_scale_sq = spec.bound_scale_sq;
  p.inner = {target, spec.frac_bits};
  return Instance(spec.frac_bits, std::move(x), std::move(p));
}

// (g1, g2) standard bivariate normal with correlation rho, restricted to
// [-b, b]^2.
std::pair<double, double> sample_box_pair(double b, double rho, Rng& rng) {
  const double s = std::sqrt(1.0 - rho * rho);
  if (b >= 1.0) {
    for (;;) {
      const double g1 = rng.normal();
      const double g2 = rho * g1 + s * rng.normal();
      if (std::fabs(g1) <= b && std::fabs(g2) <= b) return {g1, g2};
    }
  }
  const double u1 = (2.0 * rng.uniform() - 1.0) * b;
  const double u2 = (2.0 * rng.uniform() - 1.0) * b;
  if (b <= kUniformTruncationBound) return {u1, u2};
  for (double g1 = u1, g2 = u2;; g1 = (2.0 * rng.uniform() - 1.0) * b, g2 = (2.0 * rng.uniform() - 1.0) * b) {
    const double quad = (g1 * g1 - 2.0 * rho * g1 * g2 + g2 * g2) / (2.0 * (1.0 - rho * rho));
    if (rng.uniform() <= std::exp(-quad)) return {g1, g2};
  }
}

}  // namespace

Int256 planting_numerator_bound(int n, double base_c, double bound_scale_sq, int frac_bits) {
  struct Memo {
    int n = -1;
    double base_c = 0.0;
    double scale_sq = 0.0;
    int frac_bits = -1;
    Int256 bound;
  };
  thread_local Memo memo;
  if (memo.n == n && memo.base_c == base_c && memo.scale_sq == bound_scale_sq && memo.frac_bits == frac_bits) {
    return memo.bound;
  }
  const BigFloat v = boost::multiprecision::sqrt(BigFloat(bound_scale_sq)) *
                     boost::multiprecision::pow(BigFloat(base_c), -n) *
                     boost::multiprecision::sqrt(BigFloat(n)) *
                     boost::multiprecision::ldexp(BigFloat(1), frac_bits);
  Int256 b = Int256::from_big(static_cast<BigInt>(boost::multiprecision::floor(v)));
  // Settle the last unit exactly.
  while (!b.is_zero() && !planting_bound_holds(b, n, frac_bits, base_c, bound_scale_sq)) b -= Int256(1);
  while (planting_bound_holds(b + Int256(1), n, frac_bits, base_c, bound_scale_sq)) b += Int256(1);
  memo = {n, base_c, bound_scale_sq, frac_bits, b};
  return b;
}

Instance sample_unplanted(int n, std::uint64_t seed, int frac_bits) {
  if (n < 1) throw std::invalid_argument("sample_unplanted: n must be positive");
  Rng rng(seed, 0);
  return Instance(frac_bits, gaussian_numerators(n, rng, frac_bits));
}

double sample_truncated_std_normal(double bound, Rng& rng) {
  if (!(bound > 0.0)) throw std::invalid_argument("sample_truncated_std_normal: bound must be positive");
  if (bound <= kUniformTruncationBound) return (2.0 * rng.uniform() - 1.0) * bound;
  if (bound >= 1.0) {
    for (;;) {
      const double g = rng.normal();
      if (std::fabs(g) <= bound) return g;
    }
  }
  for (;;) {
    const double u = (2.0 * rng.uniform() - 1.0) * bound;
    if (rng.uniform() <= std::exp(-0.5 * u * u)) return u;
  }
}

Instance sample_planted(const PlantedSpec& spec) {
  const Partition sigma = resolve_sigma(spec);
  Rng rng(spec.seed, 0);
  std::vector<Int256> z = gaussian_numerators(spec.n, rng, spec.frac_bits);
  const double g = sample_truncated_std_normal(real_bound(spec), rng);
  const Int256 bound = planting_numerator_bound(spec.n, spec.base_c, spec.bound_scale_sq, spec.frac_bits);
  const Int256 target = target_numerator(g, spec, bound);
  condition_on_target(z, sigma, target);
  return make_planted(std::move(z), sigma, spec, target);
}

std::vector<Instance> sample_planted_ensemble(const EnsembleSpec& spec) {
  if (spec.replicas < 1) throw std::invalid_argument("EnsembleSpec: replicas must be >= 1");
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(spec.replicas) + 1);
  for (int j = 0; j <= spec.replicas; ++j) {
    PlantedSpec s = spec.planted;
    s.seed = substream_seed(spec.planted.seed, static_cast<std::uint64_t>(j));
    out.push_back(sample_planted(s));
  }
  return out;
}

Instance interpolated_instance(const Instance& x0, const Instance& xi, double tau) {
  if (x0.size() != xi.size()) throw std::invalid_argument("interpolated_instance: dimension mismatch");
  if (x0.frac_bits() != xi.frac_bits()) throw std::invalid_argument("interpolated_instance: frac_bits mismatch");
  if (!(tau >= 0.0 && tau <= std::numbers::pi / 2)) {
    throw std::invalid_argument("interpolated_instance: tau must lie in [0, pi/2]");
  }
  if (tau == 0.0) return x0.without_planting();
  if (tau == std::numbers::pi / 2) return xi.without_planting();
  const double c = std::cos(tau);
  const double s = std::sin(tau);
  std::vector<Int256> y;
  y.reserve(static_cast<std::size_t>(x0.size()));
  for (int i = 0; i < x0.size(); ++i) {
    y.push_back(mul_round(x0.numerators()[static_cast<std::size_t>(i)], c) +
                mul_round(xi.numerators()[static_cast<std::size_t>(i)], s));
  }
  return Instance(x0.frac_bits(), std::move(y));
}

std::pair<Instance, Instance> correlated_pair(int n, double rho, std::uint64_t seed, int frac_bits) {
  if (n < 1) throw std::invalid_argument("correlated_pair: n must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("correlated_pair: rho must lie in [0, 1)");
  Rng rx(seed, 0);
  Rng rw(seed, 1);
  std::vector<Int256> x = gaussian_numerators(n, rx, frac_bits);
  const std::vector<Int256> w = gaussian_numerators(n, rw, frac_bits);
  const double s = std::sqrt(1.0 - rho * rho);
  std::vector<Int256> y;
  y.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    y.push_back(mul_round(x[static_cast<std::size_t>(i)], rho) + mul_round(w[static_cast<std::size_t>(i)], s));
  }
  return {Instance(frac_bits, std::move(x)), Instance(frac_bits, std::move(y))};
}

std::pair<Instance, Instance> planted_correlated_pair(const PlantedSpec& spec, double rho) {
  const Partition sigma = resolve_sigma(spec);
  auto [x, y] = correlated_pair(spec.n, rho, spec.seed, spec.frac_bits);
  Rng rng(spec.seed, 2);
  const auto [g1, g2] = sample_box_pair(real_bound(spec), rho, rng);
  const Int256 bound = planting_numerator_bound(spec.n, spec.base_c, spec.bound_scale_sq, spec.frac_bits);
  const Int256 t1 = target_numerator(g1, spec, bound);
  const Int256 t2 = target_numerator(g2, spec, bound);
  std::vector<Int256> xs = x.numerators();
  std::vector<Int256> ys = y.numerators();
  condition_on_target(xs, sigma, t1);
  condition_on_target(ys, sigma, t2);
  return {make_planted(std::move(xs), sigma, spec, t1), make_planted(std::move(ys), sigma, spec, t2)};
}

}  // namespace npplab
