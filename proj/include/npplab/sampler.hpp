#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "npplab/instance.hpp"
#include "npplab/partition.hpp"
#include "npplab/rng.hpp"

namespace npplab {

struct PlantedSpec {
  int n = 0;
  double base_c = 3.0;
  Partition sigma_star;  // empty means all +1
  std::uint64_t seed = 0;
  int frac_bits = kDefaultFracBits;
  // The planting event is H(sigma*) <= sqrt(bound_scale_sq) * base_c^-n.
  double bound_scale_sq = 1.0;
};

struct EnsembleSpec {
  PlantedSpec planted;
  int replicas = 1;  // returns replicas + 1 instances
};

// Tolerance below which truncated normals are drawn uniformly.
inline constexpr double kUniformTruncationBound = 1e-6;

Instance sample_unplanted(int n, std::uint64_t seed, int frac_bits = kDefaultFracBits);

// N(0,1) restricted to [-bound, bound].
double sample_truncated_std_normal(double bound, Rng& rng);

// Exact linear conditioning: the sigma*-component of a Gaussian draw is
// replaced by a target drawn from the truncated law, the orthogonal part is
// untouched. Throws std::invalid_argument when base_c <= 2 or dimensions
// disagree.
Instance sample_planted(const PlantedSpec& spec);

// Replica j is sample_planted with seed substream_seed(seed, j).
std::vector<Instance> sample_planted_ensemble(const EnsembleSpec& spec);

// cos(tau) x0 + sin(tau) xi coordinate-wise, each product rounded half to
// even; tau = 0 and tau = pi/2 return the endpoints exactly. The result
// carries no planting metadata.
Instance interpolated_instance(const Instance& x0, const Instance& xi, double tau);

// (X, rho X + sqrt(1 - rho^2) W) with X, W independent standard Gaussian.
std::pair<Instance, Instance> correlated_pair(int n, double rho, std::uint64_t seed,
                                              int frac_bits = kDefaultFracBits);

// A rho-correlated pair conditioned jointly on both H(sigma*, X) and
// H(sigma*, Y) lying below sqrt(bound_scale_sq) * base_c^-n. The orthogonal
// parts are rho-correlated Gaussians; the two sigma*-components are drawn
// from the bivariate normal restricted to the box.
std::pair<Instance, Instance> planted_correlated_pair(const PlantedSpec& spec, double rho);

// floor(sqrt(bound_scale_sq) * base_c^-n * sqrt(n) * 2^F): the largest
// admissible |<sigma*, x>| numerator.
Int256 planting_numerator_bound(int n, double base_c, double bound_scale_sq, int frac_bits);

}  // namespace npplab
