#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "npplab/energy.hpp"
#include "npplab/instance.hpp"
#include "npplab/partition.hpp"
#include "npplab/sampler.hpp"

namespace npplab {

// A randomized solver A(X, omega), with omega passed explicitly as a seed.
// solve must be a pure function of its arguments and return a partition of
// the input dimension.
struct Algorithm {
  std::string name;
  std::function<Partition(const Instance&, std::uint64_t)> solve;

  Partition operator()(const Instance& inst, std::uint64_t seed) const;
};

struct LdmResult {
  Partition sigma;
  Int256 residue;  // numerator of the final difference
};

// Largest differencing method: the two largest remaining magnitudes a >= b
// are replaced by a - b, and the pair is constrained to opposite sides; the
// constraint tree is 2-colored from the last survivor. Equal magnitudes are
// ordered by the lowest original index. |<sigma, x>| equals residue exactly.
LdmResult ldm_with_residue(const Instance& inst);
Partition ldm(const Instance& inst);

// Numbers in descending magnitude (ties by index), each put on the side with
// the smaller running sum; equal sums go to the + side.
Partition greedy(const Instance& inst);

// Best of budget uniformly random canonical partitions, the earliest draw
// winning ties. When budget covers all 2^(n-1) canonical partitions the
// whole cube is enumerated instead, giving the exact optimum.
Partition random_search(const Instance& inst, std::uint64_t budget, std::uint64_t seed);

// Exact ground state by full scan (canonical, lexicographically first).
Partition exact_ground_state(const Instance& inst, int max_n = 30);

Algorithm ldm_algorithm();
Algorithm greedy_algorithm();
Algorithm random_search_algorithm(std::uint64_t budget);
Algorithm exact_algorithm(int max_n = 30);
// Ignores its input and returns sigma (whose dimension must match).
Algorithm constant_algorithm(const Partition& sigma);
// Throws std::invalid_argument for an unknown name. Known names: ldm, greedy,
// random (budget 1000), exact, constant (all plus).
Algorithm algorithm_by_name(const std::string& name);

// Per-trial seeds of the probes: trial t uses instance seed
// substream_seed(seed, t) and algorithm seed substream_seed(that, 1).
std::uint64_t trial_instance_seed(std::uint64_t seed, std::uint64_t trial);
std::uint64_t trial_algorithm_seed(std::uint64_t instance_seed);

// Fraction of planted instances with H(alg(X), X) <= 2^(-eps n), compared
// exactly. Instances come from spec with per-trial seeds.
double success_probe(const Algorithm& alg, const PlantedSpec& spec, double eps, int trials, int threads = 1);

struct StabilityRecord {
  int trial = 0;
  double rho = 0.0;
  double dist_sq = 0.0;  // ||X - Y||^2
  int d_h = 0;           // d_H(alg(X), alg(Y))
  bool bound_ok = false; // d_h <= f + L dist_sq
};

// For each trial, a rho-correlated pair (X, Y) is solved with the same
// algorithm seed. Without planted the pair is correlated_pair(n, rho);
// with it the pair is planted_correlated_pair(*planted, rho) and n is taken
// from the spec.
std::vector<StabilityRecord> stability_probe(const Algorithm& alg, int n, double rho, double f, double L,
                                             int trials, std::uint64_t seed,
                                             const std::optional<PlantedSpec>& planted = std::nullopt,
                                             int threads = 1);

// CSV with header trial,rho,dist_sq,d_h,bound_ok.
void write_stability_csv(std::ostream& out, const std::vector<StabilityRecord>& records);

// Fraction of planted instances whose output is neither sigma* nor -sigma*.
double anticoncentration_probe(const Algorithm& alg, const PlantedSpec& spec, int trials, int threads = 1);

}  // namespace npplab
