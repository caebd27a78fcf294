#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "npplab/energy.hpp"
#include "npplab/instance.hpp"
#include "npplab/partition.hpp"

namespace npplab {

// Thrown when a request exceeds the exhaustive-search budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultMaxScanN = 30;
inline constexpr std::uint64_t kDefaultBallBudget = 1ULL << 31;
inline constexpr std::size_t kDefaultLevelSetCap = 1000000;

struct ScanOptions {
  int max_n = kDefaultMaxScanN;
  // Worker threads for the prefix-split scan; 0 picks the hardware count.
  int threads = 1;
  // Number of leading free coordinates fixed per block; -1 picks a default.
  int prefix_bits = -1;
  // Called with (mask, <sigma, x>) at every visited state when set; mask bit i
  // means sigma(i) = -1. Calls from different blocks may run concurrently.
  std::function<void(std::uint64_t, const Int256&)> audit;
};

struct Minimizer {
  Partition sigma;  // canonical
  Energy energy;
};

struct ScanResult {
  int n = 0;
  Partition sigma_star;
  // Minimum over the canonical partitions other than the class of sigma*.
  Minimizer global_min_excl;
  Minimizer global_min;
  // zeta[k], k = 1..n-1: minimum over all sigma in {-1,+1}^n with
  // d_H(sigma, sigma*) = k. Entries 0 and n hold H(sigma*).
  std::vector<Energy> zeta;
  std::vector<Partition> zeta_arg;  // a canonical minimizer per k
  // count_below[t]: canonical partitions with H <= thresholds[t].
  std::vector<std::uint64_t> count_below;
  // distance_counts[t][d]: canonical partitions at canonical distance d from
  // sigma* with H <= thresholds[t]. The full-cube count at distance k is
  // distance_counts[t][k] + distance_counts[t][n - k].
  std::vector<std::vector<std::uint64_t>> distance_counts;
  std::uint64_t visited = 0;
};

// Exhaustive Gray-code scan of the 2^(n-1) canonical partitions. Ties are
// resolved toward the lexicographically smallest canonical partition. Throws
// BudgetError when n > options.max_n or n > 63.
ScanResult full_scan(const Instance& inst, const Partition& sigma_star,
                     const std::vector<Energy>& thresholds = {}, const ScanOptions& options = {});

// Exact min of H over 1 <= d_H(sigma, sigma*) <= d. Returns the minimizer
// itself (not its canonical form); ties go to the partition whose canonical
// form is lexicographically smallest, then to the one with sigma(1) = +1.
// Throws std::invalid_argument for d outside [1, n] and BudgetError when the
// ball holds more than budget partitions.
Minimizer ball_min(const Instance& inst, const Partition& sigma_star, int d,
                   std::uint64_t budget = kDefaultBallBudget);

// Number of partitions in the ball 1 <= d_H <= d, saturating at 2^64 - 1.
std::uint64_t ball_size(int n, int d);

struct LevelSet {
  Energy threshold;
  std::vector<Partition> members;  // canonical, lexicographic order
  bool truncated = false;
};

// Canonical partitions with H <= threshold, in lexicographic order, stopping
// after cap members; truncated is set when more members exist.
LevelSet extract_level_set(const Instance& inst, const Energy& threshold,
                           std::size_t cap = kDefaultLevelSetCap, int max_n = kDefaultMaxScanN);

// Histogram of n * overlap over unordered pairs of members. Throws
// std::invalid_argument for fewer than two members.
std::map<int, std::uint64_t> overlap_histogram(const LevelSet& ls);
std::map<int, std::uint64_t> overlap_histogram(const std::vector<Partition>& members);

// sigma_i from sets[i] with beta - eta <= <sigma_i, sigma_j>/n <= beta for
// all i < j and sigma_i not in {forbid, -forbid}. Exhaustive; the tuple
// returned is the first in the order of the member lists.
std::optional<std::vector<Partition>> find_m_tuple(const std::vector<std::vector<Partition>>& sets,
                                                   double beta, double eta,
                                                   const std::optional<Partition>& forbid = std::nullopt);
std::optional<std::vector<Partition>> find_m_tuple(const std::vector<LevelSet>& sets, double beta,
                                                   double eta,
                                                   const std::optional<Partition>& forbid = std::nullopt);

// Both signs of every member: the level set over the whole cube.
std::vector<Partition> sign_closure(const std::vector<Partition>& members);

}  // namespace npplab
