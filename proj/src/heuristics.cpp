#include "npplab/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "npplab/enumerate.hpp"
#include "npplab/parallel.hpp"
#include "npplab/rng.hpp"

namespace npplab {

namespace {

// Sign of each number as a partition: set bit where x_i < 0. Flipping these
// coordinates turns an assignment of magnitudes into one of the values.
Partition apply_signs(Partition sides, const Instance& inst) {
  for (int i = 0; i < inst.size(); ++i) {
    if (inst.numerators()[static_cast<std::size_t>(i)].is_negative()) sides.flip(i);
  }
  return sides;
}

void require_nonempty(const Instance& inst, const char* who) {
  if (inst.size() < 1) throw std::invalid_argument(std::string(who) + ": empty instance");
}

double squared_distance(const Instance& x, const Instance& y) {
  if (x.size() != y.size() || x.frac_bits() != y.frac_bits()) {
    throw std::invalid_argument("squared_distance: shape mismatch");
  }
  BigInt acc = 0;
  for (int i = 0; i < x.size(); ++i) {
    const BigInt d = (x.numerators()[static_cast<std::size_t>(i)] - y.numerators()[static_cast<std::size_t>(i)]).to_big();
    acc += d * d;
  }
  return std::ldexp(static_cast<double>(acc), -2 * x.frac_bits());
}

}  // namespace

Partition Algorithm::operator()(const Instance& inst, std::uint64_t seed) const {
  Partition p = solve(inst, seed);
  if (p.size() != inst.size()) throw std::logic_error("algorithm " + name + " returned a partition of wrong dimension");
  return p;
}

LdmResult ldm_with_residue(const Instance& inst) {
  require_nonempty(inst, "ldm");
  const int n = inst.size();
  struct Node {
    Int256 mag;
    int rep;
  };
  auto lower = [](const Node& a, const Node& b) {
    if (a.mag != b.mag) return a.mag < b.mag;
    return a.rep > b.rep;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(lower)> heap(lower);
  for (int i = 0; i < n; ++i) heap.push({inst.numerators()[static_cast<std::size_t>(i)].abs(), i});

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  while (heap.size() > 1) {
    const Node a = heap.top();
    heap.pop();
    const Node b = heap.top();
    heap.pop();
    adj[static_cast<std::size_t>(a.rep)].push_back(b.rep);
    adj[static_cast<std::size_t>(b.rep)].push_back(a.rep);
    heap.push({a.mag - b.mag, a.rep});
  }
  const Node root = heap.top();

  Partition sides(n);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{root.rep};
  seen[static_cast<std::size_t>(root.rep)] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      sides.set_sign(v, -sides.sign(u));
      stack.push_back(v);
    }
  }
  return {apply_signs(sides, inst), root.mag};
}

Partition ldm(const Instance& inst) { return ldm_with_residue(inst).sigma; }

Partition greedy(const Instance& inst) {
  require_nonempty(inst, "greedy");
  const int n = inst.size();
  std::vector<Int256> mags;
  mags.reserve(static_cast<std::size_t>(n));
  for (const auto& x : inst.numerators()) mags.push_back(x.abs());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return mags[static_cast<std::size_t>(a)] > mags[static_cast<std::size_t>(b)];
  });
  Partition sides(n);
  Int256 plus_sum;
  Int256 minus_sum;
  for (int i : order) {
    if (minus_sum < plus_sum) {
      sides.set_sign(i, -1);
      minus_sum += mags[static_cast<std::size_t>(i)];
    } else {
      plus_sum += mags[static_cast<std::size_t>(i)];
    }
  }
  return apply_signs(sides, inst);
}

Partition random_search(const Instance& inst, std::uint64_t budget, std::uint64_t seed) {
  require_nonempty(inst, "random_search");
  if (budget < 1) throw std::invalid_argument("random_search: budget must be >= 1");
  const int n = inst.size();
  if (n <= 64 && budget >= (1ULL << (n - 1))) {
    ScanOptions opt;
    opt.max_n = 63;
    return full_scan(inst, Partition(n), {}, opt).global_min.sigma;
  }
  Rng rng(seed, 0);
  std::optional<Partition> best;
  Int256 best_mag;
  for (std::uint64_t k = 0; k < budget; ++k) {
    Partition p(n);
    if (n <= 64) {
      const std::uint64_t mask = n == 64 ? ~0ULL : (1ULL << n) - 1;
      p = Partition::from_mask(n, rng.next_u64() & mask & ~1ULL);
    } else {
      std::uint64_t word = 0;
      for (int i = 1; i < n; ++i) {
        if (i % 64 == 1) word = rng.next_u64();
        if ((word >> (i % 64)) & 1ULL) p.flip(i);
      }
    }
    const Int256 mag = inner_product(p, inst).abs();
    if (!best || mag < best_mag) {
      best = std::move(p);
      best_mag = mag;
    }
  }
  return *best;
}

Partition exact_ground_state(const Instance& inst, int max_n) {
  require_nonempty(inst, "exact_ground_state");
  ScanOptions opt;
  opt.max_n = max_n;
  return full_scan(inst, Partition(inst.size()), {}, opt).global_min.sigma;
}

Algorithm ldm_algorithm() {
  return {"ldm", [](const Instance& inst, std::uint64_t) { return ldm(inst); }};
}

Algorithm greedy_algorithm() {
  return {"greedy", [](const Instance& inst, std::uint64_t) { return greedy(inst); }};
}

Algorithm random_search_algorithm(std::uint64_t budget) {
  return {"random", [budget](const Instance& inst, std::uint64_t seed) { return random_search(inst, budget, seed); }};
}

Algorithm exact_algorithm(int max_n) {
  return {"exact", [max_n](const Instance& inst, std::uint64_t) { return exact_ground_state(inst, max_n); }};
}

Algorithm constant_algorithm(const Partition& sigma) {
  return {"constant", [sigma](const Instance&, std::uint64_t) { return sigma; }};
}

Algorithm algorithm_by_name(const std::string& name) {
  if (name == "ldm") return ldm_algorithm();
  if (name == "greedy") return greedy_algorithm();
  if (name == "random") return random_search_algorithm(1000);
  if (name == "exact") return exact_algorithm();
  if (name == "constant") {
    return Algorithm{"constant", [](const Instance& inst, std::uint64_t) { return Partition(inst.size()); }};
  }
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::uint64_t trial_instance_seed(std::uint64_t seed, std::uint64_t trial) { return substream_seed(seed, trial); }

std::uint64_t trial_algorithm_seed(std::uint64_t instance_seed) { return substream_seed(instance_seed, 1); }

double success_probe(const Algorithm& alg, const PlantedSpec& spec, double eps, int trials, int threads) {
  if (trials < 1) throw std::invalid_argument("success_probe: trials must be >= 1");
  const Energy thr = Energy::at_most_pow2(-eps * spec.n, spec.n, spec.frac_bits);
  std::vector<char> hit(static_cast<std::size_t>(trials), 0);
  parallel_for(hit.size(), threads, [&](std::size_t t) {
    PlantedSpec s = spec;
    s.seed = trial_instance_seed(spec.seed, t);
    const Instance inst = sample_planted(s);
    hit[t] = hamiltonian(alg(inst, trial_algorithm_seed(s.seed)), inst) <= thr;
  });
  return static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / trials;
}

std::vector<StabilityRecord> stability_probe(const Algorithm& alg, int n, double rho, double f, double L,
                                             int trials, std::uint64_t seed,
                                             const std::optional<PlantedSpec>& planted, int threads) {
  if (trials < 1) throw std::invalid_argument("stability_probe: trials must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("stability_probe: rho must lie in [0, 1)");
  std::vector<StabilityRecord> out(static_cast<std::size_t>(trials));
  parallel_for(out.size(), threads, [&](std::size_t t) {
    const std::uint64_t s = trial_instance_seed(seed, t);
    std::pair<Instance, Instance> pair;
    if (planted) {
      PlantedSpec spec = *planted;
      spec.seed = s;
      pair = planted_correlated_pair(spec, rho);
    } else {
      pair = correlated_pair(n, rho, s);
    }
    const std::uint64_t omega = trial_algorithm_seed(s);
    StabilityRecord r;
    r.trial = static_cast<int>(t);
    r.rho = rho;
    r.dist_sq = squared_distance(pair.first, pair.second);
    r.d_h = hamming_distance(alg(pair.first, omega), alg(pair.second, omega));
    r.bound_ok = r.d_h <= f + L * r.dist_sq;
    out[t] = r;
  });
  return out;
}

void write_stability_csv(std::ostream& out, const std::vector<StabilityRecord>& records) {
  out << "trial,rho,dist_sq,d_h,bound_ok\n";
  char buf[64];
  for (const auto& r : records) {
    out << r.trial << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.rho);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.dist_sq);
    out << buf << ',' << r.d_h << ',' << (r.bound_ok ? 1 : 0) << '\n';
  }
}

double anticoncentration_probe(const Algorithm& alg, const PlantedSpec& spec, int trials, int threads) {
  if (trials < 1) throw std::invalid_argument("anticoncentration_probe: trials must be >= 1");
  std::vector<char> away(static_cast<std::size_t>(trials), 0);
  parallel_for(away.size(), threads, [&](std::size_t t) {
    PlantedSpec s = spec;
    s.seed = trial_instance_seed(spec.seed, t);
    const Instance inst = sample_planted(s);
    const Partition& star = inst.planted()->sigma_star;
    const Partition out = alg(inst, trial_algorithm_seed(s.seed));
    away[t] = out != star && out != star.negated();
  });
  return static_cast<double>(std::count(away.begin(), away.end(), 1)) / trials;
}

}  // namespace npplab
