#include "npplab/enumerate.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <thread>

namespace npplab {

namespace {

using u128 = unsigned __int128;

// 192-bit two's complement accumulator: the scan's working copy of an Int256
// numerator when every partial sum fits in 191 bits (always the case at the
// default 128 fractional bits).
struct Num192 {
  static constexpr int kBits = 192;
  u128 lo = 0;
  std::uint64_t hi = 0;

  static Num192 from(const Int256& v) {
    const auto& l = v.limbs();
    return {(static_cast<u128>(l[1]) << 64) | l[0], l[2]};
  }
  static Num192 max() { return {~static_cast<u128>(0), ~0ULL >> 1}; }

  Int256 to_int256() const {
    const std::uint64_t ext = static_cast<std::int64_t>(hi) < 0 ? ~0ULL : 0ULL;
    return Int256::from_limbs({static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(lo >> 64), hi, ext});
  }

  void add(const Num192& o) {
    const u128 r = lo + o.lo;
    hi += o.hi + (r < lo ? 1 : 0);
    lo = r;
  }

  Num192 magnitude() const {
    const std::uint64_t m = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) >> 63);
    const u128 mm = (static_cast<u128>(m) << 64) | m;
    const u128 l = (lo ^ mm) + (m & 1ULL);
    return {l, (hi ^ m) + ((m != 0 && l == 0) ? 1 : 0)};
  }

  std::uint64_t top() const { return hi; }
  friend int compare_mag(const Num192& a, const Num192& b) {
    if (a.hi != b.hi) return a.hi < b.hi ? -1 : 1;
    if (a.lo != b.lo) return a.lo < b.lo ? -1 : 1;
    return 0;
  }
};

// Full-width fallback for instances with larger numerators.
struct Num256 {
  static constexpr int kBits = 256;
  std::array<std::uint64_t, 4> w{};

  static Num256 from(const Int256& v) { return {v.limbs()}; }
  static Num256 max() { return {{~0ULL, ~0ULL, ~0ULL, ~0ULL >> 1}}; }
  Int256 to_int256() const { return Int256::from_limbs(w); }

  void add(const Num256& o) {
    u128 c = 0;
    for (int i = 0; i < 4; ++i) {
      c += static_cast<u128>(w[i]) + o.w[i];
      w[i] = static_cast<std::uint64_t>(c);
      c >>= 64;
    }
  }

  Num256 magnitude() const { return {to_int256().abs().limbs()}; }

  std::uint64_t top() const { return w[3]; }
  friend int compare_mag(const Num256& a, const Num256& b) {
    for (int i = 3; i >= 0; --i) {
      if (a.w[i] != b.w[i]) return a.w[i] < b.w[i] ? -1 : 1;
    }
    return 0;
  }
};

template <class Num>
inline bool mag_le(const Num& a, const Num& b) {
  return compare_mag(a, b) <= 0;
}

std::uint64_t low_mask(int n) { return n >= 64 ? ~0ULL : ((1ULL << n) - 1); }

std::uint64_t mask_of(const Partition& p) { return p.words().empty() ? 0 : p.words()[0]; }

// Whether every partial sum of +-2 x_i fits a 192-bit accumulator.
bool fits_192(const Instance& inst) {
  Int256 total;
  for (const auto& x : inst.numerators()) total += x.abs();
  return total.bit_width_abs() + 2 <= 190;
}

template <class Num>
struct BlockState {
  std::vector<Num> best;        // per canonical distance, magnitude
  std::vector<std::uint64_t> arg;  // per canonical distance, mask
  std::vector<bool> seen;
  std::vector<std::vector<std::uint64_t>> dist_counts;
  std::uint64_t visited = 0;

  BlockState(int n, std::size_t thresholds)
      : best(static_cast<std::size_t>(n + 1), Num::max()),
        arg(static_cast<std::size_t>(n + 1), 0),
        seen(static_cast<std::size_t>(n + 1), false),
        dist_counts(thresholds, std::vector<std::uint64_t>(static_cast<std::size_t>(n + 1), 0)) {}

  void offer(int n, int d, const Num& mag, std::uint64_t mask) {
    const auto k = static_cast<std::size_t>(d);
    const int c = compare_mag(mag, best[k]);
    if (c < 0 || (c == 0 && (!seen[k] || lex_key(n, mask) < lex_key(n, arg[k])))) {
      best[k] = mag;
      arg[k] = mask;
      seen[k] = true;
    }
  }

  void merge(int n, const BlockState& o) {
    for (std::size_t k = 0; k < best.size(); ++k) {
      if (o.seen[k]) offer(n, static_cast<int>(k), o.best[k], o.arg[k]);
    }
    for (std::size_t t = 0; t < dist_counts.size(); ++t) {
      for (std::size_t k = 0; k < dist_counts[t].size(); ++k) dist_counts[t][k] += o.dist_counts[t][k];
    }
    visited += o.visited;
  }
};

template <class Num>
struct Kernel {
  int n;
  std::uint64_t star;
  std::vector<Num> x;       // numerators
  std::vector<Num> step[2];  // step[bit][c]: change of <sigma,x> when coordinate c flips from bit
  std::vector<Num> thr;

  Kernel(const Instance& inst, const Partition& sigma_star, const std::vector<Energy>& thresholds)
      : n(inst.size()), star(mask_of(sigma_star)) {
    for (int c = 0; c < n; ++c) {
      const Int256& v = inst.numerators()[static_cast<std::size_t>(c)];
      x.push_back(Num::from(v));
      const Int256 twice = v + v;
      step[0].push_back(Num::from(-twice));
      step[1].push_back(Num::from(twice));
    }
    for (const auto& t : thresholds) {
      thr.push_back(t.is_infinite() || t.numerator().bit_width_abs() >= Num::kBits - 1 ? Num::max()
                                                                                   : Num::from(t.numerator()));
    }
  }

  // Gray-code walk over coordinates 1..low, the higher coordinates fixed by
  // prefix_mask.
  void run_block(std::uint64_t prefix_mask, int low, BlockState<Num>& st,
                 const std::function<void(std::uint64_t, const Int256&)>& audit) const {
    if (audit) {
      walk<true>(prefix_mask, low, st, audit);
    } else {
      walk<false>(prefix_mask, low, st, audit);
    }
  }

  template <bool Audit>
  void walk(std::uint64_t prefix_mask, int low, BlockState<Num>& st,
            const std::function<void(std::uint64_t, const Int256&)>& audit) const {
    std::uint64_t mask = prefix_mask;
    Num s;
    for (int c = 0; c < n; ++c) {
      Num term = x[static_cast<std::size_t>(c)];
      if ((mask >> c) & 1ULL) term = Num::from(-term.to_int256());
      s.add(term);
    }
    int d = std::popcount((mask ^ star) & low_mask(n));
    const std::size_t nt = thr.size();
    const std::uint64_t total = 1ULL << low;
    Num* best = st.best.data();
    const Num* up = step[0].data();
    const Num* down = step[1].data();
    for (std::uint64_t t = 0;;) {
      if constexpr (Audit) audit(mask, s.to_int256());
      const Num mag = s.magnitude();
      // Top limb first: almost every state is rejected here.
      if (mag.top() <= best[d].top() && mag_le(mag, best[d])) st.offer(n, d, mag, mask);
      for (std::size_t i = 0; i < nt; ++i) {
        if (mag_le(mag, thr[i])) ++st.dist_counts[i][static_cast<std::size_t>(d)];
      }
      if (++t == total) break;
      const int c = 1 + std::countr_zero(t);
      const std::uint64_t bit = (mask >> c) & 1ULL;
      s.add(bit ? down[c] : up[c]);
      d += ((bit ^ (star >> c)) & 1ULL) ? -1 : 1;
      mask ^= 1ULL << c;
    }
    st.visited += total;
  }
};

template <class Num>
ScanResult scan_impl(const Instance& inst, const Partition& sigma_star, const std::vector<Energy>& thresholds,
                     const ScanOptions& options) {
  const int n = inst.size();
  const Kernel<Num> kernel(inst, sigma_star, thresholds);
  const int free = n - 1;
  int prefix = options.prefix_bits;
  if (prefix < 0) prefix = std::min(free, free > 20 ? 6 : 0);
  prefix = std::min(prefix, free);
  const int low = free - prefix;
  const std::uint64_t blocks = 1ULL << prefix;
  int threads = options.threads == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                                     : options.threads;
  threads = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(1, threads)), blocks));

  std::vector<BlockState<Num>> states(static_cast<std::size_t>(threads), BlockState<Num>(n, thresholds.size()));
  auto worker = [&](int id) {
    for (std::uint64_t b = static_cast<std::uint64_t>(id); b < blocks; b += static_cast<std::uint64_t>(threads)) {
      kernel.run_block(b << (1 + low), low, states[static_cast<std::size_t>(id)], options.audit);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker, i);
    for (auto& th : pool) th.join();
  }
  BlockState<Num>& st = states[0];
  for (std::size_t i = 1; i < states.size(); ++i) st.merge(n, states[i]);

  ScanResult r;
  r.n = n;
  r.sigma_star = sigma_star;
  r.visited = st.visited;
  const int f = inst.frac_bits();
  auto energy_at = [&](int d) { return Energy::from_inner(st.best[static_cast<std::size_t>(d)].to_int256(), n, f); };
  auto partition_at = [&](int d) { return Partition::from_mask(n, st.arg[static_cast<std::size_t>(d)]); };

  // Canonical distance d of sigma* itself: 0, or n when sigma*(1) = -1.
  const int star_d = sigma_star.minus(0) ? n : 0;
  std::optional<int> best_all;
  std::optional<int> best_excl;
  auto better = [&](int a, int b) {
    const int c = compare_mag(st.best[static_cast<std::size_t>(a)], st.best[static_cast<std::size_t>(b)]);
    return c < 0 || (c == 0 && lex_key(n, st.arg[static_cast<std::size_t>(a)]) <
                                   lex_key(n, st.arg[static_cast<std::size_t>(b)]));
  };
  for (int d = 0; d <= n; ++d) {
    if (!st.seen[static_cast<std::size_t>(d)]) continue;
    if (!best_all || better(d, *best_all)) best_all = d;
    if (d != star_d && (!best_excl || better(d, *best_excl))) best_excl = d;
  }
  r.global_min = {partition_at(*best_all), energy_at(*best_all)};
  if (best_excl) {
    r.global_min_excl = {partition_at(*best_excl), energy_at(*best_excl)};
  } else {
    r.global_min_excl = {Partition(n), Energy::infinity(n, f)};
  }

  const Energy star_energy = hamiltonian(sigma_star, inst);
  r.zeta.assign(static_cast<std::size_t>(n + 1), star_energy);
  r.zeta_arg.assign(static_cast<std::size_t>(n + 1), sigma_star.canonical());
  for (int k = 1; k < n; ++k) {
    // sigma at distance k is canonical at distance k, or the negation of a
    // canonical partition at distance n - k.
    const bool a = st.seen[static_cast<std::size_t>(k)];
    const bool b = st.seen[static_cast<std::size_t>(n - k)];
    int pick = a ? k : n - k;
    if (a && b && better(n - k, k)) pick = n - k;
    if (!a && !b) {
      r.zeta[static_cast<std::size_t>(k)] = Energy::infinity(n, f);
      continue;
    }
    r.zeta[static_cast<std::size_t>(k)] = energy_at(pick);
    r.zeta_arg[static_cast<std::size_t>(k)] = partition_at(pick);
  }
  r.distance_counts = st.dist_counts;
  r.count_below.assign(thresholds.size(), 0);
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    for (const auto c : st.dist_counts[t]) r.count_below[t] += c;
  }
  return r;
}

void check_scan_size(int n, int max_n) {
  if (n > max_n || n > 63) {
    throw BudgetError("exhaustive scan: n = " + std::to_string(n) + " exceeds the maximum of " +
                      std::to_string(std::min(max_n, 63)));
  }
}

}  // namespace

ScanResult full_scan(const Instance& inst, const Partition& sigma_star, const std::vector<Energy>& thresholds,
                     const ScanOptions& options) {
  const int n = inst.size();
  if (sigma_star.size() != n) throw std::invalid_argument("full_scan: sigma_star dimension mismatch");
  check_scan_size(n, options.max_n);
  for (const auto& t : thresholds) {
    if (!t.is_infinite() && (t.dimension() != n || t.frac_bits() != inst.frac_bits())) {
      throw std::invalid_argument("full_scan: threshold built for a different n or frac_bits");
    }
  }
  if (fits_192(inst)) return scan_impl<Num192>(inst, sigma_star, thresholds, options);
  return scan_impl<Num256>(inst, sigma_star, thresholds, options);
}

std::uint64_t ball_size(int n, int d) {
  unsigned __int128 total = 0;
  unsigned __int128 c = 1;
  for (int k = 1; k <= d; ++k) {
    c = c * static_cast<unsigned>(n - k + 1) / static_cast<unsigned>(k);
    total += c;
    if (total > ~0ULL) return ~0ULL;
  }
  return static_cast<std::uint64_t>(total);
}

Minimizer ball_min(const Instance& inst, const Partition& sigma_star, int d, std::uint64_t budget) {
  const int n = inst.size();
  if (sigma_star.size() != n) throw std::invalid_argument("ball_min: sigma_star dimension mismatch");
  if (d < 1 || d > n) throw std::invalid_argument("ball_min: d must lie in [1, n]");
  const std::uint64_t size = ball_size(n, d);
  if (size > budget) {
    throw BudgetError("ball_min: ball of radius " + std::to_string(d) + " holds " + std::to_string(size) +
                      " partitions, budget " + std::to_string(budget));
  }
  // <sigma, x> after flipping set S from sigma*: base - sum_{i in S} 2 sigma*_i x_i.
  const Int256 base = inner_product(sigma_star, inst);
  std::vector<Int256> delta;
  for (int i = 0; i < n; ++i) {
    const Int256& v = inst.numerators()[static_cast<std::size_t>(i)];
    delta.push_back(sigma_star.minus(i) ? v + v : -(v + v));
  }
  Partition current = sigma_star;
  Partition best_sigma;
  Int256 best_mag;
  bool have = false;
  auto consider = [&](const Int256& s) {
    const Int256 mag = s.abs();
    if (have) {
      if (best_mag < mag) return;
      if (mag == best_mag) {
        const Partition cc = current.canonical();
        const Partition cb = best_sigma.canonical();
        if (cb < cc || (cb == cc && !current.is_canonical())) return;
      }
    }
    best_mag = mag;
    best_sigma = current;
    have = true;
  };
  // Depth-first over flip sets in increasing index order.
  auto rec = [&](auto&& self, int start, int depth, const Int256& s) -> void {
    for (int i = start; i < n; ++i) {
      const Int256 t = s + delta[static_cast<std::size_t>(i)];
      current.flip(i);
      consider(t);
      if (depth + 1 < d) self(self, i + 1, depth + 1, t);
      current.flip(i);
    }
  };
  rec(rec, 0, 0, base);
  return {best_sigma, Energy::from_inner(best_mag, n, inst.frac_bits())};
}

LevelSet extract_level_set(const Instance& inst, const Energy& threshold, std::size_t cap, int max_n) {
  const int n = inst.size();
  check_scan_size(n, max_n);
  LevelSet ls;
  ls.threshold = threshold;
  const bool everything = threshold.is_infinite();
  if (!everything && (threshold.dimension() != n || threshold.frac_bits() != inst.frac_bits())) {
    throw std::invalid_argument("extract_level_set: threshold built for a different n or frac_bits");
  }
  const Int256& limit = threshold.numerator();
  // Lexicographic order of canonical partitions is binary counting with
  // coordinate n-1 as the least significant digit.
  std::vector<Int256> twice;
  for (const auto& v : inst.numerators()) twice.push_back(v + v);
  Int256 s;
  for (const auto& v : inst.numerators()) s += v;
  Partition p(n);
  const std::uint64_t total = 1ULL << (n - 1);
  for (std::uint64_t idx = 0;;) {
    if (everything || Int256::magnitude_le(s.abs(), limit)) {
      if (ls.members.size() == cap) {
        ls.truncated = true;
        break;
      }
      ls.members.push_back(p);
    }
    if (++idx == total) break;
    // Increment: trailing minus signs become plus, the next plus becomes minus.
    int c = n - 1;
    while (p.minus(c)) {
      p.flip(c);
      s += twice[static_cast<std::size_t>(c)];
      --c;
    }
    p.flip(c);
    s -= twice[static_cast<std::size_t>(c)];
  }
  return ls;
}

std::map<int, std::uint64_t> overlap_histogram(const std::vector<Partition>& members) {
  if (members.size() < 2) throw std::invalid_argument("overlap_histogram: need at least two members");
  const int n = members.front().size();
  std::map<int, std::uint64_t> h;
  if (n <= 64) {
    std::vector<std::uint64_t> masks;
    masks.reserve(members.size());
    for (const auto& m : members) masks.push_back(m.mask64());
    std::vector<std::uint64_t> by_distance(static_cast<std::size_t>(n + 1), 0);
    for (std::size_t i = 0; i < masks.size(); ++i) {
      for (std::size_t j = i + 1; j < masks.size(); ++j) ++by_distance[static_cast<std::size_t>(std::popcount(masks[i] ^ masks[j]))];
    }
    for (int d = 0; d <= n; ++d) {
      if (by_distance[static_cast<std::size_t>(d)] != 0) h[n - 2 * d] = by_distance[static_cast<std::size_t>(d)];
    }
    return h;
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) ++h[overlap(members[i], members[j]).numerator];
  }
  return h;
}

std::map<int, std::uint64_t> overlap_histogram(const LevelSet& ls) { return overlap_histogram(ls.members); }

namespace {

struct Window {
  int lo;
  int hi;
  bool contains(int v) const { return v >= lo && v <= hi; }
};

// Integer numerators v with beta - eta <= v / n <= beta.
Window window_for(int n, double beta, double eta) {
  constexpr double kSlack = 1e-9;
  const double lo = (beta - eta) * n;
  const double hi = beta * n;
  return {static_cast<int>(std::ceil(lo - kSlack)), static_cast<int>(std::floor(hi + kSlack))};
}

}  // namespace

std::optional<std::vector<Partition>> find_m_tuple(const std::vector<std::vector<Partition>>& sets, double beta,
                                                   double eta, const std::optional<Partition>& forbid) {
  const std::size_t m = sets.size();
  if (m == 0) return std::nullopt;
  for (const auto& s : sets) {
    if (s.empty()) return std::nullopt;
  }
  const int n = sets.front().front().size();
  const Window w = window_for(n, beta, eta);
  // Candidates per set after dropping the forbidden pair.
  std::vector<std::vector<const Partition*>> cand(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& p : sets[i]) {
      if (p.size() != n) throw std::invalid_argument("find_m_tuple: dimension mismatch");
      if (forbid && (p == *forbid || p == forbid->negated())) continue;
      cand[i].push_back(&p);
    }
    if (cand[i].empty()) return std::nullopt;
  }
  std::vector<const Partition*> chosen(m, nullptr);
  // live[i]: candidates of set i compatible with every partition chosen so far.
  auto rec = [&](auto&& self, std::size_t level, const std::vector<std::vector<const Partition*>>& live) -> bool {
    if (level == m) return true;
    for (const Partition* p : live[level]) {
      chosen[level] = p;
      if (level + 1 == m) return true;
      std::vector<std::vector<const Partition*>> next(m);
      bool ok = true;
      for (std::size_t j = level + 1; j < m && ok; ++j) {
        for (const Partition* q : live[j]) {
          if (w.contains(overlap(*p, *q).numerator)) next[j].push_back(q);
        }
        ok = !next[j].empty();
      }
      if (ok && self(self, level + 1, next)) return true;
    }
    return false;
  };
  if (!rec(rec, 0, cand)) return std::nullopt;
  std::vector<Partition> out;
  out.reserve(m);
  for (const Partition* p : chosen) out.push_back(*p);
  return out;
}

std::optional<std::vector<Partition>> find_m_tuple(const std::vector<LevelSet>& sets, double beta, double eta,
                                                   const std::optional<Partition>& forbid) {
  std::vector<std::vector<Partition>> members;
  members.reserve(sets.size());
  for (const auto& s : sets) members.push_back(s.members);
  return find_m_tuple(members, beta, eta, forbid);
}

std::vector<Partition> sign_closure(const std::vector<Partition>& members) {
  std::vector<Partition> out;
  out.reserve(2 * members.size());
  for (const auto& p : members) {
    out.push_back(p);
    out.push_back(p.negated());
  }
  return out;
}

}  // namespace npplab
