#include "npplab/partition.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace npplab {

namespace {

void require_same_dim(const Partition& a, const Partition& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

}  // namespace

Partition::Partition(int n) : n_(n), words_((n + 63) / 64, 0) {
  if (n < 1) throw std::invalid_argument("Partition: n must be positive");
}

Partition Partition::parse(std::string_view signs) {
  Partition p(static_cast<int>(signs.size()));
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] == '-') {
      p.flip(static_cast<int>(i));
    } else if (signs[i] != '+') {
      throw std::invalid_argument("Partition::parse: expected '+' or '-', got '" +
                                  std::string(1, signs[i]) + "'");
    }
  }
  return p;
}

Partition Partition::from_mask(int n, std::uint64_t mask) {
  if (n > 64) throw std::invalid_argument("Partition::from_mask: n > 64");
  Partition p(n);
  p.words_[0] = n == 64 ? mask : (mask & ((1ULL << n) - 1));
  return p;
}

Partition Partition::from_signs(const std::vector<int>& signs) {
  Partition p(static_cast<int>(signs.size()));
  for (std::size_t i = 0; i < signs.size(); ++i) p.set_sign(static_cast<int>(i), signs[i]);
  return p;
}

void Partition::set_sign(int i, int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("Partition: sign must be +1 or -1");
  const std::uint64_t bit = 1ULL << (i % 64);
  if (s < 0) {
    words_[i / 64] |= bit;
  } else {
    words_[i / 64] &= ~bit;
  }
}

Partition Partition::negated() const {
  Partition p = *this;
  for (auto& w : p.words_) w = ~w;
  const int tail = n_ % 64;
  if (tail != 0) p.words_.back() &= (1ULL << tail) - 1;
  return p;
}

std::uint64_t Partition::mask64() const {
  if (n_ > 64) throw std::invalid_argument("Partition::mask64: n > 64");
  return words_[0];
}

std::string Partition::to_string() const {
  std::string s(static_cast<std::size_t>(n_), '+');
  for (int i = 0; i < n_; ++i) {
    if (minus(i)) s[static_cast<std::size_t>(i)] = '-';
  }
  return s;
}

std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
  const int n = std::min(a.n_, b.n_);
  for (int w = 0; w * 64 < n; ++w) {
    const std::uint64_t diff = a.words_[w] ^ b.words_[w];
    if (diff == 0) continue;
    const int i = w * 64 + std::countr_zero(diff);
    if (i >= n) break;
    return a.minus(i) ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return a.n_ <=> b.n_;
}

int hamming_distance(const Partition& a, const Partition& b) {
  require_same_dim(a, b, "hamming_distance");
  int d = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w) {
    d += std::popcount(a.words()[w] ^ b.words()[w]);
  }
  return d;
}

OverlapValue overlap(const Partition& a, const Partition& b) {
  require_same_dim(a, b, "overlap");
  return {a.size(), a.size() - 2 * hamming_distance(a, b)};
}

std::uint64_t lex_key(int n, std::uint64_t mask) {
  std::uint64_t v = mask;
  v = ((v >> 1) & 0x5555555555555555ULL) | ((v & 0x5555555555555555ULL) << 1);
  v = ((v >> 2) & 0x3333333333333333ULL) | ((v & 0x3333333333333333ULL) << 2);
  v = ((v >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((v & 0x0F0F0F0F0F0F0F0FULL) << 4);
  v = __builtin_bswap64(v);
  return v >> (64 - n);
}

}  // namespace npplab
