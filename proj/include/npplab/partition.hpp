#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace npplab {

// A sign vector sigma in {-1,+1}^n, bit-packed. A set bit means sigma(i) = -1.
class Partition {
 public:
  Partition() = default;
  // All-plus partition of dimension n.
  explicit Partition(int n);

  // From a string of '+' / '-' characters.
  static Partition parse(std::string_view signs);
  // From the low n bits of mask (n <= 64); bit i set means sigma(i) = -1.
  static Partition from_mask(int n, std::uint64_t mask);
  static Partition from_signs(const std::vector<int>& signs);

  int size() const { return n_; }
  int sign(int i) const { return minus(i) ? -1 : 1; }
  bool minus(int i) const { return (words_[i / 64] >> (i % 64)) & 1ULL; }
  void set_sign(int i, int s);
  void flip(int i) { words_[i / 64] ^= 1ULL << (i % 64); }

  Partition negated() const;
  // sigma if sigma(1) = +1, otherwise -sigma.
  Partition canonical() const { return minus(0) ? negated() : *this; }
  bool is_canonical() const { return n_ > 0 && !minus(0); }

  std::uint64_t mask64() const;
  const std::vector<std::uint64_t>& words() const { return words_; }
  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  // Lexicographic order of the '+'/'-' strings ('+' sorts first).
  friend std::strong_ordering operator<=>(const Partition& a, const Partition& b);

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

// n * overlap, i.e. <a,b> = n - 2 d_H(a,b).
struct OverlapValue {
  int n = 0;
  int numerator = 0;

  double value() const { return static_cast<double>(numerator) / n; }
  friend bool operator==(const OverlapValue&, const OverlapValue&) = default;
};

int hamming_distance(const Partition& a, const Partition& b);
OverlapValue overlap(const Partition& a, const Partition& b);
inline Partition canonicalize(const Partition& sigma) { return sigma.canonical(); }

// Key for lexicographic comparison of canonical partitions of dimension
// n <= 64: coordinate 0 lands on the most significant of the n bits.
std::uint64_t lex_key(int n, std::uint64_t mask);

}  // namespace npplab
