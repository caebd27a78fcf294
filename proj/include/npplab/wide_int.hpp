#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace npplab {

using BigInt = boost::multiprecision::cpp_int;

// 256-bit two's complement integer, limbs little-endian.
//
// This is the numerator type of every fixed-point quantity in the library.
// Addition, subtraction and negation wrap silently; callers keep magnitudes
// below 2^254 (see kMaxFracBits in instance.hpp) so that never happens.
class Int256 {
 public:
  using Limbs = std::array<std::uint64_t, 4>;

  constexpr Int256() = default;
  constexpr Int256(std::int64_t v)  // NOLINT(google-explicit-constructor)
      : limbs_{static_cast<std::uint64_t>(v), v < 0 ? ~0ULL : 0ULL,
               v < 0 ? ~0ULL : 0ULL, v < 0 ? ~0ULL : 0ULL} {}

  static Int256 from_limbs(const Limbs& l) {
    Int256 r;
    r.limbs_ = l;
    return r;
  }
  static Int256 max();
  static Int256 from_big(const BigInt& v);
  static Int256 parse(std::string_view text);

  const Limbs& limbs() const { return limbs_; }

  bool is_negative() const { return static_cast<std::int64_t>(limbs_[3]) < 0; }
  bool is_zero() const { return (limbs_[0] | limbs_[1] | limbs_[2] | limbs_[3]) == 0; }

  Int256 operator-() const {
    Int256 r;
    unsigned __int128 c = 1;
    for (int i = 0; i < 4; ++i) {
      c += static_cast<std::uint64_t>(~limbs_[i]);
      r.limbs_[i] = static_cast<std::uint64_t>(c);
      c >>= 64;
    }
    return r;
  }

  Int256& operator+=(const Int256& o) {
    unsigned __int128 c = 0;
    for (int i = 0; i < 4; ++i) {
      c += static_cast<unsigned __int128>(limbs_[i]) + o.limbs_[i];
      limbs_[i] = static_cast<std::uint64_t>(c);
      c >>= 64;
    }
    return *this;
  }

  Int256& operator-=(const Int256& o) {
    std::uint64_t borrow = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint64_t a = limbs_[i];
      const std::uint64_t b = o.limbs_[i];
      const std::uint64_t d = a - b - borrow;
      borrow = (a < b) || (a - b < borrow) ? 1 : 0;
      limbs_[i] = d;
    }
    return *this;
  }

  friend Int256 operator+(Int256 a, const Int256& b) { return a += b; }
  friend Int256 operator-(Int256 a, const Int256& b) { return a -= b; }

  Int256 abs() const { return is_negative() ? -*this : *this; }

  friend bool operator==(const Int256&, const Int256&) = default;
  friend std::strong_ordering operator<=>(const Int256& a, const Int256& b) {
    const auto ha = static_cast<std::int64_t>(a.limbs_[3]);
    const auto hb = static_cast<std::int64_t>(b.limbs_[3]);
    if (ha != hb) return ha <=> hb;
    for (int i = 2; i >= 0; --i) {
      if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
    }
    return std::strong_ordering::equal;
  }

  // Unsigned magnitude comparison of two nonnegative values; the hot path of
  // every landscape scan.
  static bool magnitude_le(const Int256& a, const Int256& b) {
    for (int i = 3; i >= 0; --i) {
      if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i];
    }
    return true;
  }

  Int256 shl(unsigned bits) const;
  // Arithmetic shift right with round-half-to-even on the magnitude.
  Int256 shr_round_even(unsigned bits) const;

  // Product with a signed 64-bit factor. Throws std::overflow_error when the
  // result leaves the representable range.
  Int256 mul(std::int64_t factor) const;

  // Floor division by a positive divisor: *this = q * d + r with 0 <= r < d.
  struct DivMod;
  DivMod divmod_floor(std::uint64_t divisor) const;

  // Number of significant bits of |*this| (0 for zero).
  int bit_width_abs() const;
  double to_double() const;
  // log2(|*this|); -inf for zero.
  double log2_abs() const;

  BigInt to_big() const;
  std::string to_string() const;

 private:
  Limbs limbs_{};
};

struct Int256::DivMod {
  Int256 quotient;
  std::uint64_t remainder;
};

// round(x * c) with c a finite double, rounding half to even. Exact: c is
// decomposed into its dyadic mantissa and exponent.
Int256 mul_round(const Int256& x, double c);

// round(v * 2^frac_bits), half to even, exact for every finite double.
Int256 scale_round(double v, int frac_bits);

}  // namespace npplab
