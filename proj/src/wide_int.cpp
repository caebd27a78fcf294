#include "npplab/wide_int.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace npplab {

namespace {

Int256::Limbs magnitude_limbs(const Int256& v) { return v.abs().limbs(); }

Int256::Limbs shr_trunc(const Int256::Limbs& mag, unsigned bits) {
  Int256::Limbs out{};
  const unsigned words = bits / 64;
  const unsigned rem = bits % 64;
  for (unsigned i = 0; i < 4; ++i) {
    const unsigned src = i + words;
    if (src >= 4) break;
    std::uint64_t v = mag[src] >> rem;
    if (rem != 0 && src + 1 < 4) v |= mag[src + 1] << (64 - rem);
    out[i] = v;
  }
  return out;
}

}  // namespace

Int256 Int256::max() {
  return from_limbs({~0ULL, ~0ULL, ~0ULL, ~0ULL >> 1});
}

Int256 Int256::from_big(const BigInt& v) {
  const BigInt mag = boost::multiprecision::abs(v);
  if (boost::multiprecision::msb(mag + 1) >= 255) {
    throw std::overflow_error("Int256: value out of range");
  }
  Limbs l{};
  BigInt rest = mag;
  for (int i = 0; i < 4; ++i) {
    l[i] = static_cast<std::uint64_t>(rest & BigInt(~0ULL));
    rest >>= 64;
  }
  Int256 r = from_limbs(l);
  return v < 0 ? -r : r;
}

Int256 Int256::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("Int256: empty string");
  std::size_t pos = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (pos == text.size()) throw std::invalid_argument("Int256: no digits");
  for (std::size_t i = pos; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') {
      throw std::invalid_argument("Int256: invalid digit in '" + std::string(text) + "'");
    }
  }
  return from_big(BigInt(std::string(text)));
}

Int256 Int256::shl(unsigned bits) const {
  if (bits >= 256) return Int256();
  Int256 r;
  const unsigned words = bits / 64;
  const unsigned rem = bits % 64;
  for (int i = 3; i >= 0; --i) {
    const int src = i - static_cast<int>(words);
    if (src < 0) continue;
    std::uint64_t v = limbs_[src] << rem;
    if (rem != 0 && src > 0) v |= limbs_[src - 1] >> (64 - rem);
    r.limbs_[i] = v;
  }
  return r;
}

Int256 Int256::shr_round_even(unsigned bits) const {
  if (bits == 0) return *this;
  const bool neg = is_negative();
  const Limbs mag = magnitude_limbs(*this);
  if (bits > 256) return Int256();

  auto bit_at = [&](unsigned idx) -> bool {
    if (idx >= 256) return false;
    return (mag[idx / 64] >> (idx % 64)) & 1ULL;
  };
  bool below_half = false;  // any bit strictly below the half bit set
  for (unsigned i = 0; i + 1 < bits && i < 256; ++i) {
    if (bit_at(i)) {
      below_half = true;
      break;
    }
  }
  const bool half = bit_at(bits - 1);

  Int256 q = from_limbs(shr_trunc(mag, bits));
  const bool odd = q.limbs_[0] & 1ULL;
  if (half && (below_half || odd)) q += Int256(1);
  return neg ? -q : q;
}

Int256 Int256::mul(std::int64_t factor) const {
  const bool neg = is_negative() != (factor < 0);
  const Limbs mag = magnitude_limbs(*this);
  const std::uint64_t f =
      factor < 0 ? static_cast<std::uint64_t>(-(factor + 1)) + 1 : static_cast<std::uint64_t>(factor);
  Limbs out{};
  unsigned __int128 carry = 0;
  for (int i = 0; i < 4; ++i) {
    carry += static_cast<unsigned __int128>(mag[i]) * f;
    out[i] = static_cast<std::uint64_t>(carry);
    carry >>= 64;
  }
  if (carry != 0 || (out[3] >> 63) != 0) {
    throw std::overflow_error("Int256::mul: overflow");
  }
  const Int256 r = from_limbs(out);
  return neg ? -r : r;
}

Int256::DivMod Int256::divmod_floor(std::uint64_t divisor) const {
  if (divisor == 0) throw std::domain_error("Int256::divmod_floor: division by zero");
  const bool neg = is_negative();
  const Limbs mag = magnitude_limbs(*this);
  Limbs q{};
  unsigned __int128 rem = 0;
  for (int i = 3; i >= 0; --i) {
    rem = (rem << 64) | mag[i];
    q[i] = static_cast<std::uint64_t>(rem / divisor);
    rem %= divisor;
  }
  Int256 quot = from_limbs(q);
  auto r = static_cast<std::uint64_t>(rem);
  if (!neg) return {quot, r};
  // -(q*d + r) = -(q+1)*d + (d - r)
  if (r == 0) return {-quot, 0};
  return {-(quot + Int256(1)), divisor - r};
}

int Int256::bit_width_abs() const {
  const Limbs mag = magnitude_limbs(*this);
  for (int i = 3; i >= 0; --i) {
    if (mag[i] != 0) return 64 * i + static_cast<int>(std::bit_width(mag[i]));
  }
  return 0;
}

double Int256::to_double() const {
  const Limbs mag = magnitude_limbs(*this);
  double v = 0.0;
  for (int i = 3; i >= 0; --i) {
    v += std::ldexp(static_cast<double>(mag[i]), 64 * i);
  }
  return is_negative() ? -v : v;
}

double Int256::log2_abs() const {
  const int width = bit_width_abs();
  if (width == 0) return -std::numeric_limits<double>::infinity();
  // Top 128 bits carry far more precision than a double needs.
  const int shift = width > 128 ? width - 128 : 0;
  const Limbs t = shr_trunc(magnitude_limbs(*this), static_cast<unsigned>(shift));
  const double mant = std::ldexp(static_cast<double>(t[1]), 64) + static_cast<double>(t[0]);
  return std::log2(mant) + shift;
}

BigInt Int256::to_big() const {
  const Limbs mag = magnitude_limbs(*this);
  BigInt r = 0;
  for (int i = 3; i >= 0; --i) {
    r <<= 64;
    r += mag[i];
  }
  return is_negative() ? BigInt(-r) : r;
}

std::string Int256::to_string() const { return to_big().str(); }

Int256 mul_round(const Int256& x, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("mul_round: non-finite factor");
  if (c == 0.0 || x.is_zero()) return Int256();
  int exp = 0;
  const double frac = std::frexp(c, &exp);  // c = frac * 2^exp, 0.5 <= |frac| < 1
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  const int e = exp - 53;
  const Int256 prod = x.mul(mant);
  if (e >= 0) {
    if (prod.bit_width_abs() + e >= 255) throw std::overflow_error("mul_round: overflow");
    return prod.shl(static_cast<unsigned>(e));
  }
  return prod.shr_round_even(static_cast<unsigned>(-e));
}

Int256 scale_round(double v, int frac_bits) {
  if (!std::isfinite(v)) throw std::invalid_argument("scale_round: non-finite value");
  if (v == 0.0) return Int256();
  int exp = 0;
  const double frac = std::frexp(v, &exp);
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  const int e = exp - 53 + frac_bits;
  const Int256 m(mant);
  if (e >= 0) {
    if (53 + e >= 255) throw std::overflow_error("scale_round: overflow");
    return m.shl(static_cast<unsigned>(e));
  }
  return m.shr_round_even(static_cast<unsigned>(-e));
}

}  // namespace npplab
