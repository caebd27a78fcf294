#include "npplab/energy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace npplab {

namespace {

using BigFloat = boost::multiprecision::cpp_bin_float_100;

Energy from_scaled(const BigFloat& h, int n, int frac_bits) {
  if (h < 0) throw std::invalid_argument("Energy threshold must be nonnegative");
  const BigFloat scaled = h * boost::multiprecision::sqrt(BigFloat(n)) *
                          boost::multiprecision::ldexp(BigFloat(1), frac_bits);
  if (scaled >= boost::multiprecision::ldexp(BigFloat(1), 254)) return Energy::infinity(n, frac_bits);
  const BigInt floor_val = static_cast<BigInt>(boost::multiprecision::floor(scaled));
  return Energy::from_inner(Int256::from_big(floor_val), n, frac_bits);
}

}  // namespace

Energy Energy::from_inner(const Int256& inner, int n, int frac_bits) {
  Energy e;
  e.numerator_ = inner.abs();
  e.n_ = n;
  e.frac_bits_ = frac_bits;
  e.log2_ = e.numerator_.log2_abs() - frac_bits - 0.5 * std::log2(static_cast<double>(n));
  return e;
}

Energy Energy::infinity(int n, int frac_bits) {
  Energy e;
  e.numerator_ = Int256::max();
  e.n_ = n;
  e.frac_bits_ = frac_bits;
  e.log2_ = std::numeric_limits<double>::infinity();
  e.infinite_ = true;
  return e;
}

Energy Energy::at_most(double h, int n, int frac_bits) {
  if (std::isinf(h) && h > 0) return infinity(n, frac_bits);
  return from_scaled(BigFloat(h), n, frac_bits);
}

Energy Energy::at_most_pow2(double exponent, int n, int frac_bits) {
  if (std::isinf(exponent) && exponent > 0) return infinity(n, frac_bits);
  return from_scaled(boost::multiprecision::pow(BigFloat(2), BigFloat(exponent)), n, frac_bits);
}

Energy Energy::at_most_pow(double base, double exponent, int n, int frac_bits) {
  if (!(base > 0)) throw std::invalid_argument("Energy::at_most_pow: base must be positive");
  return from_scaled(boost::multiprecision::pow(BigFloat(base), BigFloat(exponent)), n, frac_bits);
}

double Energy::to_double() const { return std::exp2(log2_); }

std::strong_ordering operator<=>(const Energy& a, const Energy& b) {
  if (a.infinite_ || b.infinite_) {
    if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
    return a.infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  if (a.n_ != b.n_ || a.frac_bits_ != b.frac_bits_) {
    throw std::invalid_argument("Energy comparison across different n or frac_bits");
  }
  return a.numerator_ <=> b.numerator_;
}

Energy hamiltonian(const Partition& sigma, const Instance& inst) {
  return Energy::from_inner(inner_product(sigma, inst), inst.size(), inst.frac_bits());
}

}  // namespace npplab
