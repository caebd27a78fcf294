#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "npplab/partition.hpp"
#include "npplab/wide_int.hpp"

namespace npplab {

inline constexpr int kDefaultFracBits = 128;
// Inputs are bounded by 2^20 in magnitude and sums run over at most 2^30
// terms, so 200 fractional bits keep every sum below 2^250.
inline constexpr int kMaxFracBits = 200;

// value = raw * 2^-frac_bits, exactly.
struct FixedReal {
  Int256 raw;
  int frac_bits = kDefaultFracBits;

  double to_double() const;
  friend bool operator==(const FixedReal&, const FixedReal&) = default;
};

FixedReal operator+(const FixedReal& a, const FixedReal& b);
FixedReal operator-(const FixedReal& a, const FixedReal& b);
FixedReal operator-(const FixedReal& a);

// Metadata of a planted instance. inner is <sigma*, x> exactly; the realized
// target is n^{-1/2} inner.
struct Planting {
  Partition sigma_star;
  double base_c = 3.0;
  // Square of the bound multiplier: the planting event is
  // H(sigma*) <= sqrt(bound_scale_sq) * base_c^-n. Stored squared so that
  // the sqrt(2) variant stays exactly representable.
  double bound_scale_sq = 1.0;
  FixedReal inner;

  double target_g() const;
  friend bool operator==(const Planting&, const Planting&) = default;
};

class Instance {
 public:
  Instance() = default;
  // Validates the planting invariants (exact inner product and the bound).
  Instance(int frac_bits, std::vector<Int256> x, std::optional<Planting> planted = std::nullopt);

  int size() const { return static_cast<int>(x_.size()); }
  int frac_bits() const { return frac_bits_; }
  const std::vector<Int256>& numerators() const { return x_; }
  FixedReal at(int i) const { return {x_[static_cast<std::size_t>(i)], frac_bits_}; }
  const std::optional<Planting>& planted() const { return planted_; }

  // A copy that forgets the planting metadata (the numbers are unchanged).
  Instance without_planting() const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  int frac_bits_ = kDefaultFracBits;
  std::vector<Int256> x_;
  std::optional<Planting> planted_;
};

// Rounds each value to the nearest multiple of 2^-frac_bits, ties to even.
// Throws std::overflow_error when |value| >= 2^20 or frac_bits is outside
// [0, kMaxFracBits].
Instance quantize(std::span<const double> values, int frac_bits = kDefaultFracBits);
std::vector<double> dequantize(const Instance& inst);

// <sigma, x> as an exact fixed-point numerator.
Int256 inner_product(const Partition& sigma, const Instance& inst);

// Exact check of |<sigma*,x>| / sqrt(n) <= sqrt(bound_scale_sq) * base_c^-n in
// big-integer arithmetic (base_c is an exact dyadic rational as a double).
bool planting_bound_holds(const Instance& inst);
// The same check for a bare numerator <sigma*, x>.
bool planting_bound_holds(const Int256& inner, int n, int frac_bits, double base_c,
                          double bound_scale_sq = 1.0);

// Text format: header "n F" or "n F base_c sigma_star", then one decimal
// numerator per line.
void write_instance(std::ostream& out, const Instance& inst);
Instance read_instance(std::istream& in);

}  // namespace npplab
