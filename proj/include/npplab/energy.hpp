#pragma once

#include <compare>

#include "npplab/instance.hpp"
#include "npplab/partition.hpp"
#include "npplab/wide_int.hpp"

namespace npplab {

// H(sigma, X) = |<sigma, X>| / sqrt(n).
//
// The exact part is the nonnegative fixed-point numerator of |<sigma, X>|;
// the 1/sqrt(n) factor is kept symbolic, so energies on the same dimension
// compare as integers. log2() is the reported real value.
class Energy {
 public:
  Energy() = default;

  static Energy from_inner(const Int256& inner, int n, int frac_bits);
  static Energy infinity(int n, int frac_bits);

  // The largest exact energy not above the real h >= 0, i.e. numerator
  // floor(h sqrt(n) 2^F). H(sigma) <= h iff hamiltonian(sigma) <= at_most(h).
  static Energy at_most(double h, int n, int frac_bits);
  // Same, for h = 2^exponent.
  static Energy at_most_pow2(double exponent, int n, int frac_bits);
  // Same, for h = base^exponent (base > 0).
  static Energy at_most_pow(double base, double exponent, int n, int frac_bits);

  const Int256& numerator() const { return numerator_; }
  int dimension() const { return n_; }
  int frac_bits() const { return frac_bits_; }
  bool is_infinite() const { return infinite_; }
  double log2() const { return log2_; }
  double to_double() const;

  friend bool operator==(const Energy& a, const Energy& b) {
    return a.infinite_ == b.infinite_ && a.numerator_ == b.numerator_;
  }
  friend std::strong_ordering operator<=>(const Energy& a, const Energy& b);

 private:
  Int256 numerator_;
  int n_ = 1;
  int frac_bits_ = kDefaultFracBits;
  double log2_ = 0.0;
  bool infinite_ = false;
};

Energy hamiltonian(const Partition& sigma, const Instance& inst);

}  // namespace npplab
