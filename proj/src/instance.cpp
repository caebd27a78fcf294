#include "npplab/instance.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace npplab {

namespace {

void require_same_scale(const FixedReal& a, const FixedReal& b) {
  if (a.frac_bits != b.frac_bits) throw std::invalid_argument("FixedReal: frac_bits mismatch");
}

// d = mantissa * 2^exponent with an odd (or zero) integer mantissa.
struct Dyadic {
  BigInt mantissa;
  int exponent = 0;
};

Dyadic to_dyadic(double d) {
  int exp = 0;
  const double frac = std::frexp(d, &exp);
  auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  int e = exp - 53;
  while (mant != 0 && (mant & 1) == 0) {
    mant /= 2;
    ++e;
  }
  return {BigInt(mant), e};
}

BigInt pow2(int k) { return BigInt(1) << k; }

}  // namespace

double FixedReal::to_double() const { return std::ldexp(raw.to_double(), -frac_bits); }

FixedReal operator+(const FixedReal& a, const FixedReal& b) {
  require_same_scale(a, b);
  return {a.raw + b.raw, a.frac_bits};
}

FixedReal operator-(const FixedReal& a, const FixedReal& b) {
  require_same_scale(a, b);
  return {a.raw - b.raw, a.frac_bits};
}

FixedReal operator-(const FixedReal& a) { return {-a.raw, a.frac_bits}; }

double Planting::target_g() const {
  return inner.to_double() / std::sqrt(static_cast<double>(sigma_star.size()));
}

Instance::Instance(int frac_bits, std::vector<Int256> x, std::optional<Planting> planted)
    : frac_bits_(frac_bits), x_(std::move(x)), planted_(std::move(planted)) {
  if (frac_bits_ < 0 || frac_bits_ > kMaxFracBits) {
    throw std::invalid_argument("Instance: frac_bits out of range");
  }
  if (x_.empty()) throw std::invalid_argument("Instance: n must be positive");
  if (planted_) {
    if (planted_->sigma_star.size() != size()) {
      throw std::invalid_argument("Instance: sigma_star dimension mismatch");
    }
    if (!(planted_->base_c > 2.0)) throw std::invalid_argument("Instance: base_c must exceed 2");
    if (planted_->inner.frac_bits != frac_bits_ ||
        planted_->inner.raw != inner_product(planted_->sigma_star, *this)) {
      throw std::invalid_argument("Instance: stored planted target differs from <sigma*, x>");
    }
    if (!planting_bound_holds(*this)) {
      throw std::invalid_argument("Instance: planted partition violates H(sigma*) <= C^-n");
    }
  }
}

Instance Instance::without_planting() const {
  Instance copy = *this;
  copy.planted_.reset();
  return copy;
}

Instance quantize(std::span<const double> values, int frac_bits) {
  if (frac_bits < 0 || frac_bits > kMaxFracBits) {
    throw std::overflow_error("quantize: frac_bits outside [0, " + std::to_string(kMaxFracBits) + "]");
  }
  std::vector<Int256> x;
  x.reserve(values.size());
  for (const double v : values) {
    if (!std::isfinite(v) || std::fabs(v) >= 0x1p20) {
      throw std::overflow_error("quantize: |value| must be below 2^20");
    }
    x.push_back(scale_round(v, frac_bits));
  }
  return Instance(frac_bits, std::move(x));
}

std::vector<double> dequantize(const Instance& inst) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(inst.size()));
  for (int i = 0; i < inst.size(); ++i) out.push_back(inst.at(i).to_double());
  return out;
}

Int256 inner_product(const Partition& sigma, const Instance& inst) {
  if (sigma.size() != inst.size()) {
    throw std::invalid_argument("inner_product: dimension mismatch (" + std::to_string(sigma.size()) +
                                " vs " + std::to_string(inst.size()) + ")");
  }
  Int256 sum;
  const auto& x = inst.numerators();
  for (int i = 0; i < inst.size(); ++i) {
    if (sigma.minus(i)) {
      sum -= x[static_cast<std::size_t>(i)];
    } else {
      sum += x[static_cast<std::size_t>(i)];
    }
  }
  return sum;
}

bool planting_bound_holds(const Instance& inst) {
  if (!inst.planted()) return false;
  const Planting& p = *inst.planted();
  return planting_bound_holds(p.inner.raw, inst.size(), inst.frac_bits(), p.base_c, p.bound_scale_sq);
}

bool planting_bound_holds(const Int256& inner, int n, int frac_bits, double base_c,
                          double bound_scale_sq) {
  // T^2 C^{2n} <= s^2 n 2^{2F}, with C = a 2^b and s^2 = u 2^v.
  const BigInt t = inner.to_big();
  const Dyadic c = to_dyadic(base_c);
  const Dyadic s = to_dyadic(bound_scale_sq);
  BigInt lhs = t * t * boost::multiprecision::pow(c.mantissa, static_cast<unsigned>(2 * n));
  BigInt rhs = s.mantissa * n;
  const int lhs_exp = 2 * n * c.exponent;
  const int rhs_exp = s.exponent + 2 * frac_bits;
  const int common = std::min(lhs_exp, rhs_exp);
  lhs *= pow2(lhs_exp - common);
  rhs *= pow2(rhs_exp - common);
  return lhs <= rhs;
}

void write_instance(std::ostream& out, const Instance& inst) {
  out << inst.size() << ' ' << inst.frac_bits();
  if (inst.planted()) {
    std::ostringstream c;
    c << std::setprecision(17) << inst.planted()->base_c;
    out << ' ' << c.str() << ' ' << inst.planted()->sigma_star.to_string();
    if (inst.planted()->bound_scale_sq != 1.0) {
      std::ostringstream s;
      s << std::setprecision(17) << inst.planted()->bound_scale_sq;
      out << ' ' << s.str();
    }
  }
  out << '\n';
  for (const auto& v : inst.numerators()) out << v.to_string() << '\n';
}

Instance read_instance(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("read_instance: missing header");
  std::istringstream hs(header);
  int n = 0;
  int frac_bits = 0;
  if (!(hs >> n >> frac_bits) || n < 1) throw std::invalid_argument("read_instance: bad header");
  double base_c = 0.0;
  std::string sigma;
  double scale_sq = 1.0;
  const bool planted = static_cast<bool>(hs >> base_c);
  if (planted) {
    if (!(hs >> sigma)) throw std::invalid_argument("read_instance: planted header needs sigma_star");
    if (!(hs >> scale_sq)) scale_sq = 1.0;
  }
  std::vector<Int256> x;
  x.reserve(static_cast<std::size_t>(n));
  std::string line;
  while (static_cast<int>(x.size()) < n && std::getline(in, line)) {
    if (line.empty()) continue;
    x.push_back(Int256::parse(line));
  }
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("read_instance: expected n numerators");
  if (!planted) return Instance(frac_bits, std::move(x));
  Planting p;
  p.sigma_star = Partition::parse(sigma);
  p.base_c = base_c;
  p.bound_scale_sq = scale_sq;
  const Instance bare(frac_bits, x);
  p.inner = {inner_product(p.sigma_star, bare), frac_bits};
  return Instance(frac_bits, std::move(x), std::move(p));
}

}  // namespace npplab
