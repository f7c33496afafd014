#include "mbdos/numeric.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include <boost/math/constants/constants.hpp>

namespace mbdos {

namespace {

unsigned g_precision_bits = 0;

unsigned digits10_for_bits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

struct PrecisionInit {
  PrecisionInit() { set_precision_bits(kDefaultPrecisionBits); }
};
const PrecisionInit g_init;

}  // namespace

int statistics_sign(Statistics s) { return s == Statistics::boson ? 1 : -1; }

std::string to_string(Statistics s) {
  return s == Statistics::boson ? "boson" : "fermion";
}

Statistics parse_statistics(const std::string& name) {
  if (name == "boson" || name == "bosons" || name == "+") return Statistics::boson;
  if (name == "fermion" || name == "fermions" || name == "-") return Statistics::fermion;
  throw DomainError("unknown statistics '" + name + "'");
}

unsigned precision_bits() { return g_precision_bits; }

void set_precision_bits(unsigned bits) {
  if (bits < kMinPrecisionBits)
    throw DomainError("precision must be at least 53 bits");
  g_precision_bits = bits;
  Real::default_precision(digits10_for_bits(bits));
}

unsigned precision_bits_from_env() {
  const char* env = std::getenv("MBDOS_PRECISION_BITS");
  if (env == nullptr || *env == '\0') return kDefaultPrecisionBits;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < static_cast<long>(kMinPrecisionBits) || v > 100000)
    throw DomainError(std::string("bad MBDOS_PRECISION_BITS '") + env + "'");
  return static_cast<unsigned>(v);
}

ScopedPrecision::ScopedPrecision(unsigned bits) : saved_(precision_bits()) {
  set_precision_bits(bits);
}

ScopedPrecision::~ScopedPrecision() { set_precision_bits(saved_); }

Real HalfInteger::to_real() const { return Real(twice_) / 2; }

std::string to_string(HalfInteger h) {
  if (h.is_integer()) return std::to_string(h.as_int());
  return std::to_string(h.twice()) + "/2";
}

Integer factorial(int n) {
  if (n < 0) throw DomainError("factorial of negative number");
  Integer r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

Integer binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Integer r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

Real to_real(const Rational& q) { return Real(q); }
Real to_real(const Integer& z) { return Real(z); }

Real real_pi() { return boost::math::constants::pi<Real>(); }

Real gamma_half(HalfInteger x) {
  if (x.twice() <= 0) throw DomainError("gamma_half needs a positive argument");
  if (x.is_integer()) return to_real(factorial(x.as_int() - 1));
  // Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
  const int k = (x.twice() - 1) / 2;
  Real num = to_real(factorial(2 * k));
  Real den = to_real(Integer(mp::pow(Integer(4), k)) * factorial(k));
  return num / den * sqrt(real_pi());
}

Real rgamma_half(HalfInteger x) {
  if (x.twice() > 0) return 1 / gamma_half(x);
  if (x.is_integer()) return Real(0);
  // 1/Gamma(x) = x (x+1) ... (x+m-1) / Gamma(x+m)
  Real acc = 1;
  HalfInteger y = x;
  while (y.twice() < 0) {
    acc *= y.to_real();
    y = y + 1;
  }
  return acc / gamma_half(y);
}

double rgamma(double x) {
  if (x <= 0 && x == std::floor(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

Rational inverse_power(int n, int s) {
  if (s < 0) throw DomainError("inverse_power needs s >= 0");
  return Rational(Integer(1), Integer(mp::pow(Integer(n), static_cast<unsigned>(s))));
}

Real inverse_power(int n, HalfInteger s) {
  if (s.is_integer() && s.as_int() >= 0) return to_real(inverse_power(n, s.as_int()));
  return pow(Real(n), -s.to_real());
}

const Rational& ExactCoefficient::exact() const {
  if (!is_exact()) throw DomainError("coefficient is not exact");
  return std::get<Rational>(value_);
}

Real ExactCoefficient::value() const {
  if (is_exact()) return to_real(std::get<Rational>(value_));
  return std::get<Real>(value_);
}

Real relative_difference(const Real& a, const Real& b) {
  Real scale = std::max(abs(a), abs(b));
  if (scale == 0) return Real(0);
  return abs(a - b) / scale;
}

std::string format_number(const Real& x, int digits) {
  if (isnan(x)) return "nan";
  if (isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) return "0";
  return x.str(digits);
}

std::string format_number(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_number(Real(x), digits);
}

}  // namespace mbdos
