#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <variant>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace mbdos {

namespace mp = boost::multiprecision;

using Integer = mp::mpz_int;
using Rational = mp::mpq_rational;
using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

enum class Statistics { boson, fermion };

// +1 for bosons, -1 for fermions.
int statistics_sign(Statistics s);
std::string to_string(Statistics s);
Statistics parse_statistics(const std::string& name);

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr unsigned kDefaultPrecisionBits = 256;
inline constexpr unsigned kMinPrecisionBits = 53;

// The mpfr default precision is process-global: set it before spawning
// worker threads and leave it alone while they run.
unsigned precision_bits();
void set_precision_bits(unsigned bits);

// Reads MBDOS_PRECISION_BITS, falling back to kDefaultPrecisionBits.
unsigned precision_bits_from_env();

class ScopedPrecision {
 public:
  explicit ScopedPrecision(unsigned bits);
  ~ScopedPrecision();
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned saved_;
};

// A number k/2 with integer k.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;
  constexpr HalfInteger(int n) : twice_(2 * n) {}  // NOLINT implicit
  static constexpr HalfInteger from_twice(int k) {
    HalfInteger h;
    h.twice_ = k;
    return h;
  }

  constexpr int twice() const { return twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  // Only meaningful when is_integer().
  constexpr int as_int() const { return twice_ / 2; }
  double to_double() const { return twice_ / 2.0; }
  Real to_real() const;

  friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) {
    return from_twice(a.twice_ + b.twice_);
  }
  friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) {
    return from_twice(a.twice_ - b.twice_);
  }
  friend constexpr HalfInteger operator*(int k, HalfInteger a) {
    return from_twice(k * a.twice_);
  }
  friend constexpr bool operator==(HalfInteger, HalfInteger) = default;
  friend constexpr auto operator<=>(HalfInteger a, HalfInteger b) {
    return a.twice_ <=> b.twice_;
  }

 private:
  int twice_ = 0;
};

std::string to_string(HalfInteger h);

Integer factorial(int n);
Integer binomial(int n, int k);

Real to_real(const Rational& q);
Real to_real(const Integer& z);
Real real_pi();

// Gamma function at a positive half-integer, exact up to working precision.
Real gamma_half(HalfInteger x);
// 1/Gamma(x) for any half-integer; zero at the poles 0, -1, -2, ...
Real rgamma_half(HalfInteger x);
// 1/Gamma for doubles with the same pole convention.
double rgamma(double x);

// n^(-s) exactly, for integer s >= 0.
Rational inverse_power(int n, int s);
Real inverse_power(int n, HalfInteger s);

// Either an exact rational or a high-precision float.
class ExactCoefficient {
 public:
  ExactCoefficient() : value_(Rational(0)) {}
  ExactCoefficient(Rational q) : value_(std::move(q)) {}  // NOLINT implicit
  ExactCoefficient(Real x) : value_(std::move(x)) {}      // NOLINT implicit

  bool is_exact() const { return std::holds_alternative<Rational>(value_); }
  const Rational& exact() const;
  Real value() const;

 private:
  std::variant<Rational, Real> value_;
};

// |a-b| / max(|a|,|b|), 0 when both vanish.
Real relative_difference(const Real& a, const Real& b);

// %g-style rendering with `digits` significant digits; "inf"/"-inf"/"nan".
std::string format_number(const Real& x, int digits);
std::string format_number(double x, int digits);

}  // namespace mbdos
