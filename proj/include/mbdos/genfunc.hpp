#pragma once

#include <vector>

#include "mbdos/combinatorics.hpp"
#include "mbdos/numeric.hpp"

namespace mbdos {

// Power series in z truncated after z^order.
template <class T>
class TruncatedSeries {
 public:
  explicit TruncatedSeries(int order) : c_(order + 1, T(0)) {
    if (order < 0) throw DomainError("series order must be >= 0");
  }
  explicit TruncatedSeries(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw DomainError("series needs at least one coefficient");
  }

  static TruncatedSeries one(int order) {
    TruncatedSeries s(order);
    s.c_[0] = T(1);
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const T& operator[](int k) const { return c_.at(k); }
  T& operator[](int k) { return c_.at(k); }
  const std::vector<T>& coeffs() const { return c_; }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    const int ord = std::min(a.order(), b.order());
    TruncatedSeries r(ord);
    for (int i = 0; i <= ord; ++i) {
      if (a.c_[i] == 0) continue;
      for (int j = 0; i + j <= ord; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return r;
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    const int ord = std::min(a.order(), b.order());
    TruncatedSeries r(ord);
    for (int i = 0; i <= ord; ++i) r.c_[i] = a.c_[i] + b.c_[i];
    return r;
  }

  friend TruncatedSeries operator*(const T& k, const TruncatedSeries& a) {
    TruncatedSeries r = a;
    for (auto& x : r.c_) x *= k;
    return r;
  }

  TruncatedSeries pow(int k) const {
    if (k < 0) throw DomainError("negative series power");
    TruncatedSeries result = one(order());
    TruncatedSeries base = *this;
    while (k > 0) {
      if (k & 1) result = result * base;
      k >>= 1;
      if (k > 0) base = base * base;
    }
    return result;
  }

  // exp of a series with zero constant term, via k f_k = sum_j j g_j f_{k-j}.
  TruncatedSeries exp() const {
    if (c_[0] != 0) throw DomainError("exp needs a zero constant term");
    TruncatedSeries f = one(order());
    for (int k = 1; k <= order(); ++k) {
      T acc(0);
      for (int j = 1; j <= k; ++j) acc += T(j) * c_[j] * f.c_[k - j];
      f.c_[k] = acc / T(k);
    }
    return f;
  }

  friend bool operator==(const TruncatedSeries&, const TruncatedSeries&) = default;

 private:
  std::vector<T> c_;
};

TruncatedSeries<Rational> polylog_series_exact(int s, int order);
TruncatedSeries<Real> polylog_series(HalfInteger s, int order);
TruncatedSeries<Real> polylog_series(const Real& s, int order);

// [z^N] Li_mu^{l_V} Li_nu^{l-l_V}.
ExactCoefficient coeff_via_genfunc(int n, int l, int l_volume, int dimension);

// All C_{l,l_V} for l <= N from power tables of the two polylogs.
CoefficientTable genfunc_coefficient_table(int n, int dimension);

// Direct series for Li_s(x), |x| < 1.
Real polylog(const Real& s, const Real& x);

// ln Z in units rho0 = 1. Fermions with z >= 1 use the two-term large-alpha
// expansion of -Li_s(-e^alpha).
Real grand_canonical_log(const Real& z, const Real& beta, int dimension,
                         const Real& gamma, Statistics stat);

// F[l_V][l_S] = [z^N] (s Li_mu(s z))^{l_V} (s Li_nu(s z))^{l_S} / (l_V! l_S!),
// s = +-1, read off exp(u A(z) + v B(z)) in bivariate series arithmetic.
std::vector<std::vector<Real>> grand_potential_canonical_coefficients(
    int n, int dimension, Statistics stat);

// sqrt(x/E) I_1(2 sqrt(x E)) with x = s Li_2(s z).
Real d2_unconfined_genfunc_closed_form(const Real& z, const Real& energy, Statistics stat);

Real bessel_i1(const Real& x);

struct SaddlePoint {
  double beta = 0;
  double mu_chem = 0;
  double alpha = 0;
  double entropy = 0;
  double hessian_det = 0;
  double density = 0;
  int iterations = 0;
};

// Fermions, gamma = 0, rho0 = 1.
SaddlePoint solve_saddle(int n, double energy, int dimension);

}  // namespace mbdos
