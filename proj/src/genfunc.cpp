#include "mbdos/genfunc.hpp"

#include <cmath>
#include <limits>

namespace mbdos {

TruncatedSeries<Rational> polylog_series_exact(int s, int order) {
  if (order < 1) throw DomainError("polylog series order must be >= 1");
  if (s < 0) throw DomainError("exact polylog series needs s >= 0");
  TruncatedSeries<Rational> li(order);
  for (int n = 1; n <= order; ++n) li[n] = inverse_power(n, s);
  return li;
}

TruncatedSeries<Real> polylog_series(HalfInteger s, int order) {
  if (order < 1) throw DomainError("polylog series order must be >= 1");
  TruncatedSeries<Real> li(order);
  for (int n = 1; n <= order; ++n) li[n] = inverse_power(n, s);
  return li;
}

TruncatedSeries<Real> polylog_series(const Real& s, int order) {
  if (order < 1) throw DomainError("polylog series order must be >= 1");
  TruncatedSeries<Real> li(order);
  for (int n = 1; n <= order; ++n) li[n] = pow(Real(n), -s);
  return li;
}

ExactCoefficient coeff_via_genfunc(int n, int l, int l_volume, int dimension) {
  if (dimension < 1) throw DomainError("dimension must be positive");
  if (l_volume < 0 || l_volume > l) throw DomainError("need 0 <= l_V <= l");
  check_particle_count(n);
  if (l > n || l < 1) return Rational(0);
  const HalfInteger mu = volume_exponent(dimension);
  const HalfInteger nu = surface_exponent(dimension);
  if (confined_coeff_is_exact(l, l_volume, dimension)) {
    const int s = (l_volume == l ? mu : nu).as_int();
    return polylog_series_exact(s, n).pow(l)[n];
  }
  auto a = polylog_series(mu, n).pow(l_volume);
  auto b = polylog_series(nu, n).pow(l - l_volume);
  Real c = 0;
  for (int j = 0; j <= n; ++j) c += a[j] * b[n - j];
  return c;
}

namespace {

template <class T>
std::vector<TruncatedSeries<T>> power_table(const TruncatedSeries<T>& base, int max_power) {
  std::vector<TruncatedSeries<T>> p;
  p.reserve(max_power + 1);
  p.push_back(TruncatedSeries<T>::one(base.order()));
  for (int k = 1; k <= max_power; ++k) p.push_back(p.back() * base);
  return p;
}

}  // namespace

CoefficientTable genfunc_coefficient_table(int n, int dimension) {
  CoefficientTable table(n, dimension);
  const HalfInteger mu = volume_exponent(dimension);
  const HalfInteger nu = surface_exponent(dimension);
  const auto pa = power_table(polylog_series(mu, n), n);
  const auto pb = power_table(polylog_series(nu, n), n);
  const HalfInteger exact_exp = dimension % 2 == 0 ? mu : nu;
  const auto pq = power_table(polylog_series_exact(exact_exp.as_int(), n), n);
  for (int l = 1; l <= n; ++l) {
    for (int lv = 0; lv <= l; ++lv) {
      if (confined_coeff_is_exact(l, lv, dimension)) {
        table.at(l, lv) = pq[l][n];
        continue;
      }
      Real c = 0;
      for (int j = 0; j <= n; ++j) c += pa[lv][j] * pb[l - lv][n - j];
      table.at(l, lv) = c;
    }
  }
  return table;
}

namespace {

Real machine_epsilon() { return std::numeric_limits<Real>::epsilon(); }

// Dirichlet eta function by the Cohen-Villegas-Zagier acceleration.
Real dirichlet_eta(const Real& s) {
  const int n = static_cast<int>(precision_bits() * 0.53) + 10;
  Real d = pow(3 + sqrt(Real(8)), n);
  d = (d + 1 / d) / 2;
  Real b = -1;
  Real c = -d;
  Real sum = 0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    sum += c * pow(Real(k + 1), -s);
    b = Real(k + n) * Real(k - n) * b / ((Real(k) + Real(1) / 2) * (k + 1));
  }
  return sum / d;
}

}  // namespace

Real polylog(const Real& s, const Real& x) {
  if (x == -1) return -dirichlet_eta(s);
  if (abs(x) >= 1) throw DomainError("polylog series needs |x| < 1");
  const Real eps = machine_epsilon();
  Real sum = 0;
  Real xp = 1;
  constexpr int kMaxTerms = 5'000'000;
  for (int k = 1; k <= kMaxTerms; ++k) {
    xp *= x;
    Real term = xp * pow(Real(k), -s);
    sum += term;
    // Tail is bounded by |term| |x| / (1 - |x|) for s >= 0.
    if (abs(term) * abs(x) <= eps * abs(sum) * (1 - abs(x))) return sum;
  }
  throw NumericError("polylog series did not converge");
}

Real grand_canonical_log(const Real& z, const Real& beta, int dimension,
                         const Real& gamma, Statistics stat) {
  if (beta <= 0) throw DomainError("beta must be positive");
  if (z <= 0) throw DomainError("fugacity must be positive");
  const Real mu = volume_exponent(dimension).to_real();
  const Real nu = surface_exponent(dimension).to_real();
  const Real x = 1 / beta;
  const Real xv = pow(x, Real(dimension) / 2);
  const Real xs = pow(x, Real(dimension - 1) / 2);
  if (stat == Statistics::boson) {
    if (z >= 1) throw DomainError("bosonic fugacity must be < 1");
    return xv * polylog(mu, z) + gamma * xs * polylog(nu, z);
  }
  if (z <= 1) return -xv * polylog(mu, -z) - gamma * xs * polylog(nu, -z);
  const Real alpha = log(z);
  const Real pi2_6 = real_pi() * real_pi() / 6;
  auto minus_li = [&](const Real& s) {
    return pow(alpha, s) / tgamma(s + 1) + pi2_6 * pow(alpha, s - 2) / tgamma(s - 1);
  };
  return xv * minus_li(mu) + gamma * xs * minus_li(nu);
}

std::vector<std::vector<Real>> grand_potential_canonical_coefficients(
    int n, int dimension, Statistics stat) {
  check_particle_count(n);
  const int s = statistics_sign(stat);
  const HalfInteger mu = volume_exponent(dimension);
  const HalfInteger nu = surface_exponent(dimension);
  std::vector<Real> a(n + 1), b(n + 1);
  for (int j = 1; j <= n; ++j) {
    const int sign = (s == 1 || j % 2 == 1) ? 1 : -1;  // s^(j+1)
    a[j] = sign * inverse_power(j, mu);
    b[j] = sign * inverse_power(j, nu);
  }
  using Poly = std::vector<std::vector<Real>>;
  auto zero_poly = [&] { return Poly(n + 1, std::vector<Real>(n + 1, Real(0))); };
  std::vector<Poly> f(n + 1, zero_poly());
  f[0][0][0] = 1;
  for (int k = 1; k <= n; ++k) {
    Poly acc = zero_poly();
    for (int j = 1; j <= k; ++j) {
      const Poly& prev = f[k - j];
      for (int u = 0; u < n; ++u)
        for (int v = 0; u + v < n; ++v) {
          if (prev[u][v] == 0) continue;
          acc[u + 1][v] += j * a[j] * prev[u][v];
          acc[u][v + 1] += j * b[j] * prev[u][v];
        }
    }
    for (auto& row : acc)
      for (auto& x : row) x /= k;
    f[k] = std::move(acc);
  }
  return f[n];
}

Real bessel_i1(const Real& x) {
  const Real h = x / 2;
  const Real h2 = h * h;
  const Real eps = machine_epsilon();
  Real term = h;
  Real sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= h2 / (Real(k) * (k + 1));
    sum += term;
    if (abs(term) <= eps * abs(sum)) return sum;
  }
  throw NumericError("Bessel I1 series did not converge");
}

Real d2_unconfined_genfunc_closed_form(const Real& z, const Real& energy, Statistics stat) {
  if (energy <= 0) return Real(0);
  const int s = statistics_sign(stat);
  const Real x = s * polylog(Real(2), s * z);
  if (x <= 0) throw DomainError("closed form needs s Li_2(s z) > 0");
  return sqrt(x / energy) * bessel_i1(2 * sqrt(x * energy));
}

SaddlePoint solve_saddle(int n, double energy, int dimension) {
  if (n < 1) throw DomainError("need N >= 1");
  if (dimension < 1) throw DomainError("dimension must be positive");
  const double nu = dimension / 2.0;
  const double c = M_PI * M_PI / 6.0;
  const double e_fermi = std::pow(std::tgamma(nu + 1) * n, 1 / nu);
  const double e_gs = nu * std::pow(e_fermi, nu + 1) / std::tgamma(nu + 2);
  const double q = energy - e_gs;
  if (!(q > 0)) throw DomainError("saddle point needs E > E_GS");

  const double g_nu1 = rgamma(nu + 1), g_nu2 = rgamma(nu + 2), g_nu = rgamma(nu);
  const double g_num1 = rgamma(nu - 1), g_num2 = rgamma(nu - 2);
  auto residual = [&](double mu, double t, double& r1, double& r2) {
    r1 = std::pow(mu, nu) * g_nu1 + c * t * std::pow(mu, nu - 2) * g_num1 - n;
    r2 = nu * std::pow(mu, nu + 1) * g_nu2 + c * t * nu * std::pow(mu, nu - 1) * g_nu - energy;
  };

  double mu = e_fermi;
  const double rho = std::pow(e_fermi, nu - 1) * g_nu;
  double beta0 = M_PI * std::sqrt(rho / (6 * q));
  double t = 1 / (beta0 * beta0);
  double r1, r2;
  residual(mu, t, r1, r2);
  auto norm = [&](double a, double b) { return std::hypot(a / n, b / energy); };
  int it = 0;
  for (; it < 200 && norm(r1, r2) > 1e-15; ++it) {
    const double j11 = std::pow(mu, nu - 1) * g_nu + c * t * (nu - 2) * std::pow(mu, nu - 3) * g_num1;
    const double j12 = c * std::pow(mu, nu - 2) * g_num1;
    const double j21 = nu * std::pow(mu, nu) * g_nu1 + c * t * nu * (nu - 1) * std::pow(mu, nu - 2) * g_nu;
    const double j22 = c * nu * std::pow(mu, nu - 1) * g_nu;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0 || !std::isfinite(det)) throw NumericError("singular saddle Jacobian");
    const double dmu = -(r1 * j22 - r2 * j12) / det;
    const double dt = -(j11 * r2 - j21 * r1) / det;
    const double before = norm(r1, r2);
    double step = 1;
    for (int halvings = 0;; ++halvings) {
      const double mu_new = mu + step * dmu, t_new = t + step * dt;
      double n1 = 0, n2 = 0;
      if (mu_new > 0 && t_new > 0) {
        residual(mu_new, t_new, n1, n2);
        if (norm(n1, n2) < before || halvings > 40) {
          mu = mu_new;
          t = t_new;
          r1 = n1;
          r2 = n2;
          break;
        }
      }
      if (halvings > 60) throw NumericError("saddle line search failed");
      step /= 2;
    }
  }
  if (norm(r1, r2) > 1e-12) throw NumericError("saddle point did not converge in 200 iterations");

  SaddlePoint sp;
  sp.iterations = it;
  sp.beta = 1 / std::sqrt(t);
  sp.mu_chem = mu;
  sp.alpha = sp.beta * mu;
  const double a = sp.alpha, b = sp.beta;
  const double f = std::pow(a, nu + 1) * g_nu2 + c * std::pow(a, nu - 1) * g_nu;
  const double f1 = std::pow(a, nu) * g_nu1 + c * std::pow(a, nu - 2) * g_num1;
  const double f2 = std::pow(a, nu - 1) * g_nu + c * std::pow(a, nu - 3) * g_num2;
  sp.entropy = b * energy - a * n + std::pow(b, -nu) * f;
  const double s_bb = nu * (nu + 1) * std::pow(b, -nu - 2) * f;
  const double s_aa = std::pow(b, -nu) * f2;
  const double s_ab = -nu * std::pow(b, -nu - 1) * f1;
  sp.hessian_det = std::abs(s_bb * s_aa - s_ab * s_ab);
  sp.density = std::exp(sp.entropy) / (2 * M_PI * std::sqrt(sp.hessian_det));
  return sp;
}

}  // namespace mbdos
