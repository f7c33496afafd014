#include "mbdos/smooth_dos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mbdos/genfunc.hpp"

namespace mbdos {

double scaling_density(const UnitsContext& units, const BilliardGeometry& geom) {
  if (units.natural) return 1.0;
  if (units.mass <= 0 || units.hbar <= 0) throw DomainError("mass and hbar must be positive");
  if (geom.volume <= 0 || geom.dimension < 1) throw DomainError("invalid geometry");
  return units.mass * std::pow(geom.volume, 2.0 / geom.dimension) /
         (2 * M_PI * units.hbar * units.hbar);
}

double geometry_parameter(const BilliardGeometry& geom) {
  if (geom.volume <= 0 || geom.surface < 0 || geom.dimension < 1)
    throw DomainError("invalid geometry");
  const double sign = geom.bc == BoundaryCondition::neumann ? 1.0 : -1.0;
  const double d = geom.dimension;
  return sign * geom.surface / (4 * std::pow(geom.volume, (d - 1) / d));
}

DosExpansion::DosExpansion(int n, int dimension, Statistics stat, Real gamma,
                           std::vector<PowerTerm> terms, Real delta_coeff)
    : n_(n), dimension_(dimension), stat_(stat), gamma_(std::move(gamma)),
      terms_(std::move(terms)), delta_(std::move(delta_coeff)) {
  std::sort(terms_.begin(), terms_.end(),
            [](const PowerTerm& a, const PowerTerm& b) { return a.lambda < b.lambda; });
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].lambda.twice() <= 0) throw DomainError("term exponent must be positive");
    if (i > 0 && terms_[i].lambda == terms_[i - 1].lambda)
      throw DomainError("duplicate term exponent");
  }
}

const PowerTerm* DosExpansion::term(HalfInteger lambda) const {
  for (const auto& t : terms_)
    if (t.lambda == lambda) return &t;
  return nullptr;
}

namespace {

Real power(const Real& e, HalfInteger exponent) {
  if (exponent.is_integer()) return pow(e, exponent.as_int());
  return pow(e, exponent.to_real());
}

}  // namespace

Real DosExpansion::density(const Real& e) const {
  if (e < 0) return Real(0);
  if (e == 0) {
    if (delta_ != 0) return std::numeric_limits<Real>::infinity();
    Real value = 0;
    for (const auto& t : terms_) {
      if (t.coefficient == 0) continue;
      if (t.lambda.twice() < 2) return std::numeric_limits<Real>::infinity();
      if (t.lambda == HalfInteger(1)) value += t.coefficient;
    }
    return value;
  }
  Real sum = 0;
  for (const auto& t : terms_) sum += t.coefficient * power(e, t.lambda - 1);
  return sum;
}

Real DosExpansion::counting(const Real& e) const { return repeated_integral(1, e); }

Real DosExpansion::repeated_integral(int order, const Real& e) const {
  if (order < 1) throw DomainError("integral order must be >= 1");
  if (e <= 0) return Real(0);
  Real sum = 0;
  for (const auto& t : terms_) {
    // Gamma(lambda)/Gamma(lambda+order)
    Real ratio = 1;
    for (int k = 0; k < order; ++k) ratio /= (t.lambda + k).to_real();
    sum += t.coefficient * ratio * power(e, t.lambda + (order - 1));
  }
  if (delta_ != 0) sum += delta_ * pow(e, order - 1) / to_real(factorial(order - 1));
  return sum;
}

namespace {

DosExpansion assemble(int n, int dimension, Statistics stat, const Real& gamma,
                      const DosOptions& options) {
  if (dimension < 1) throw DomainError("dimension must be positive");
  const CoefficientTable table = genfunc_coefficient_table(n, dimension);
  const int s = statistics_sign(stat);
  const bool exact = gamma == 0 && dimension % 2 == 0;

  std::map<HalfInteger, Real> coeff;
  std::map<HalfInteger, Rational> exact_coeff;
  Real delta = 0;
  for (int l = 1; l <= n; ++l) {
    if (std::find(options.omit_cluster_counts.begin(), options.omit_cluster_counts.end(), l) !=
        options.omit_cluster_counts.end())
      continue;
    const int sign = (s == 1 || (n - l) % 2 == 0) ? 1 : -1;
    for (int lv = 0; lv <= l; ++lv) {
      const int ls = l - lv;
      if (ls > 0 && gamma == 0) continue;
      const HalfInteger lambda = HalfInteger::from_twice(lv * dimension + ls * (dimension - 1));
      const ExactCoefficient& c = table.at(l, lv);
      Real w = sign * c.value() * pow(gamma, ls) /
               to_real(Integer(factorial(lv) * factorial(ls)));
      if (lambda.twice() == 0) {
        delta += w;
        continue;
      }
      coeff[lambda] += w * rgamma_half(lambda);
      if (exact)
        exact_coeff[lambda] += sign * c.exact() /
                               Rational(factorial(lv) * factorial(lambda.as_int() - 1));
    }
  }
  std::vector<PowerTerm> terms;
  for (auto& [lambda, c] : coeff) {
    PowerTerm t{lambda, c, std::nullopt};
    if (exact) t.exact = exact_coeff[lambda];
    terms.push_back(std::move(t));
  }
  return DosExpansion(n, dimension, stat, gamma, std::move(terms), delta);
}

}  // namespace

DosExpansion build_unconfined_dos(int n, int dimension, Statistics stat,
                                  const DosOptions& options) {
  return assemble(n, dimension, stat, Real(0), options);
}

DosExpansion build_confined_dos(int n, int dimension, Statistics stat, const Real& gamma,
                                const DosOptions& options) {
  return assemble(n, dimension, stat, gamma, options);
}

std::string to_string(GroundStateProvenance p) {
  switch (p) {
    case GroundStateProvenance::unconfined: return "unconfined";
    case GroundStateProvenance::perimeter: return "perimeter";
    case GroundStateProvenance::perimeter_curvature: return "perimeter+curvature";
  }
  return "unknown";
}

double single_particle_counting(double e, int dimension, double gamma, double chi) {
  if (e <= 0) return 0.0;
  const double nu = dimension / 2.0;
  double c = std::pow(e, nu) / std::tgamma(nu + 1) +
             gamma * std::pow(e, nu - 0.5) / std::tgamma(nu + 0.5);
  if (dimension == 2) c += chi / 6.0;
  return c;
}

double single_particle_density(double e, int dimension, double gamma) {
  if (e <= 0) return 0.0;
  const double nu = dimension / 2.0;
  return std::pow(e, nu - 1) * rgamma(nu) + gamma * std::pow(e, nu - 1.5) * rgamma(nu - 0.5);
}

namespace {

struct FermiSolve {
  double e_fermi;
  bool warning;
};

FermiSolve solve_fermi(double n, int dimension, double gamma, double chi) {
  if (dimension < 1) throw DomainError("dimension must be positive");
  if (!(n > 0)) throw DomainError("particle number must be positive");
  if (chi != 0 && dimension != 2) throw DomainError("curvature term only defined for D = 2");
  const double nu = dimension / 2.0;
  auto f = [&](double e) { return single_particle_counting(e, dimension, gamma, chi) - n; };

  double lo = 0;
  bool warning = false;
  if (gamma < 0 && dimension >= 2) {
    // Below this energy the smooth single-particle density is negative.
    const double r = -gamma * std::tgamma(nu) / std::tgamma(nu - 0.5);
    lo = r * r;
    warning = true;
  }
  double hi = std::max(1.0, 2 * std::pow(std::tgamma(nu + 1) * n, 1 / nu)) * 4;
  hi = std::max(hi, 2 * lo);
  for (int k = 0; f(hi) < 0; ++k) {
    if (k > 200) throw NumericError("no bracket for the Fermi energy");
    hi *= 2;
  }
  const double f_lo = lo > 0 ? f(lo) : f(std::numeric_limits<double>::min());
  if (f_lo > 0) throw NumericError("no real Fermi energy on the increasing branch");

  for (int k = 0; k < 200 && (hi - lo) > 1e-10 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  double e = 0.5 * (lo + hi);
  for (int k = 0; k < 20; ++k) {
    const double rho = single_particle_density(e, dimension, gamma);
    if (!(rho > 0)) break;
    const double next = e - f(e) / rho;
    if (!(next >= lo && next <= hi)) break;
    if (next == e) break;
    e = next;
  }
  return {e, warning};
}

double gs_from_fermi(double e_fermi, int dimension, double gamma) {
  const double nu = dimension / 2.0;
  return nu * std::pow(e_fermi, nu + 1) / std::tgamma(nu + 2) +
         gamma * (nu - 0.5) * std::pow(e_fermi, nu + 0.5) / std::tgamma(nu + 1.5);
}

}  // namespace

double fermi_energy(double n, int dimension, double gamma, double chi) {
  if (gamma == 0 && chi == 0) {
    if (dimension < 1) throw DomainError("dimension must be positive");
    if (!(n > 0)) throw DomainError("particle number must be positive");
    const double nu = dimension / 2.0;
    return std::pow(std::tgamma(nu + 1) * n, 1 / nu);
  }
  return solve_fermi(n, dimension, gamma, chi).e_fermi;
}

GroundStateResult gs_energy_smooth(double n, int dimension, double gamma, int chi) {
  GroundStateResult r;
  if (chi != 0) {
    if (dimension != 2) throw DomainError("curvature term only defined for D = 2");
    r = gs_energy_smooth(n - chi / 6.0, dimension, gamma, 0);
    r.provenance = GroundStateProvenance::perimeter_curvature;
    return r;
  }
  if (gamma == 0) {
    const double nu = dimension / 2.0;
    r.fermi_energy = fermi_energy(n, dimension, 0);
    r.gs_energy = nu * std::pow(std::tgamma(nu + 1) * n, 1 + 1 / nu) / std::tgamma(nu + 2);
    r.provenance = GroundStateProvenance::unconfined;
    return r;
  }
  const FermiSolve fs = solve_fermi(n, dimension, gamma, 0);
  r.fermi_energy = fs.e_fermi;
  r.gs_energy = gs_from_fermi(fs.e_fermi, dimension, gamma);
  r.provenance = GroundStateProvenance::perimeter;
  r.negative_density_warning = fs.warning;
  return r;
}

double gs_energy_perimeter_closed(double n, double gamma) {
  if (!(n > 0)) throw DomainError("particle number must be positive");
  const double a = gamma * gamma / (M_PI * n);
  const double sg = gamma < 0 ? -1.0 : 1.0;
  const double x = std::sqrt(1 + a) - sg * std::sqrt(a);
  return 0.5 * n * n * x * x * x * (x + sg * 4.0 / 3.0 * std::sqrt(a));
}

double gs_shift_curvature(double n, double gamma, int chi) {
  if (chi == 0) return 0.0;
  return gs_energy_smooth(n - chi / 6.0, 2, gamma, 0).gs_energy -
         gs_energy_smooth(n, 2, gamma, 0).gs_energy;
}

double bethe_density(double n, double q, double rho_fermi) {
  (void)n;
  if (!(q > 0)) throw DomainError("Bethe density needs Q > 0");
  if (!(rho_fermi > 0)) throw DomainError("Bethe density needs a positive density");
  return std::exp(std::sqrt(2 * M_PI * M_PI / 3 * rho_fermi * q)) / (std::sqrt(48.0) * q);
}

double erdos_lehner_density(double n, double q, double rho_fermi) {
  const double bethe = bethe_density(n, q, rho_fermi);
  const double root = std::sqrt(6 * rho_fermi * q);
  return bethe * std::exp((0.5 - root / M_PI) * std::exp(-M_PI * n / root));
}

}  // namespace mbdos
