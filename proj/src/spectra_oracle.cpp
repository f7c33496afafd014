#include "mbdos/spectra_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mbdos/combinatorics.hpp"
#include "mbdos/kernels.hpp"

namespace mbdos {

SpectrumList::SpectrumList(std::string model, double cutoff, std::vector<SpectrumEntry> entries,
                           double merge_tolerance)
    : model_(std::move(model)), cutoff_(cutoff), tolerance_(merge_tolerance) {
  if (merge_tolerance < 0) throw DomainError("merge tolerance must be >= 0");
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.energy < b.energy; });
  for (auto& e : entries) {
    if (!std::isfinite(e.energy)) throw DomainError("spectrum energies must be finite");
    if (!entries_.empty() && e.energy - entries_.back().energy <= tolerance_)
      entries_.back().weight += e.weight;
    else
      entries_.push_back(std::move(e));
  }
}

Rational SpectrumList::total_weight() const {
  Rational t = 0;
  for (const auto& e : entries_) t += e.weight;
  return t;
}

SpectrumList SpectrumList::without_zero_weights() const {
  SpectrumList s = *this;
  std::erase_if(s.entries_, [](const SpectrumEntry& e) { return e.weight == 0; });
  return s;
}

namespace {

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError("bad number '" + item + "' in model spec");
    }
    if (used != item.size()) throw DomainError("bad number '" + item + "' in model spec");
    out.push_back(v);
  }
  return out;
}

}  // namespace

SpectrumModel parse_model(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("model spec needs kind:params");
  const std::string kind = text.substr(0, colon);
  const std::vector<double> p = parse_numbers(text.substr(colon + 1));
  auto need = [&](std::size_t k) {
    if (p.size() != k) throw DomainError("model '" + kind + "' takes " + std::to_string(k) + " parameter(s)");
    for (double x : p)
      if (!(x > 0)) throw DomainError("model parameters must be positive");
  };
  SpectrumModel m;
  if (kind == "equidistant") {
    need(1);
    m.kind = Equidistant{p[0]};
  } else if (kind == "box1d") {
    need(1);
    m.kind = Box1d{p[0]};
  } else if (kind == "rectangle") {
    need(2);
    m.kind = Rectangle{p[0], p[1]};
  } else if (kind == "cylinder") {
    need(2);
    m.kind = Cylinder{p[0], p[1]};
  } else {
    throw DomainError("unknown model kind '" + kind + "'");
  }
  return m;
}

std::string model_name(const SpectrumModel& model) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Equidistant>) os << "equidistant:" << k.spacing;
        if constexpr (std::is_same_v<K, Box1d>) os << "box1d:" << k.length;
        if constexpr (std::is_same_v<K, Rectangle>) os << "rectangle:" << k.lx << "," << k.ly;
        if constexpr (std::is_same_v<K, Cylinder>) os << "cylinder:" << k.circumference << "," << k.height;
      },
      model.kind);
  return os.str();
}

double energy_quantum(const SpectrumModel& model) {
  const double h = model.hbar * model.hbar / (2 * model.mass);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Equidistant>) return k.spacing;
        if constexpr (std::is_same_v<K, Box1d>) return h * M_PI * M_PI / (k.length * k.length);
        if constexpr (std::is_same_v<K, Rectangle>)
          return h * M_PI * M_PI / std::max(k.lx * k.lx, k.ly * k.ly);
        if constexpr (std::is_same_v<K, Cylinder>) {
          const double a = 2 * M_PI / k.circumference, b = M_PI / k.height;
          return h * std::min(a * a, b * b);
        }
      },
      model.kind);
}

BilliardGeometry model_geometry(const SpectrumModel& model) {
  return std::visit(
      [&](const auto& k) -> BilliardGeometry {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Equidistant>) {
          throw DomainError("the equidistant model has no billiard geometry");
        } else if constexpr (std::is_same_v<K, Box1d>) {
          return {1, k.length, 2, BoundaryCondition::dirichlet, 0};
        } else if constexpr (std::is_same_v<K, Rectangle>) {
          return {2, k.lx * k.ly, 2 * (k.lx + k.ly), BoundaryCondition::dirichlet, 0};
        } else {
          return {2, k.circumference * k.height, 2 * k.circumference, BoundaryCondition::dirichlet, 0};
        }
      },
      model.kind);
}

SpectrumList single_particle_levels(const SpectrumModel& model, double e_max) {
  if (!(e_max > 0)) throw DomainError("E_max must be positive");
  if (model.mass <= 0 || model.hbar <= 0) throw DomainError("mass and hbar must be positive");
  const double h = model.hbar * model.hbar / (2 * model.mass);
  const double quantum = energy_quantum(model);
  const double slack = e_max * 1e-12;
  std::vector<SpectrumEntry> out;
  auto add = [&](double e, int g) {
    if (e <= e_max + slack) out.push_back({e, Rational(g)});
  };
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Equidistant>) {
          for (long n = 0; n * k.spacing <= e_max + slack; ++n) add(n * k.spacing, 1);
        } else if constexpr (std::is_same_v<K, Box1d>) {
          const double e1 = h * M_PI * M_PI / (k.length * k.length);
          for (long n = 1; n * n * e1 <= e_max + slack; ++n) add(n * n * e1, 1);
        } else if constexpr (std::is_same_v<K, Rectangle>) {
          const double ex = h * M_PI * M_PI / (k.lx * k.lx), ey = h * M_PI * M_PI / (k.ly * k.ly);
          for (long n = 1; n * n * ex + ey <= e_max + slack; ++n)
            for (long m = 1; n * n * ex + m * m * ey <= e_max + slack; ++m)
              add(n * n * ex + m * m * ey, 1);
        } else {
          const double a = 2 * M_PI / k.circumference, b = M_PI / k.height;
          const double ej = h * a * a, ek = h * b * b;
          for (long j = 0; j * j * ej + ek <= e_max + slack; ++j)
            for (long m = 1; j * j * ej + m * m * ek <= e_max + slack; ++m)
              add(j * j * ej + m * m * ek, j == 0 ? 1 : 2);
        }
      },
      model.kind);
  return SpectrumList(model_name(model), e_max, std::move(out), 1e-9 * quantum);
}

double filled_energy(const SpectrumList& levels, int k, Statistics stat) {
  if (k <= 0) return 0.0;
  const auto& es = levels.entries();
  if (stat == Statistics::boson)
    return es.empty() ? k * levels.cutoff() : k * std::min(es.front().energy, levels.cutoff());
  double sum = 0;
  int left = k;
  for (const auto& e : es) {
    if (left == 0) break;
    const long g = static_cast<long>(mp::numerator(e.weight).convert_to<long long>());
    const int take = static_cast<int>(std::min<long>(g, left));
    sum += take * e.energy;
    left -= take;
  }
  // Orbitals beyond the list lie above its cutoff.
  return sum + left * levels.cutoff();
}

void check_cutoff(const SpectrumList& levels, int n, Statistics stat, double e_max) {
  const double need = e_max - filled_energy(levels, n - 1, stat);
  if (levels.cutoff() < need - levels.merge_tolerance()) {
    std::ostringstream os;
    os.precision(12);
    os << "single-particle cutoff " << levels.cutoff() << " too small: configurations up to "
       << e_max << " need levels up to " << need;
    throw DomainError(os.str());
  }
}

SpectrumList manybody_exact_spectrum(const SpectrumList& levels, int n, Statistics stat,
                                     double e_max) {
  check_cutoff(levels, n, stat, e_max);
  return kernels::parallel::manybody_spectrum(levels, n, stat, e_max);
}

SpectrumList weidenmuller_discrete_dos(const SpectrumList& levels, int n, Statistics stat,
                                       double e_max) {
  check_cutoff(levels, n, Statistics::boson, e_max);
  return kernels::parallel::weidenmuller(levels, n, stat, e_max);
}

double cauchy_kernel(double alpha, double x) {
  if (!(alpha > 0)) throw DomainError("Cauchy width must be positive");
  return alpha / (M_PI * (alpha * alpha + x * x));
}

double cauchy_smooth(const SpectrumList& spectrum, double alpha, double e) {
  double sum = 0;
  for (const auto& s : spectrum.entries())
    sum += s.weight.convert_to<double>() * cauchy_kernel(alpha, e - s.energy);
  return sum;
}

double cauchy_convolution(double alpha, double beta, double x) {
  using boost::math::quadrature::gauss_kronrod;
  // y = beta tan(theta) turns delta_beta(y) dy into dtheta / pi.
  auto f = [&](double theta) { return cauchy_kernel(alpha, x - beta * std::tan(theta)) / M_PI; };
  const double mid = std::atan(x / beta);
  const double half = M_PI / 2;
  return gauss_kronrod<double, 61>::integrate(f, -half, mid, 15, 1e-10) +
         gauss_kronrod<double, 61>::integrate(f, mid, half, 15, 1e-10);
}

namespace {

struct SmoothedLevels {
  std::vector<double> energies;
  std::vector<double> weights;
  double alpha;
};

// rho_alpha(E / k)
double scaled_smooth(const SmoothedLevels& s, int k, double e) {
  double sum = 0;
  for (std::size_t i = 0; i < s.energies.size(); ++i)
    sum += s.weights[i] * cauchy_kernel(s.alpha, e / k - s.energies[i]);
  return sum;
}

std::vector<double> peak_sums(const SmoothedLevels& s, std::span<const int> parts) {
  std::vector<double> sums{0.0};
  for (int k : parts) {
    std::vector<double> next;
    for (double base : sums)
      for (double e : s.energies) next.push_back(base + k * e);
    sums = std::move(next);
  }
  return sums;
}

// Integral over the real line of f, which decays like a Lorentzian. The
// substitution x = c + w tan(t) maps the line to (-pi/2, pi/2); the breaks
// (peak positions) split the t range.
double integrate_line(const std::function<double(double)>& f, std::vector<double> breaks,
                      double width) {
  using boost::math::quadrature::gauss_kronrod;
  std::sort(breaks.begin(), breaks.end());
  const double c = 0.5 * (breaks.front() + breaks.back());
  std::vector<double> ts{-M_PI / 2};
  for (double b : breaks) ts.push_back(std::atan((b - c) / width));
  ts.push_back(M_PI / 2);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  auto g = [&](double t) {
    const double ct = std::cos(t);
    if (ct <= 0) return 0.0;
    return f(c + width * std::tan(t)) * width / (ct * ct);
  };
  double total = 0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    total += gauss_kronrod<double, 21>::integrate(g, ts[i], ts[i + 1], 8, 1e-9);
  return total;
}

// (f_{k1} * f_{k2} * ...)(e), f_k(E) = rho_alpha(E / k)
double convolve_scaled(const SmoothedLevels& s, std::span<const int> parts, double e) {
  if (parts.size() == 1) return scaled_smooth(s, parts[0], e);
  const int k = parts[0];
  const auto rest = parts.subspan(1);
  std::vector<double> breaks;
  for (double x : s.energies) breaks.push_back(k * x);
  for (double x : peak_sums(s, rest)) breaks.push_back(e - x);
  auto integrand = [&](double x) { return scaled_smooth(s, k, x) * convolve_scaled(s, rest, e - x); };
  return integrate_line(integrand, breaks, k * s.alpha);
}

}  // namespace

double weidenmuller_smoothed_density(const SpectrumList& levels, int n, Statistics stat,
                                     double alpha, double e) {
  if (n < 1 || n > 3) throw DomainError("numerical Weidenmuller smoothing supports N <= 3");
  SmoothedLevels s{{}, {}, alpha};
  for (const auto& l : levels.entries()) {
    s.energies.push_back(l.energy);
    s.weights.push_back(l.weight.convert_to<double>());
  }
  const int sign = statistics_sign(stat);
  double total = 0;
  for (const auto& p : enumerate_partitions(n)) {
    Rational pref(cycle_count_factor(p), factorial(n));
    for (int k : p.parts()) pref /= k;
    if (sign < 0 && (n - p.length()) % 2 == 1) pref = -pref;
    total += pref.convert_to<double>() * convolve_scaled(s, p.parts(), e);
  }
  return total;
}

Rational staircase(const SpectrumList& spectrum, double e) {
  Rational sum = 0;
  for (const auto& s : spectrum.entries()) {
    if (s.energy > e) break;
    sum += s.weight;
  }
  return sum;
}

Integer restricted_partition_count(int n, int max_part) {
  if (n < 0) throw DomainError("need n >= 0");
  if (max_part < 1) throw DomainError("need a maximal part >= 1");
  std::vector<Integer> p(n + 1, Integer(0));
  p[0] = 1;
  for (int part = 1; part <= std::min(max_part, std::max(n, 1)); ++part)
    for (int k = part; k <= n; ++k) p[k] += p[k - part];
  return p[n];
}

CycleGaussianReport verify_cycle_gaussian(int n) {
  if (n < 2 || n > 15) throw DomainError("verify_cycle_gaussian needs 2 <= n <= 15");
  const int m = n - 1;
  using Matrix = std::vector<std::vector<Rational>>;
  Matrix a(m, std::vector<Rational>(m, Rational(0)));
  for (int i = 0; i < m; ++i) {
    a[i][i] = -4;
    if (i + 1 < m) a[i][i + 1] = a[i + 1][i] = 2;
  }
  Matrix inv(m, std::vector<Rational>(m, Rational(0)));
  for (int i = 0; i < m; ++i) inv[i][i] = 1;

  // Gauss-Jordan with exact pivots.
  Rational det = 1;
  Matrix w = a;
  for (int c = 0; c < m; ++c) {
    int piv = c;
    while (piv < m && w[piv][c] == 0) ++piv;
    if (piv == m) throw OracleMismatch("cycle matrix is singular");
    if (piv != c) {
      std::swap(w[piv], w[c]);
      std::swap(inv[piv], inv[c]);
      det = -det;
    }
    const Rational p = w[c][c];
    det *= p;
    for (int j = 0; j < m; ++j) {
      w[c][j] /= p;
      inv[c][j] /= p;
    }
    for (int r = 0; r < m; ++r) {
      if (r == c || w[r][c] == 0) continue;
      const Rational f = w[r][c];
      for (int j = 0; j < m; ++j) {
        w[r][j] -= f * w[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }

  CycleGaussianReport rep;
  rep.n = n;
  rep.determinant = det;
  rep.expected_determinant = Rational(n) * Rational(Integer(mp::pow(Integer(-2), m)));
  if (rep.determinant != rep.expected_determinant)
    throw OracleMismatch("cycle matrix determinant mismatch at n=" + std::to_string(n));

  rep.inverse_matches = true;
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) {
      const int hi = std::max(i, j), lo = std::min(i, j);
      const Rational closed = Rational(-lo, 2) * (Rational(1) - Rational(hi, n));
      if (inv[i - 1][j - 1] != closed) rep.inverse_matches = false;
    }
  if (!rep.inverse_matches)
    throw OracleMismatch("closed-form inverse mismatch at n=" + std::to_string(n));

  // b = -2 q_1 (e_1 + e_{n-1}); both hit index 1 when n = 2.
  std::vector<Rational> b(m, Rational(0));
  b[0] -= 2;
  b[m - 1] -= 2;
  Rational form = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) form += b[i] * inv[i][j] * b[j];
  rep.quadratic_form = form;
  if (form != -4) throw OracleMismatch("b^T A^-1 b != -4 q_1^2 at n=" + std::to_string(n));
  return rep;
}

RecurrenceReport convolution_recurrence_check(int dimension, int l, int l_volume) {
  if (dimension < 1) throw DomainError("dimension must be positive");
  if (l < 1 || l > 12) throw DomainError("recurrence check needs 1 <= l <= 12");
  if (l_volume < 0 || l_volume > l) throw DomainError("need 0 <= l_V <= l");
  RecurrenceReport rep{dimension, l, l_volume, 0.0};
  Real worst = 0;
  auto track = [&](const Real& got, const Real& want) {
    worst = std::max(worst, relative_difference(got, want));
  };
  const Real half_d = Real(dimension) / 2;

  // Volume chain: r = D/2 - 1, A_1 = 1, s_1 = 0.
  {
    const Real r = half_d - 1;
    Real a = 1, s = 0;
    for (int n = 1; n <= l; ++n) {
      a = a * tgamma(1 + r) * tgamma(1 + s) / tgamma(2 + r + s);
      s = r + s + 1;
      track(a, pow(tgamma(half_d), n) / tgamma(n * half_d + 1));
      track(s, n * half_d);
    }
  }

  // Surface chain seeded by the l_V volume convolutions.
  {
    const int l_s = l - l_volume;
    const Real r = half_d - Real(3) / 2;
    const Real a1 = pow(tgamma(half_d), l_volume) / tgamma(l_volume * half_d + 1);
    const Real s1 = l_volume * half_d;
    const bool delta_surface = dimension == 1;  // Gamma(1 + r) dropped
    Real a = a1, s = s1;
    for (int n = 1; n <= l_s; ++n) {
      const Real g = delta_surface ? Real(1) : tgamma(1 + r);
      a = a * g * tgamma(1 + s) / tgamma(2 + r + s);
      s = r + s + 1;
      const Real closed_s = s1 + n * (r + 1);
      const Real gn = delta_surface ? Real(1) : pow(tgamma(1 + r), n);
      track(s, closed_s);
      track(a, a1 * gn * tgamma(1 + s1) / tgamma(1 + closed_s));
    }
    // a^{l_V} b^{l_S} lambda A_{l_S+1} = 1/Gamma(lambda)
    const Real lambda = l_volume * half_d + l_s * (half_d - Real(1) / 2);
    if (lambda > 0) {
      const Real b = delta_surface ? Real(1) : 1 / tgamma(half_d - Real(1) / 2);
      const Real assembled = pow(1 / tgamma(half_d), l_volume) * pow(b, l_s) * lambda * a;
      track(assembled, 1 / tgamma(lambda));
    }
  }
  rep.max_relative_error = worst.convert_to<double>();
  if (rep.max_relative_error > 1e-12)
    throw OracleMismatch("convolution recurrence mismatch: relative error " +
                         std::to_string(rep.max_relative_error));
  return rep;
}

}  // namespace mbdos
