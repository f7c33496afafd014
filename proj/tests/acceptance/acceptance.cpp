// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if
// any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "mbdos/combinatorics.hpp"
#include "mbdos/genfunc.hpp"
#include "mbdos/kernels.hpp"
#include "mbdos/smooth_dos.hpp"
#include "mbdos/spectra_oracle.hpp"

using namespace mbdos;

namespace {

// Pinned tolerances.
constexpr double kTolTwoFermion = 1e-12;
const char* const kTolDualRoute = "1e-25";
constexpr double kGapLow = 0.2, kGapHigh = 0.8, kGapBound = 0.5, kGapFraction = 0.8;
constexpr double kSensitivity = 1e3;
constexpr double kBetheAt28 = 0.05;
constexpr double kSaddleDensity = 0.02, kSaddleEntropy = 0.01;
constexpr double kStaircaseBand = 1.0, kStaircaseOffset = 5.0, kStaircaseWindow = 40.0;
constexpr double kRecurrence = 1e-12, kSemigroup = 1e-6;
constexpr double kClosedForm = 1e-10;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2fs/%.0fs", secs, limit_s);
  std::cout << (ok ? "PASS" : "FAIL") << " " << id << " " << name << " [" << timing
            << (in_time ? "" : " over limit") << "] " << o.detail << std::endl;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double rel(const Real& a, const Real& b) { return relative_difference(a, b).convert_to<double>(); }

bool same_spectrum(const SpectrumList& a, const SpectrumList& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a.entries()[i].energy - b.entries()[i].energy) > tol ||
        a.entries()[i].weight != b.entries()[i].weight)
      return false;
  return true;
}

Outcome two_fermion_line() {
  const auto dos = build_confined_dos(2, 1, Statistics::fermion, Real(-1) / 2);
  const PowerTerm* constant = dos.term(HalfInteger::from_twice(2));
  const PowerTerm* root = dos.term(HalfInteger::from_twice(1));
  if (!constant || !root || dos.terms().size() != 2) return {false, "unexpected term structure"};
  const double e1 = rel(constant->coefficient, Real(1) / 2);
  const double e2 = rel(root->coefficient, -(2 + sqrt(Real(2))) / (4 * sqrt(real_pi())));
  const double e3 = rel(dos.delta_coeff(), Real(3) / 8);
  const double worst = std::max({e1, e2, e3});
  return {worst <= kTolTwoFermion, "max rel err " + sci(worst)};
}

Outcome combinatorial_closure() {
  for (int n = 1; n <= 12; ++n) {
    Integer sum = 0;
    for_each_partition(n, [&](std::span<const int> parts) {
      sum += cycle_count_factor(Partition::from_parts({parts.begin(), parts.end()}));
    });
    if (sum != factorial(n)) return {false, "N=" + std::to_string(n)};
  }
  return {true, "N<=12 exact"};
}

Outcome dual_route() {
  const Real tol(kTolDualRoute);
  Real worst = 0;
  int exact_checked = 0;
  for (int d = 1; d <= 3; ++d)
    for (int n = 1; n <= 20; ++n) {
      const auto a = kernels::parallel::coefficient_table(n, d);
      const auto b = genfunc_coefficient_table(n, d);
      for (int l = 1; l <= n; ++l)
        for (int lv = 0; lv <= l; ++lv) {
          const auto& x = a.at(l, lv);
          const auto& y = b.at(l, lv);
          if (x.is_exact()) {
            if (!y.is_exact() || x.exact() != y.exact())
              return {false, "rational mismatch at D=" + std::to_string(d) + " N=" +
                                 std::to_string(n) + " l=" + std::to_string(l)};
            ++exact_checked;
          } else {
            const Real r = relative_difference(x.value(), y.value());
            if (r > worst) worst = r;
          }
        }
    }
  return {worst <= tol, std::to_string(exact_checked) + " exact equal, float max rel " +
                            sci(worst.convert_to<double>())};
}

Outcome oracle_equivalence() {
  int cases = 0;
  for (const char* model : {"equidistant:1", "box1d:1"}) {
    const SpectrumModel m = parse_model(model);
    const double q = energy_quantum(m);
    for (int n = 1; n <= 5; ++n)
      for (Statistics st : {Statistics::boson, Statistics::fermion}) {
        double emax = filled_energy(single_particle_levels(m, 50 * q), n, st) + 10 * q;
        SpectrumList levels, exact;
        for (;;) {
          levels = single_particle_levels(m, emax);
          exact = manybody_exact_spectrum(levels, n, st, emax);
          if (exact.total_weight() >= 200) break;
          emax *= 1.3;
        }
        const auto wm = weidenmuller_discrete_dos(levels, n, st, emax);
        if (!same_spectrum(exact, wm.without_zero_weights(), levels.merge_tolerance()))
          return {false, std::string(model) + " N=" + std::to_string(n) + " " + to_string(st)};
        ++cases;
      }
  }
  // Repeated-level configurations on generic levels must carry weight 0.
  std::vector<double> e;
  std::vector<SpectrumEntry> entries;
  for (int k = 0; k < 9; ++k) {
    e.push_back(k + std::sqrt(2.0 + k) * 0.37 + std::cbrt(3.0 + k) * 0.11);
    entries.push_back({e.back(), Rational(1)});
  }
  const double inf = std::numeric_limits<double>::infinity();
  const SpectrumList generic("generic", inf, entries, 1e-12);
  int zeros = 0;
  for (int n = 2; n <= 4; ++n) {
    std::set<long> physical;
    std::vector<int> idx;
    std::function<void(int)> rec = [&](int from) {
      if (static_cast<int>(idx.size()) == n) {
        double sum = 0;
        for (int i : idx) sum += e[i];
        physical.insert(std::lround(sum * 1e9));
        return;
      }
      for (int i = from; i < static_cast<int>(e.size()); ++i) {
        idx.push_back(i);
        rec(i + 1);
        idx.pop_back();
      }
    };
    rec(0);
    const SpectrumList wm = weidenmuller_discrete_dos(generic, n, Statistics::fermion, inf);
    for (const auto& entry : wm.entries()) {
      const bool phys = physical.count(std::lround(entry.energy * 1e9)) > 0;
      if (entry.weight != (phys ? Rational(1) : Rational(0)))
        return {false, "repeated-level weight nonzero at N=" + std::to_string(n)};
      zeros += !phys;
    }
  }
  return {true, std::to_string(cases) + " spectra equal, " + std::to_string(zeros) +
                    " repeated-level weights exactly 0"};
}

Outcome number_theory_bridge() {
  const auto levels = single_particle_levels(parse_model("equidistant:1"), 40);
  for (int n = 1; n <= 8; ++n) {
    const double egs = n * (n - 1) / 2.0;
    const auto spec = manybody_exact_spectrum(levels, n, Statistics::fermion, egs + 30);
    if (spec.size() != 31) return {false, "missing excitations at N=" + std::to_string(n)};
    for (int ex = 0; ex <= 30; ++ex) {
      long ref = ex == 0 ? 1 : 0;
      if (ex > 0)
        for_each_partition(ex, [&](std::span<const int> p) { ref += static_cast<int>(p.size()) <= n; });
      if (spec.entries()[ex].weight != Rational(ref))
        return {false, "N=" + std::to_string(n) + " n=" + std::to_string(ex)};
    }
  }
  return {true, "N<=8, n<=30 exact"};
}

Outcome ground_state_emergence() {
  ScopedPrecision prec(128);
  std::ostringstream d;
  bool ok = true;
  for (int n : {5, 10, 15, 20}) {
    const auto dos = build_unconfined_dos(n, 2, Statistics::fermion);
    const Real egs = Real(n * n) / 2;
    const double at = dos.counting(egs).convert_to<double>();
    double below = 0;
    for (int i = 1; i <= 2000; ++i)
      below = std::max(below, std::abs(dos.counting(egs * Real(kGapFraction) * i / 2000).convert_to<double>()));
    ok = ok && at > kGapLow && at < kGapHigh && below <= kGapBound;
    d << "N=" << n << ": N(EGS)=" << sci(at) << " max|N|=" << sci(below) << "; ";
  }
  return {ok, d.str()};
}

Outcome cancellation_sensitivity() {
  const int n = 13;
  const auto full = build_unconfined_dos(n, 2, Statistics::fermion);
  const auto cut = build_unconfined_dos(n, 2, Statistics::fermion, DosOptions{{1}});
  const Real half = Real(n * n) / 4;
  double worst = 0;
  for (int i = 1; i < 1000; ++i) {
    const Real e = half * i / 1000;
    const double ratio = (abs(cut.density(e)) / abs(full.density(e))).convert_to<double>();
    worst = std::max(worst, ratio);
  }
  return {worst > kSensitivity, "max |rho_cut|/|rho| = " + sci(worst)};
}

Outcome bethe_convergence() {
  std::ostringstream d;
  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double last = 0;
  for (int n : {10, 16, 22, 28}) {
    const auto dos = build_unconfined_dos(n, 2, Statistics::fermion);
    const double smooth = dos.density(Real(n * n) / 2 + n).convert_to<double>();
    const double b = bethe_density(n, n, 1.0);
    const double dev = std::abs(smooth - b) / b;
    monotone = monotone && dev < prev;
    prev = last = dev;
    d << "N=" << n << ":" << sci(dev) << " ";
  }
  const auto dos10 = build_unconfined_dos(10, 2, Statistics::fermion);
  const double s10 = dos10.density(Real(50 + 5)).convert_to<double>();
  const double b10 = bethe_density(10, 5, 1.0), el10 = erdos_lehner_density(10, 5, 1.0);
  const double db = std::abs(s10 - b10) / b10, del = std::abs(s10 - el10) / el10;
  d << "| EL " << sci(del) << " vs Bethe " << sci(db) << " at N=10,Q=5";
  d << " | monotone=" << monotone << " N28<=5%=" << (last <= kBetheAt28) << " EL<=Bethe=" << (del <= db);
  return {monotone && last <= kBetheAt28 && del <= db, d.str()};
}

Outcome saddle_route() {
  const int n = 28;
  double worst_density = 0, worst_entropy = 0;
  for (int q = 10; q <= 50; ++q) {
    const SaddlePoint sp = solve_saddle(n, n * n / 2.0 + q, 2);
    const double b = bethe_density(n, q, 1.0);
    worst_density = std::max(worst_density, std::abs(sp.density - b) / b);
    const double s2 = 2 * M_PI * M_PI / 3 * q;
    worst_entropy = std::max(worst_entropy, std::abs(sp.entropy * sp.entropy - s2) / s2);
  }
  return {worst_density <= kSaddleDensity && worst_entropy <= kSaddleEntropy,
          "density rel " + sci(worst_density) + ", entropy rel " + sci(worst_entropy)};
}

Outcome confined_comparison() {
  const double c = std::sqrt(M_PI), l = 1 / std::sqrt(M_PI);
  SpectrumModel m;
  m.kind = Cylinder{c, l};
  const BilliardGeometry g = model_geometry(m);
  const double rho0 = scaling_density(UnitsContext{false, 1, 1}, g);
  const double gamma = geometry_parameter(g);
  const int n = 12;
  const double egs = gs_energy_smooth(n, 2, gamma).gs_energy;
  const double lo = egs + kStaircaseOffset, hi = egs + kStaircaseWindow;
  const SpectrumList levels = single_particle_levels(m, hi / rho0);
  const SpectrumList spec = kernels::parallel::manybody_spectrum(levels, n, Statistics::fermion, hi / rho0);
  const auto dos = build_confined_dos(n, 2, Statistics::fermion, Real(gamma));

  // The staircase jumps at the levels; test just below and at each jump
  // plus a regular grid.
  std::vector<double> es;
  for (int i = 0; i <= 3500; ++i) es.push_back(lo + (hi - lo) * i / 3500);
  for (const auto& e : spec.entries()) {
    const double x = e.energy * rho0;
    if (x >= lo && x <= hi) {
      es.push_back(x);
      es.push_back(std::nextafter(x, -1e300));
    }
  }
  double worst = 0, worst_rel = 0, at = 0;
  for (double x : es) {
    if (x < lo) continue;
    const double st = staircase(spec, x / rho0).convert_to<double>();
    const double sm = dos.counting(Real(x)).convert_to<double>();
    const double diff = std::abs(st - sm);
    if (diff > worst) {
      worst = diff;
      at = x;
    }
    if (sm > 10) worst_rel = std::max(worst_rel, diff / sm);
  }
  std::ostringstream d;
  d << "window [" << sci(lo) << ", " << sci(hi) << "], " << spec.total_weight().str()
    << " states, max |staircase - smooth| = " << sci(worst) << " at E=" << sci(at)
    << ", max relative " << sci(worst_rel) << " (where smooth > 10)";
  return {worst <= kStaircaseBand, d.str()};
}

Outcome integral_identities() {
  for (int n = 2; n <= 15; ++n) {
    const auto r = verify_cycle_gaussian(n);
    if (!r.inverse_matches || r.determinant != r.expected_determinant)
      return {false, "cycle Gaussian n=" + std::to_string(n)};
  }
  double worst = 0;
  for (int d = 1; d <= 3; ++d)
    for (int l = 1; l <= 12; ++l)
      for (int lv = 0; lv <= l; ++lv)
        worst = std::max(worst, convolution_recurrence_check(d, l, lv).max_relative_error);
  double sup = 0;
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.3, 0.5}, {0.05, 1.7}, {1.0, 1.0}})
    for (int i = -400; i <= 400; ++i) {
      const double x = i * 0.025;
      sup = std::max(sup, std::abs(cauchy_convolution(a, b, x) - cauchy_kernel(a + b, x)));
    }
  return {worst <= kRecurrence && sup <= kSemigroup,
          "Gaussian n<=15 exact, recurrence " + sci(worst) + ", semigroup sup " + sci(sup)};
}

Outcome d2_closed_form() {
  const Real z("0.3"), e(5);
  Real sum = 0;
  for (int n = 1; n <= 25; ++n) sum += build_unconfined_dos(n, 2, Statistics::boson).density(e) * pow(z, n);
  const double r = rel(sum, d2_unconfined_genfunc_closed_form(z, e, Statistics::boson));
  return {r <= kClosedForm, "rel diff " + sci(r)};
}

}  // namespace

int main() {
  std::cout << "precision " << precision_bits() << " bits, " << kernels::max_threads() << " threads\n";
  criterion(1, "two-fermion line with walls", 1, two_fermion_line);
  criterion(2, "combinatorial closure", 1, combinatorial_closure);
  criterion(3, "dual-route coefficients", 10, dual_route);
  criterion(4, "Weidenmuller vs exact spectra", 30, oracle_equivalence);
  criterion(5, "restricted partition degeneracies", 5, number_theory_bridge);
  criterion(6, "ground-state emergence", 10, ground_state_emergence);
  criterion(7, "cancellation sensitivity", 5, cancellation_sensitivity);
  criterion(8, "Bethe convergence", 20, bethe_convergence);
  criterion(9, "saddle-point route", 5, saddle_route);
  criterion(10, "confined cylinder staircase", 120, confined_comparison);
  criterion(11, "integral identities", 10, integral_identities);
  criterion(12, "D=2 generating-function closed form", 5, d2_closed_form);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
