#include "mbdos/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <omp.h>

namespace mbdos::kernels {

int max_threads() { return omp_get_max_threads(); }

namespace {

// ---------------------------------------------------------------- coefficients

struct RowAccumulator {
  std::vector<std::vector<Rational>> exact;
  std::vector<std::vector<Real>> approx;

  explicit RowAccumulator(int n) {
    for (int l = 0; l <= n; ++l) {
      exact.emplace_back(l + 1, Rational(0));
      approx.emplace_back(l + 1, Real(0));
    }
  }

  void add(int l, const PartitionRow& row) {
    for (int lv = 0; lv <= l; ++lv) {
      exact[l][lv] += row.exact[lv];
      approx[l][lv] += row.approx[lv];
    }
  }

  CoefficientTable finish(int n, int dimension) const {
    CoefficientTable t(n, dimension);
    for (int l = 1; l <= n; ++l)
      for (int lv = 0; lv <= l; ++lv) {
        if (confined_coeff_is_exact(l, lv, dimension))
          t.at(l, lv) = exact[l][lv];
        else
          t.at(l, lv) = approx[l][lv];
      }
    return t;
  }
};

constexpr std::size_t kPartitionBlock = 4096;

// ---------------------------------------------------------------- many-body

struct Level {
  double energy;
  std::uint64_t degeneracy;
};

std::vector<Level> to_levels(const SpectrumList& levels) {
  std::vector<Level> out;
  for (const auto& e : levels.entries()) {
    if (e.energy < 0) throw DomainError("single-particle energies must be >= 0");
    if (mp::denominator(e.weight) != 1 || e.weight <= 0)
      throw DomainError("single-particle weights must be positive integers");
    out.push_back({e.energy, mp::numerator(e.weight).convert_to<std::uint64_t>()});
  }
  return out;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw NumericError("multiplicity overflow");
  return r;
}

std::uint64_t binom_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = checked_mul(r, n - k + i) / i;
  return r;
}

using Count = std::pair<double, std::uint64_t>;

// Sort and merge entries within tol of the first energy of their group.
void compact(std::vector<Count>& v, double tol) {
  std::stable_sort(v.begin(), v.end(),
                   [](const Count& a, const Count& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (out > 0 && v[i].first - v[out - 1].first <= tol) {
      if (__builtin_add_overflow(v[out - 1].second, v[i].second, &v[out - 1].second))
        throw NumericError("multiplicity overflow");
    } else {
      v[out++] = v[i];
    }
  }
  v.resize(out);
}

class Enumerator {
 public:
  Enumerator(const SpectrumList& levels, int n, Statistics stat, double e_max)
      : levels_(to_levels(levels)), stat_(stat), e_max_(e_max),
        tol_(levels.merge_tolerance()) {
    if (n < 1) throw DomainError("need N >= 1");
    // Prefix sums over single orbitals, for the cheapest fermionic fill.
    orbital_start_.push_back(0);
    for (const auto& l : levels_) orbital_start_.push_back(orbital_start_.back() + l.degeneracy);
    if (stat_ == Statistics::fermion) {
      prefix_.push_back(0.0);
      for (const auto& l : levels_)
        for (std::uint64_t g = 0; g < l.degeneracy; ++g) prefix_.push_back(prefix_.back() + l.energy);
    }
  }

  struct State {
    std::size_t level;
    int left;
    double energy;
    std::uint64_t mult;
  };

  // Cheapest energy to place `left` particles on levels from index i on.
  double min_fill(std::size_t i, int left) const {
    if (left == 0) return 0.0;
    if (i >= levels_.size()) return std::numeric_limits<double>::infinity();
    if (stat_ == Statistics::boson) return left * levels_[i].energy;
    const std::uint64_t a = orbital_start_[i];
    if (a + left >= prefix_.size()) return std::numeric_limits<double>::infinity();
    return prefix_[a + left] - prefix_[a];
  }

  bool pruned(const State& s) const {
    return s.energy + min_fill(s.level, s.left) > e_max_ + tol_;
  }

  template <class Sink>
  void children(const State& s, Sink&& sink) const {
    const Level& lv = levels_[s.level];
    const std::uint64_t kmax = stat_ == Statistics::fermion
                                   ? std::min<std::uint64_t>(lv.degeneracy, s.left)
                                   : static_cast<std::uint64_t>(s.left);
    for (std::uint64_t k = 0; k <= kmax; ++k) {
      const std::uint64_t ways = stat_ == Statistics::fermion
                                     ? binom_u64(lv.degeneracy, k)
                                     : binom_u64(lv.degeneracy + k - 1, k);
      State c{s.level + 1, s.left - static_cast<int>(k), s.energy + static_cast<double>(k) * lv.energy,
              checked_mul(s.mult, ways)};
      // Not monotone in k: a heavier occupation here can make the rest cheaper.
      if (!pruned(c)) sink(c);
    }
  }

  void complete(const State& s, std::vector<Count>& out) const {
    if (s.left == 0) {
      out.emplace_back(s.energy, s.mult);
      if (out.size() > (1u << 22)) compact(out, tol_);
      return;
    }
    if (s.level >= levels_.size()) return;
    children(s, [&](const State& c) { complete(c, out); });
  }

  // States after deciding the first `depth` levels, in depth-first order.
  std::vector<State> frontier(std::size_t depth, int n) const {
    std::vector<State> out;
    auto rec = [&](auto& self, const State& s) -> void {
      if (s.left == 0 || s.level >= std::min(depth, levels_.size())) {
        out.push_back(s);
        return;
      }
      children(s, [&](const State& c) { self(self, c); });
    };
    State root{0, n, 0.0, 1};
    if (!pruned(root)) rec(rec, root);
    return out;
  }

  double tolerance() const { return tol_; }

 private:
  std::vector<Level> levels_;
  Statistics stat_;
  double e_max_;
  double tol_;
  std::vector<std::uint64_t> orbital_start_;
  std::vector<double> prefix_;
};

SpectrumList to_spectrum(std::vector<Count> counts, double tol, const SpectrumList& levels,
                         const std::string& what, double e_max) {
  compact(counts, tol);
  std::vector<SpectrumEntry> entries;
  entries.reserve(counts.size());
  for (const auto& [e, c] : counts) entries.push_back({e, Rational(Integer(c))});
  return SpectrumList(what + "(" + levels.model() + ")", e_max, std::move(entries), tol);
}

// ---------------------------------------------------------------- Weidenmuller

// Signed contribution of one cycle type, integer weights before the prefactor.
std::vector<Count> convolve_cycle_type(const std::vector<Level>& levels, std::span<const int> parts,
                                       double e_max, double tol) {
  const double e_min = levels.empty() ? 0.0 : levels.front().energy;
  std::vector<Count> states{{0.0, 1}};
  int remaining = 0;
  for (int k : parts) remaining += k;
  for (int k : parts) {
    remaining -= k;
    const double reserve = remaining * e_min;
    std::vector<Count> next;
    for (const auto& [e, w] : states)
      for (const auto& l : levels) {
        const double en = e + k * l.energy;
        if (en + reserve > e_max + tol) break;
        next.emplace_back(en, checked_mul(w, l.degeneracy));
      }
    compact(next, tol);
    states = std::move(next);
  }
  return states;
}

Rational cycle_prefactor(const Partition& p, int n, Statistics stat) {
  // c(N_1..N_l)/N! with the Jacobian of rho(E/N_w) cancelling prod 1/N_w.
  Rational pref(cycle_count_factor(p), factorial(n));
  if (stat == Statistics::fermion && (n - p.length()) % 2 == 1) pref = -pref;
  return pref;
}

SpectrumList assemble_weidenmuller(const std::vector<std::vector<Count>>& per_type,
                                   const std::vector<Partition>& types, int n, Statistics stat,
                                   double tol, const SpectrumList& levels, double e_max) {
  std::vector<SpectrumEntry> entries;
  for (std::size_t t = 0; t < types.size(); ++t) {
    const Rational pref = cycle_prefactor(types[t], n, stat);
    for (const auto& [e, w] : per_type[t]) entries.push_back({e, pref * Rational(Integer(w))});
  }
  return SpectrumList("weidenmuller(" + levels.model() + ")", e_max, std::move(entries), tol);
}

}  // namespace

// ============================================================== serial

namespace serial {

CoefficientTable coefficient_table(int n, int dimension) {
  RowAccumulator acc(n);
  for_each_partition(n, [&](std::span<const int> parts) {
    acc.add(static_cast<int>(parts.size()), partition_row(parts, dimension));
  });
  return acc.finish(n, dimension);
}

std::vector<Real> evaluate_grid(const DosExpansion& dos, DosQuantity q,
                                const std::vector<Real>& energies) {
  std::vector<Real> out(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i)
    out[i] = q == DosQuantity::density ? dos.density(energies[i]) : dos.counting(energies[i]);
  return out;
}

SpectrumList manybody_spectrum(const SpectrumList& levels, int n, Statistics stat, double e_max) {
  Enumerator en(levels, n, stat, e_max);
  std::vector<Count> out;
  for (const auto& s : en.frontier(0, n)) en.complete(s, out);
  return to_spectrum(std::move(out), en.tolerance(), levels, "manybody", e_max);
}

SpectrumList weidenmuller(const SpectrumList& levels, int n, Statistics stat, double e_max) {
  const auto lv = to_levels(levels);
  const auto types = enumerate_partitions(n);
  std::vector<std::vector<Count>> per_type;
  for (const auto& p : types)
    per_type.push_back(convolve_cycle_type(lv, p.parts(), e_max, levels.merge_tolerance()));
  return assemble_weidenmuller(per_type, types, n, stat, levels.merge_tolerance(), levels, e_max);
}

}  // namespace serial

// ============================================================== parallel

namespace parallel {

CoefficientTable coefficient_table(int n, int dimension) {
  RowAccumulator acc(n);
  std::vector<std::vector<int>> block;
  std::vector<PartitionRow> rows;
  auto flush = [&] {
    rows.assign(block.size(), PartitionRow{});
    const long count = static_cast<long>(block.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < count; ++i) rows[i] = partition_row(block[i], dimension);
    for (std::size_t i = 0; i < block.size(); ++i)
      acc.add(static_cast<int>(block[i].size()), rows[i]);
    block.clear();
  };
  for_each_partition(n, [&](std::span<const int> parts) {
    block.emplace_back(parts.begin(), parts.end());
    if (block.size() == kPartitionBlock) flush();
  });
  flush();
  return acc.finish(n, dimension);
}

std::vector<Real> evaluate_grid(const DosExpansion& dos, DosQuantity q,
                                const std::vector<Real>& energies) {
  std::vector<Real> out(energies.size());
  const long count = static_cast<long>(energies.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i)
    out[i] = q == DosQuantity::density ? dos.density(energies[i]) : dos.counting(energies[i]);
  return out;
}

SpectrumList manybody_spectrum(const SpectrumList& levels, int n, Statistics stat, double e_max) {
  Enumerator en(levels, n, stat, e_max);
  std::vector<Enumerator::State> tasks;
  for (std::size_t depth = 1;; ++depth) {
    tasks = en.frontier(depth, n);
    if (tasks.size() >= 256 || depth >= levels.size()) break;
  }
  std::vector<std::vector<Count>> parts(tasks.size());
  const long count = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) en.complete(tasks[i], parts[i]);
  std::vector<Count> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return to_spectrum(std::move(out), en.tolerance(), levels, "manybody", e_max);
}

SpectrumList weidenmuller(const SpectrumList& levels, int n, Statistics stat, double e_max) {
  const auto lv = to_levels(levels);
  const auto types = enumerate_partitions(n);
  std::vector<std::vector<Count>> per_type(types.size());
  const long count = static_cast<long>(types.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long t = 0; t < count; ++t)
    per_type[t] = convolve_cycle_type(lv, types[t].parts(), e_max, levels.merge_tolerance());
  return assemble_weidenmuller(per_type, types, n, stat, levels.merge_tolerance(), levels, e_max);
}

}  // namespace parallel

}  // namespace mbdos::kernels
