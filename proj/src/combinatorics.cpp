#include "mbdos/combinatorics.hpp"

#include <algorithm>
#include <string>

namespace mbdos {

void check_particle_count(int n) {
  if (n < 1 || n > kMaxParticles)
    throw DomainError("particle number " + std::to_string(n) + " outside [1, " +
                      std::to_string(kMaxParticles) + "]");
}

Partition Partition::from_parts(std::vector<int> parts) {
  if (parts.empty()) throw DomainError("empty partition");
  Partition p;
  for (int x : parts) {
    if (x < 1) throw DomainError("partition parts must be positive");
    p.total_ += x;
  }
  std::sort(parts.begin(), parts.end());
  p.parts_ = std::move(parts);
  return p;
}

Partition Partition::from_multiplicities(const std::map<int, int>& mult) {
  std::vector<int> parts;
  for (auto [n, m] : mult) {
    if (m < 0) throw DomainError("negative multiplicity");
    parts.insert(parts.end(), m, n);
  }
  return from_parts(std::move(parts));
}

std::map<int, int> Partition::multiplicities() const {
  std::map<int, int> mult;
  for (int x : parts_) ++mult[x];
  return mult;
}

std::vector<Partition> enumerate_partitions(int n) {
  std::vector<Partition> out;
  for_each_partition(n, [&](std::span<const int> parts) {
    out.push_back(Partition::from_parts({parts.begin(), parts.end()}));
  });
  return out;
}

Integer partition_count(int n) {
  if (n < 0) return 0;
  std::vector<Integer> p(n + 1, Integer(0));
  p[0] = 1;
  for (int part = 1; part <= n; ++part)
    for (int k = part; k <= n; ++k) p[k] += p[k - part];
  return p[n];
}

Integer cycle_count_factor(const Partition& p) {
  Integer den = 1;
  for (int x : p.parts()) den *= x;
  for (auto [n, m] : p.multiplicities()) den *= factorial(m);
  Integer num = factorial(p.total());
  if (num % den != 0) throw NumericError("cycle count factor is not integral");
  return num / den;
}

Real manifold_measure(const Partition& p, const Real& volume, int dimension) {
  if (volume <= 0) throw DomainError("volume must be positive");
  Integer prod = 1;
  for (int x : p.parts()) prod *= x;
  Real r = pow(volume, p.length());
  if (dimension % 2 == 0)
    r *= to_real(Integer(mp::pow(prod, static_cast<unsigned>(dimension / 2))));
  else
    r *= pow(to_real(prod), Real(dimension) / 2);
  return r;
}

HalfInteger volume_exponent(int dimension) {
  return HalfInteger::from_twice(dimension + 2);
}

HalfInteger surface_exponent(int dimension) {
  return HalfInteger::from_twice(dimension + 1);
}

bool confined_coeff_is_exact(int l, int l_volume, int dimension) {
  if (dimension % 2 == 0) return l_volume == l;
  return l_volume == 0;
}

namespace {

void check_dimension(int d) {
  if (d < 1) throw DomainError("dimension must be positive");
}

// l! / prod m! * prod n^(-e m), all parts carrying the integer exponent e.
Rational single_channel_exact(std::span<const int> parts, int e) {
  Integer den = 1;
  int run = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    ++run;
    if (i + 1 == parts.size() || parts[i + 1] != parts[i]) {
      den *= factorial(run);
      run = 0;
    }
    den *= Integer(mp::pow(Integer(parts[i]), static_cast<unsigned>(e)));
  }
  return Rational(factorial(static_cast<int>(parts.size())), den);
}

}  // namespace

PartitionRow partition_row(std::span<const int> parts, int dimension) {
  const int l = static_cast<int>(parts.size());
  const HalfInteger mu = volume_exponent(dimension);
  const HalfInteger nu = surface_exponent(dimension);
  PartitionRow row;
  row.exact.assign(l + 1, Rational(0));
  row.approx.assign(l + 1, Real(0));

  // poly[v]: sum over choices with v parts in the volume channel of
  // prod 1/(v_i! (m_i-v_i)!) n_i^(-mu v_i - nu (m_i - v_i)).
  std::vector<Real> poly(1, Real(1));
  std::size_t i = 0;
  while (i < parts.size()) {
    const int n = parts[i];
    int m = 0;
    while (i < parts.size() && parts[i] == n) {
      ++m;
      ++i;
    }
    const Real a = inverse_power(n, mu);
    const Real b = inverse_power(n, nu);
    std::vector<Real> w(m + 1);
    for (int v = 0; v <= m; ++v)
      w[v] = pow(a, v) * pow(b, m - v) /
             to_real(Integer(factorial(v) * factorial(m - v)));
    std::vector<Real> next(poly.size() + m, Real(0));
    for (std::size_t k = 0; k < poly.size(); ++k)
      for (int v = 0; v <= m; ++v) next[k + v] += poly[k] * w[v];
    poly = std::move(next);
  }

  for (int lv = 0; lv <= l; ++lv) {
    if (confined_coeff_is_exact(l, lv, dimension)) {
      const HalfInteger e = (lv == l) ? mu : nu;
      row.exact[lv] = single_channel_exact(parts, e.as_int());
    } else {
      row.approx[lv] = poly[lv] * to_real(Integer(factorial(lv) * factorial(l - lv)));
    }
  }
  return row;
}

ExactCoefficient universal_coeff_confined(int n, int l, int l_volume, int dimension) {
  check_dimension(dimension);
  if (l_volume < 0 || l_volume > l)
    throw DomainError("need 0 <= l_V <= l");
  check_particle_count(n);
  if (l > n || l < 1) return Rational(0);
  const bool exact = confined_coeff_is_exact(l, l_volume, dimension);
  Rational q = 0;
  Real r = 0;
  for_each_partition(n, [&](std::span<const int> parts) {
    if (static_cast<int>(parts.size()) != l) return;
    PartitionRow row = partition_row(parts, dimension);
    if (exact)
      q += row.exact[l_volume];
    else
      r += row.approx[l_volume];
  });
  if (exact) return q;
  return r;
}

ExactCoefficient universal_coeff_unconfined(int n, int l, int dimension) {
  if (l < 1) throw DomainError("need l >= 1");
  return universal_coeff_confined(n, l, l, dimension);
}

CoefficientTable::CoefficientTable(int n, int dimension)
    : n_(n), dimension_(dimension) {
  check_particle_count(n);
  check_dimension(dimension);
  rows_.resize(n + 1);
  for (int l = 0; l <= n; ++l) {
    rows_[l].resize(l + 1);
    for (int lv = 0; lv <= l; ++lv) {
      if (l == 0 || confined_coeff_is_exact(l, lv, dimension))
        rows_[l][lv] = Rational(0);
      else
        rows_[l][lv] = Real(0);
    }
  }
}

const ExactCoefficient& CoefficientTable::at(int l, int l_volume) const {
  if (l < 0 || l > n_ || l_volume < 0 || l_volume > l)
    throw DomainError("coefficient index out of range");
  return rows_[l][l_volume];
}

ExactCoefficient& CoefficientTable::at(int l, int l_volume) {
  if (l < 0 || l > n_ || l_volume < 0 || l_volume > l)
    throw DomainError("coefficient index out of range");
  return rows_[l][l_volume];
}

}  // namespace mbdos
