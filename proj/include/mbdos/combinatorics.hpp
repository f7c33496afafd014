#pragma once

#include <map>
#include <span>
#include <vector>

#include "mbdos/numeric.hpp"

namespace mbdos {

inline constexpr int kMaxParticles = 60;

// An integer partition, stored as ascending parts.
class Partition {
 public:
  static Partition from_parts(std::vector<int> parts);
  static Partition from_multiplicities(const std::map<int, int>& mult);

  int total() const { return total_; }
  int length() const { return static_cast<int>(parts_.size()); }
  std::span<const int> parts() const { return parts_; }
  // part size n -> multiplicity m_n
  std::map<int, int> multiplicities() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) {
    return a.parts_ <=> b.parts_;
  }

 private:
  std::vector<int> parts_;
  int total_ = 0;
};

void check_particle_count(int n);

// Visits every partition of n as an ascending part list, in lexicographic
// order: {1,1,1}, {1,2}, {3}.
template <class Visitor>
void for_each_partition(int n, Visitor&& visit) {
  check_particle_count(n);
  std::vector<int> parts;
  parts.reserve(n);
  // Extend `parts` with ascending parts >= lo summing to rest.
  auto rec = [&](auto& self, int rest, int lo) -> void {
    for (int p = lo; p <= rest; ++p) {
      if (p != rest && rest - p < p) continue;
      parts.push_back(p);
      if (p == rest)
        visit(std::span<const int>(parts));
      else
        self(self, rest - p, p);
      parts.pop_back();
    }
  };
  rec(rec, n, 1);
}

std::vector<Partition> enumerate_partitions(int n);

// p(n) by the standard coin DP; independent of the enumerator.
Integer partition_count(int n);

// N! / (prod N_w * prod m_n!): permutations of S_N with this cycle type.
Integer cycle_count_factor(const Partition& p);

// V^l * (prod N_w)^(D/2)
Real manifold_measure(const Partition& p, const Real& volume, int dimension);

// Cycle exponents mu = D/2 + 1 (volume) and nu = (D+1)/2 (surface).
HalfInteger volume_exponent(int dimension);
HalfInteger surface_exponent(int dimension);

// Exact when every exponent that enters is an integer.
bool confined_coeff_is_exact(int l, int l_volume, int dimension);

ExactCoefficient universal_coeff_unconfined(int n, int l, int dimension);
ExactCoefficient universal_coeff_confined(int n, int l, int l_volume, int dimension);

// Storage for all C_{l,l_V}, 0 <= l_V <= l <= N, zero-initialised with the
// right exactness; kernels::*::coefficient_table fill it.
class CoefficientTable {
 public:
  CoefficientTable(int n, int dimension);

  int particles() const { return n_; }
  int dimension() const { return dimension_; }
  const ExactCoefficient& at(int l, int l_volume) const;
  ExactCoefficient& at(int l, int l_volume);

 private:
  int n_;
  int dimension_;
  std::vector<std::vector<ExactCoefficient>> rows_;  // [l][l_V], l from 0
};

// Contribution of one partition to row l = length of the partition.
// exact_row/real_row have length l+1; entries of the wrong kind are zero.
struct PartitionRow {
  std::vector<Rational> exact;
  std::vector<Real> approx;
};
PartitionRow partition_row(std::span<const int> parts, int dimension);

}  // namespace mbdos
