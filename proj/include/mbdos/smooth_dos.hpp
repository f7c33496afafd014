#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbdos/numeric.hpp"

namespace mbdos {

enum class BoundaryCondition { neumann, dirichlet };

struct BilliardGeometry {
  int dimension = 2;
  double volume = 1;
  // For D = 1: number of endpoints.
  double surface = 0;
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  int euler_characteristic = 0;
};

struct UnitsContext {
  bool natural = true;
  double mass = 1;
  double hbar = 1;
};

double scaling_density(const UnitsContext& units, const BilliardGeometry& geom);
double geometry_parameter(const BilliardGeometry& geom);

// One term c * E^(lambda-1) theta(E), with Gamma(lambda) already folded
// into c. `exact` is set when c is rational.
struct PowerTerm {
  HalfInteger lambda;
  Real coefficient;
  std::optional<Rational> exact;
};

// Smooth many-body DOS in units rho0 = 1.
class DosExpansion {
 public:
  DosExpansion(int n, int dimension, Statistics stat, Real gamma,
               std::vector<PowerTerm> terms, Real delta_coeff);

  int particles() const { return n_; }
  int dimension() const { return dimension_; }
  Statistics statistics() const { return stat_; }
  const Real& gamma() const { return gamma_; }
  // Sorted by ascending lambda, no duplicates, no zero coefficients.
  const std::vector<PowerTerm>& terms() const { return terms_; }
  const Real& delta_coeff() const { return delta_; }
  const PowerTerm* term(HalfInteger lambda) const;

  // +inf at E = 0 when a singular term or the delta is present.
  Real density(const Real& e) const;
  Real counting(const Real& e) const;
  Real repeated_integral(int order, const Real& e) const;

 private:
  int n_;
  int dimension_;
  Statistics stat_;
  Real gamma_;
  std::vector<PowerTerm> terms_;
  Real delta_;
};

struct DosOptions {
  // Cluster counts l whose contributions are left out.
  std::vector<int> omit_cluster_counts;
};

DosExpansion build_unconfined_dos(int n, int dimension, Statistics stat,
                                  const DosOptions& options = {});
DosExpansion build_confined_dos(int n, int dimension, Statistics stat, const Real& gamma,
                                const DosOptions& options = {});

enum class GroundStateProvenance { unconfined, perimeter, perimeter_curvature };
std::string to_string(GroundStateProvenance p);

struct GroundStateResult {
  double fermi_energy = 0;
  double gs_energy = 0;
  GroundStateProvenance provenance = GroundStateProvenance::unconfined;
  // The smooth single-particle DOS is negative somewhere below E_F.
  bool negative_density_warning = false;
};

// Smooth single-particle staircase E^nu/Gamma(nu+1) + gamma E^(nu-1/2)/Gamma(nu+1/2)
// (+ chi/6 in D = 2), E > 0.
double single_particle_counting(double e, int dimension, double gamma, double chi);
// Its derivative for E > 0 (the D = 1 surface term is a delta at 0).
double single_particle_density(double e, int dimension, double gamma);

double fermi_energy(double n, int dimension, double gamma, double chi = 0);
GroundStateResult gs_energy_smooth(double n, int dimension, double gamma, int chi = 0);
// Perimeter closed form, D = 2, no curvature:
// E_GS(N,0,0) x^3 (x + 4/3 sgn(gamma) sqrt(a)), x = sqrt(1+a) - sgn(gamma) sqrt(a),
// a = gamma^2/(pi N).
double gs_energy_perimeter_closed(double n, double gamma);
double gs_shift_curvature(double n, double gamma, int chi);

double bethe_density(double n, double q, double rho_fermi);
double erdos_lehner_density(double n, double q, double rho_fermi);

}  // namespace mbdos
