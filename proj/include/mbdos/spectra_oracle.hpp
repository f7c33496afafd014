#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mbdos/numeric.hpp"
#include "mbdos/smooth_dos.hpp"

namespace mbdos {

struct SpectrumEntry {
  double energy;
  Rational weight;
};

// Sorted multiset of energies with signed rational weights.
class SpectrumList {
 public:
  SpectrumList() = default;
  // Sorts, then merges entries closer than merge_tolerance to the first
  // energy of their group. Zero-weight entries are kept.
  SpectrumList(std::string model, double cutoff, std::vector<SpectrumEntry> entries,
               double merge_tolerance);

  const std::vector<SpectrumEntry>& entries() const { return entries_; }
  const std::string& model() const { return model_; }
  double cutoff() const { return cutoff_; }
  double merge_tolerance() const { return tolerance_; }
  std::size_t size() const { return entries_.size(); }

  Rational total_weight() const;
  SpectrumList without_zero_weights() const;

 private:
  std::string model_;
  double cutoff_ = 0;
  double tolerance_ = 0;
  std::vector<SpectrumEntry> entries_;
};

struct Equidistant {
  double spacing = 1;
};
struct Box1d {
  double length = 1;
};
struct Rectangle {
  double lx = 1, ly = 1;
};
// Periodic around the circumference, Dirichlet at both rims.
struct Cylinder {
  double circumference = 1, height = 1;
};

struct SpectrumModel {
  std::variant<Equidistant, Box1d, Rectangle, Cylinder> kind;
  double mass = 1;
  double hbar = 1;
};

// "equidistant:1", "box1d:2", "rectangle:1,2", "cylinder:3.14159,1"
SpectrumModel parse_model(const std::string& text);
std::string model_name(const SpectrumModel& model);
// Smallest natural energy unit of the model; merge tolerances scale with it.
double energy_quantum(const SpectrumModel& model);
// Billiard data for the Weyl comparison; throws for the equidistant model.
BilliardGeometry model_geometry(const SpectrumModel& model);

SpectrumList single_particle_levels(const SpectrumModel& model, double e_max);

// Ground-state energy of k particles filled into `levels`.
double filled_energy(const SpectrumList& levels, int k, Statistics stat);

// Throws DomainError if some configuration at or below e_max may need a
// level above the cutoff of `levels`.
void check_cutoff(const SpectrumList& levels, int n, Statistics stat, double e_max);

SpectrumList manybody_exact_spectrum(const SpectrumList& levels, int n, Statistics stat,
                                     double e_max);
SpectrumList weidenmuller_discrete_dos(const SpectrumList& levels, int n, Statistics stat,
                                       double e_max);

double cauchy_kernel(double alpha, double x);
double cauchy_smooth(const SpectrumList& spectrum, double alpha, double e);
// (delta_alpha * delta_beta)(x) by adaptive quadrature.
double cauchy_convolution(double alpha, double beta, double x);

// Smoothed single-particle levels pushed through the Weidenmuller sum by
// numerical convolution. N <= 3.
double weidenmuller_smoothed_density(const SpectrumList& levels, int n, Statistics stat,
                                     double alpha, double e);

Rational staircase(const SpectrumList& spectrum, double e);

Integer restricted_partition_count(int n, int max_part);

struct CycleGaussianReport {
  int n = 0;
  Rational determinant;
  Rational expected_determinant;
  bool inverse_matches = false;
  Rational quadratic_form;  // b^T A^-1 b in units of q_1^2
};
CycleGaussianReport verify_cycle_gaussian(int n);

struct RecurrenceReport {
  int dimension = 0;
  int l = 0;
  int l_volume = 0;
  double max_relative_error = 0;
};
RecurrenceReport convolution_recurrence_check(int dimension, int l, int l_volume);

}  // namespace mbdos
