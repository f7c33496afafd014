#pragma once

#include <vector>

#include "mbdos/combinatorics.hpp"
#include "mbdos/smooth_dos.hpp"
#include "mbdos/spectra_oracle.hpp"

// Hot loops in two flavours. The serial versions are the reference; the
// OpenMP versions must return bit-identical results.
namespace mbdos::kernels {

enum class DosQuantity { density, counting };

namespace serial {
CoefficientTable coefficient_table(int n, int dimension);
std::vector<Real> evaluate_grid(const DosExpansion& dos, DosQuantity q,
                                const std::vector<Real>& energies);
SpectrumList manybody_spectrum(const SpectrumList& levels, int n, Statistics stat,
                               double e_max);
SpectrumList weidenmuller(const SpectrumList& levels, int n, Statistics stat, double e_max);
}  // namespace serial

namespace parallel {
CoefficientTable coefficient_table(int n, int dimension);
std::vector<Real> evaluate_grid(const DosExpansion& dos, DosQuantity q,
                                const std::vector<Real>& energies);
SpectrumList manybody_spectrum(const SpectrumList& levels, int n, Statistics stat,
                               double e_max);
SpectrumList weidenmuller(const SpectrumList& levels, int n, Statistics stat, double e_max);
}  // namespace parallel

int max_threads();

}  // namespace mbdos::kernels
