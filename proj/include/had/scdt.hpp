#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "had/monotone.hpp"
#include "had/types.hpp"

namespace had {

// Quantile profile: values of the inverse CDF of an L1-normalized
// non-negative signal, sampled at grid midpoints y_j = (j + 1/2) / M.
struct CdtProfile {
  std::vector<double> quantiles;

  std::size_t grid_size() const { return quantiles.size(); }
  bool non_decreasing() const;
};

// Signed transform: per-sign quantile profiles paired with their L1
// masses. A part whose mass falls below the epsilon threshold is stored
// as the all-zero profile with mass exactly 0.
struct ScdtVector {
  CdtProfile pos_quantiles;
  double pos_mass = 0.0;
  CdtProfile neg_quantiles;
  double neg_mass = 0.0;

  std::size_t grid_size() const { return pos_quantiles.grid_size(); }

  // Layout: [pos_quantiles | pos_mass | neg_quantiles | neg_mass],
  // length 2M + 2. mass_weight scales the two mass coordinates only.
  std::vector<double> flatten(double mass_weight = 1.0) const;
  void flatten_into(std::span<double> out, double mass_weight = 1.0) const;

  static std::size_t flat_length(std::size_t grid_size) { return 2 * grid_size + 2; }
};

// A signal part with quadrature mass below this is treated as identically
// zero; scaled by the domain width.
inline double mass_epsilon(const Interval& domain) { return 1e-10 * domain.width(); }

// Inverse CDF of the L1-normalized signal at grid midpoints. The signal is
// a piecewise-constant density, its CDF continuous piecewise-linear, and
// the inverse takes the left endpoint on zero-density plateaus.
CdtProfile cdt_forward(const SpectralSignal& s, std::size_t grid_size);

// Signed transform via the split s = max(s,0) - max(-s,0).
ScdtVector scdt_forward(const SpectralSignal& s, std::size_t grid_size);

// Histogram of the quantile samples scaled to `mass`; approximate inverse
// used by round-trip tests.
SpectralSignal cdt_inverse(const CdtProfile& profile, double mass, std::size_t out_bins,
                           Interval domain = {0.0, 1.0});

// Warp of the independent axis: returns the signal with density
// g'(x) * s(g(x)) where g is the inverse of `g_inverse`. Bin masses are
// computed exactly from the piecewise-linear cumulative of s, so total
// mass is preserved up to rounding.
SpectralSignal apply_deformation(const SpectralSignal& s, const MonotoneMap& g_inverse);

// Transform-domain form of the same warp: g_inverse applied elementwise to
// both quantile profiles, masses untouched. Zero parts stay zero.
ScdtVector compose_in_scdt(const ScdtVector& v, const MonotoneMap& g_inverse);

// Per-pixel transform of a whole cube into the N x (2M+2) sample matrix.
// OpenMP-parallel; each row is a pure function of its pixel, so the result
// is identical for any thread count.
DataMatrix transform_cube(const HsiCube& cube, std::size_t grid_size,
                          double mass_weight = 1.0);

}  // namespace had
