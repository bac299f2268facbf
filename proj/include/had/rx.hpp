#pragma once

#include <cstddef>
#include <vector>

#include "had/types.hpp"

namespace had {

// Global Gaussian background model: per-band mean and inverse of the
// ridge-regularized sample covariance.
struct RxModel {
  std::vector<double> mean;
  std::vector<double> covariance_inverse;  // D x D row-major
  double ridge = 0.0;

  std::size_t bands() const { return mean.size(); }
};

// mu = pixel mean, Sigma = sample covariance (divisor N-1) + ridge * I,
// inverted by Cholesky. Failure to factor is an error, never a silent
// pseudo-inverse.
RxModel fit_rx(const HsiCube& cube, double ridge);

// Default ridge rule: 1e-6 * trace(Sigma) / D.
RxModel fit_rx_auto(const HsiCube& cube);
double default_ridge(const HsiCube& cube);

// Squared Mahalanobis distance to the background model.
double rx_score(const SpectralSignal& s, const RxModel& model);

// Per-pixel scores; OpenMP-parallel, thread-count independent.
ScoreMap rx_score_cube(const HsiCube& cube, const RxModel& model);

}  // namespace had
