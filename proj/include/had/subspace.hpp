#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "had/types.hpp"

namespace had {

struct SubspaceOptions {
  // Smallest k whose leading squared-singular-value energy reaches this
  // fraction of the total is kept.
  double energy_threshold = 0.9999;
  // Comparison mode only: subtract the sample mean before the
  // decomposition and before scoring. The default projects raw vectors
  // through the origin, matching the reconstruction-error score.
  bool centered = false;
};

struct BackgroundSubspace {
  // k x F row-major; row i is the i-th orthonormal basis vector.
  DataMatrix basis;
  std::size_t dimension = 0;
  // All min(N, F) singular values, non-increasing; kept for diagnostics.
  std::vector<double> singular_values;
  double energy_threshold = 0.9999;
  // Empty when uncentered.
  std::vector<double> mean;

  std::size_t feature_count() const { return basis.cols; }
};

// Deterministic scatter A^T A of the (optionally centered) sample matrix.
// Parallel over output entries; each entry is summed over samples in index
// order by a single thread, so the result is thread-count independent.
std::vector<double> scatter_matrix(const DataMatrix& data,
                                   std::span<const double> mean = {});

// Deterministic Gram matrix A A^T, used when features outnumber samples.
std::vector<double> gram_matrix(const DataMatrix& data,
                                std::span<const double> mean = {});

// Uncentered (by default) principal subspace of the sample rows.
BackgroundSubspace fit_subspace(const DataMatrix& data, const SubspaceOptions& options = {});

// Squared distance to the subspace: ||v||^2 - ||B v||^2, clamped to >= 0.
double anomaly_score(std::span<const double> v, const BackgroundSubspace& model);

// Per-row scores; OpenMP-parallel, thread-count independent.
std::vector<double> subspace_scores(const DataMatrix& data, const BackgroundSubspace& model);

struct ScdtDetectorOptions {
  std::size_t grid_size = 0;  // 0 = twice the band count
  double energy_threshold = 0.9999;
  double mass_weight = 1.0;
  bool centered = false;
};

struct ScdtDetectorResult {
  ScoreMap scores;
  BackgroundSubspace model;
  std::size_t grid_size = 0;
};

// Full pipeline: per-pixel transform, subspace fit on all pixels
// (anomalies included), reconstruction-error score per pixel.
ScdtDetectorResult score_cube(const HsiCube& cube, const ScdtDetectorOptions& options = {});

}  // namespace had
