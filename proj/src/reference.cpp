#include "had/reference.hpp"

#include <algorithm>
#include <cmath>

#include "had/scdt.hpp"

namespace had::ref {

DataMatrix transform_cube(const HsiCube& cube, std::size_t grid_size, double mass_weight) {
  require(grid_size >= 2, Errc::BadGrid, "quantile grid needs at least 2 points");
  validate_cube(cube);
  const std::size_t n = cube.pixel_count();
  DataMatrix out(n, ScdtVector::flat_length(grid_size));
  for (std::size_t i = 0; i < n; ++i) {
    SpectralSignal s;
    s.domain = cube.band_domain;
    const auto span = cube.pixel_span(i);
    s.values.assign(span.begin(), span.end());
    const ScdtVector v = scdt_forward(s, grid_size);
    v.flatten_into(out.row(i), mass_weight);
  }
  return out;
}

std::vector<double> scatter_matrix(const DataMatrix& data, std::span<const double> mean) {
  const std::size_t n = data.rows;
  const std::size_t f = data.cols;
  require(mean.empty() || mean.size() == f, Errc::LengthMismatch,
          "mean length does not match feature count");
  std::vector<double> scatter(f * f, 0.0);
  for (std::size_t j = 0; j < f; ++j) {
    std::vector<double> acc(j + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = data.row(i);
      const double vj = mean.empty() ? row[j] : row[j] - mean[j];
      if (mean.empty()) {
        for (std::size_t k = 0; k <= j; ++k) acc[k] += row[k] * vj;
      } else {
        for (std::size_t k = 0; k <= j; ++k) acc[k] += (row[k] - mean[k]) * vj;
      }
    }
    for (std::size_t k = 0; k <= j; ++k) {
      scatter[k * f + j] = acc[k];
      scatter[j * f + k] = acc[k];
    }
  }
  return scatter;
}

std::vector<double> gram_matrix(const DataMatrix& data, std::span<const double> mean) {
  const std::size_t n = data.rows;
  const std::size_t f = data.cols;
  require(mean.empty() || mean.size() == f, Errc::LengthMismatch,
          "mean length does not match feature count");
  std::vector<double> gram(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    const auto ra = data.row(a);
    for (std::size_t b = 0; b <= a; ++b) {
      const auto rb = data.row(b);
      double dot = 0.0;
      if (mean.empty()) {
        for (std::size_t j = 0; j < f; ++j) dot += ra[j] * rb[j];
      } else {
        for (std::size_t j = 0; j < f; ++j) dot += (ra[j] - mean[j]) * (rb[j] - mean[j]);
      }
      gram[a * n + b] = dot;
      gram[b * n + a] = dot;
    }
  }
  return gram;
}

std::vector<double> subspace_scores(const DataMatrix& data, const BackgroundSubspace& model) {
  require(data.cols == model.feature_count(), Errc::LengthMismatch,
          "sample width does not match basis rows");
  std::vector<double> scores(data.rows, 0.0);
  for (std::size_t i = 0; i < data.rows; ++i) {
    scores[i] = anomaly_score(data.row(i), model);
  }
  return scores;
}

ScoreMap rx_score_cube(const HsiCube& cube, const RxModel& model) {
  validate_cube(cube);
  require(cube.bands == model.bands(), Errc::LengthMismatch,
          "cube bands do not match model");
  ScoreMap map;
  map.rows = cube.rows;
  map.cols = cube.cols;
  map.detector_id = "rx";
  map.scores.assign(cube.pixel_count(), 0.0);
  for (std::size_t i = 0; i < cube.pixel_count(); ++i) {
    SpectralSignal s;
    s.domain = cube.band_domain;
    const auto span = cube.pixel_span(i);
    s.values.assign(span.begin(), span.end());
    map.scores[i] = rx_score(s, model);
  }
  return map;
}

}  // namespace had::ref
