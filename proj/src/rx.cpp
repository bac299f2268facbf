#include "had/rx.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "had/parallel.hpp"

namespace had {

namespace {

std::vector<double> pixel_mean(const HsiCube& cube) {
  const std::size_t n = cube.pixel_count();
  const std::size_t d = cube.bands;
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto px = cube.pixel_span(i);
    for (std::size_t b = 0; b < d; ++b) mean[b] += px[b];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  return mean;
}

// Sample covariance with divisor N-1; parallel over entries, each summed
// over pixels in index order so the result is thread-count independent.
std::vector<double> sample_covariance(const HsiCube& cube, const std::vector<double>& mean) {
  const std::size_t n = cube.pixel_count();
  const std::size_t d = cube.bands;
  std::vector<double> cov(d * d, 0.0);
  const std::ptrdiff_t dcount = static_cast<std::ptrdiff_t>(d);
#pragma omp parallel for num_threads(par::thread_count()) schedule(static)
  for (std::ptrdiff_t jj = 0; jj < dcount; ++jj) {
    const std::size_t j = static_cast<std::size_t>(jj);
    std::vector<double> acc(j + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto px = cube.pixel_span(i);
      const double vj = px[j] - mean[j];
      for (std::size_t k = 0; k <= j; ++k) acc[k] += (px[k] - mean[k]) * vj;
    }
    const double divisor = static_cast<double>(n - 1);
    for (std::size_t k = 0; k <= j; ++k) {
      cov[k * d + j] = acc[k] / divisor;
      cov[j * d + k] = acc[k] / divisor;
    }
  }
  return cov;
}

RxModel fit_from_covariance(const HsiCube& cube, std::vector<double> mean,
                            std::vector<double> cov, double ridge) {
  const std::size_t d = cube.bands;
  for (std::size_t b = 0; b < d; ++b) cov[b * d + b] += ridge;

  Eigen::MatrixXd sigma(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov[i * d + j];
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  require(llt.info() == Eigen::Success, Errc::SingularCovariance,
          "covariance not positive-definite after ridge " + std::to_string(ridge));
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  inv = 0.5 * (inv + inv.transpose()).eval();

  RxModel model;
  model.mean = std::move(mean);
  model.ridge = ridge;
  model.covariance_inverse.resize(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      model.covariance_inverse[i * d + j] =
          inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return model;
}

}  // namespace

RxModel fit_rx(const HsiCube& cube, double ridge) {
  validate_cube(cube);
  require(ridge >= 0.0, Errc::InvalidArgument, "ridge must be non-negative");
  require(cube.pixel_count() >= 2, Errc::TooFewSamples,
          "covariance needs at least 2 pixels");
  std::vector<double> mean = pixel_mean(cube);
  std::vector<double> cov = sample_covariance(cube, mean);
  return fit_from_covariance(cube, std::move(mean), std::move(cov), ridge);
}

double default_ridge(const HsiCube& cube) {
  validate_cube(cube);
  require(cube.pixel_count() >= 2, Errc::TooFewSamples,
          "covariance needs at least 2 pixels");
  const std::vector<double> mean = pixel_mean(cube);
  const std::vector<double> cov = sample_covariance(cube, mean);
  double trace = 0.0;
  for (std::size_t b = 0; b < cube.bands; ++b) trace += cov[b * cube.bands + b];
  return 1e-6 * trace / static_cast<double>(cube.bands);
}

RxModel fit_rx_auto(const HsiCube& cube) {
  validate_cube(cube);
  require(cube.pixel_count() >= 2, Errc::TooFewSamples,
          "covariance needs at least 2 pixels");
  std::vector<double> mean = pixel_mean(cube);
  std::vector<double> cov = sample_covariance(cube, mean);
  double trace = 0.0;
  for (std::size_t b = 0; b < cube.bands; ++b) trace += cov[b * cube.bands + b];
  const double ridge = 1e-6 * trace / static_cast<double>(cube.bands);
  return fit_from_covariance(cube, std::move(mean), std::move(cov), ridge);
}

namespace {

double mahalanobis_sq(std::span<const double> values, const RxModel& model) {
  const std::size_t d = model.bands();
  double score = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double vi = values[i] - model.mean[i];
    double dot = 0.0;
    const double* row = model.covariance_inverse.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) dot += row[j] * (values[j] - model.mean[j]);
    score += vi * dot;
  }
  return std::max(score, 0.0);
}

}  // namespace

double rx_score(const SpectralSignal& s, const RxModel& model) {
  require(s.values.size() == model.bands(), Errc::LengthMismatch,
          "signal length " + std::to_string(s.values.size()) + " does not match model " +
              std::to_string(model.bands()));
  return mahalanobis_sq(s.values, model);
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
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(cube.pixel_count());
#pragma omp parallel for num_threads(par::thread_count()) schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    map.scores[static_cast<std::size_t>(i)] =
        mahalanobis_sq(cube.pixel_span(static_cast<std::size_t>(i)), model);
  }
  return map;
}

}  // namespace had
