#include "had/subspace.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "had/parallel.hpp"
#include "had/scdt.hpp"

namespace had {

namespace {

double centered_value(const DataMatrix& data, std::span<const double> mean, std::size_t i,
                      std::size_t j) {
  const double v = data.at(i, j);
  return mean.empty() ? v : v - mean[j];
}

std::vector<double> column_means(const DataMatrix& data) {
  std::vector<double> mean(data.cols, 0.0);
  for (std::size_t i = 0; i < data.rows; ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < data.cols; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(data.rows);
  return mean;
}

}  // namespace

std::vector<double> scatter_matrix(const DataMatrix& data, std::span<const double> mean) {
  const std::size_t n = data.rows;
  const std::size_t f = data.cols;
  require(mean.empty() || mean.size() == f, Errc::LengthMismatch,
          "mean length does not match feature count");
  std::vector<double> scatter(f * f, 0.0);

  const std::ptrdiff_t fcount = static_cast<std::ptrdiff_t>(f);
#pragma omp parallel for num_threads(par::thread_count()) schedule(static)
  for (std::ptrdiff_t jj = 0; jj < fcount; ++jj) {
    const std::size_t j = static_cast<std::size_t>(jj);
    std::vector<double> acc(j + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double vj = centered_value(data, mean, i, j);
      const auto row = data.row(i);
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

  const std::ptrdiff_t ncount = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(par::thread_count()) schedule(static)
  for (std::ptrdiff_t aa = 0; aa < ncount; ++aa) {
    const std::size_t a = static_cast<std::size_t>(aa);
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

namespace {

struct EigenPairs {
  std::vector<double> eigenvalues;       // descending, clamped to >= 0
  Eigen::MatrixXd eigenvectors;          // column t pairs with eigenvalues[t]
};

EigenPairs symmetric_eigen_descending(const std::vector<double>& matrix, std::size_t dim) {
  Eigen::MatrixXd m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = matrix[i * dim + j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  require(solver.info() == Eigen::Success, Errc::DegenerateData,
          "eigendecomposition failed");
  EigenPairs out;
  out.eigenvalues.resize(dim);
  out.eigenvectors.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t t = 0; t < dim; ++t) {
    const Eigen::Index src = static_cast<Eigen::Index>(dim - 1 - t);
    out.eigenvalues[t] = std::max(solver.eigenvalues()(src), 0.0);
    out.eigenvectors.col(static_cast<Eigen::Index>(t)) = solver.eigenvectors().col(src);
  }
  return out;
}

std::size_t select_dimension(const std::vector<double>& energies, double threshold) {
  double total = 0.0;
  for (double e : energies) total += e;
  double cum = 0.0;
  for (std::size_t k = 0; k < energies.size(); ++k) {
    cum += energies[k];
    if (cum >= threshold * total) return k + 1;
  }
  return energies.size();
}

}  // namespace

BackgroundSubspace fit_subspace(const DataMatrix& data, const SubspaceOptions& options) {
  const std::size_t n = data.rows;
  const std::size_t f = data.cols;
  require(n >= 2, Errc::TooFewSamples,
          "need at least 2 samples, got " + std::to_string(n));
  require(f >= 1, Errc::BadShape, "empty feature vectors");
  require(options.energy_threshold > 0.0 && options.energy_threshold <= 1.0,
          Errc::InvalidArgument, "energy threshold must lie in (0, 1]");

  double max_abs = 0.0;
  for (double v : data.values) max_abs = std::max(max_abs, std::abs(v));
  require(max_abs > 0.0, Errc::DegenerateData, "all-zero sample matrix");

  BackgroundSubspace model;
  model.energy_threshold = options.energy_threshold;
  if (options.centered) model.mean = column_means(data);
  const std::span<const double> mean{model.mean};

  const std::size_t rank_bound = std::min(n, f);
  if (f <= n) {
    const EigenPairs pairs = symmetric_eigen_descending(scatter_matrix(data, mean), f);
    model.singular_values.resize(rank_bound);
    for (std::size_t t = 0; t < rank_bound; ++t) {
      model.singular_values[t] = std::sqrt(pairs.eigenvalues[t]);
    }
    const std::vector<double> energies(pairs.eigenvalues.begin(),
                                       pairs.eigenvalues.begin() +
                                           static_cast<std::ptrdiff_t>(rank_bound));
    model.dimension = select_dimension(energies, options.energy_threshold);
    model.basis = DataMatrix(model.dimension, f);
    for (std::size_t t = 0; t < model.dimension; ++t) {
      for (std::size_t j = 0; j < f; ++j) {
        model.basis.at(t, j) = pairs.eigenvectors(static_cast<Eigen::Index>(j),
                                                  static_cast<Eigen::Index>(t));
      }
    }
  } else {
    const EigenPairs pairs = symmetric_eigen_descending(gram_matrix(data, mean), n);
    model.singular_values.resize(rank_bound);
    for (std::size_t t = 0; t < rank_bound; ++t) {
      model.singular_values[t] = std::sqrt(pairs.eigenvalues[t]);
    }
    const std::vector<double> energies(pairs.eigenvalues.begin(),
                                       pairs.eigenvalues.begin() +
                                           static_cast<std::ptrdiff_t>(rank_bound));
    model.dimension = select_dimension(energies, options.energy_threshold);
    // Feature-space directions from sample-space eigenvectors: b = A^T u / s,
    // re-orthonormalized to hold the basis invariant tightly.
    model.basis = DataMatrix(model.dimension, f);
    for (std::size_t t = 0; t < model.dimension; ++t) {
      const double sigma = model.singular_values[t];
      require(sigma > 0.0, Errc::DegenerateData,
              "zero singular value inside the selected subspace");
      auto brow = model.basis.row(t);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = pairs.eigenvectors(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(t)) /
                         sigma;
        const auto arow = data.row(i);
        if (mean.empty()) {
          for (std::size_t j = 0; j < f; ++j) brow[j] += arow[j] * u;
        } else {
          for (std::size_t j = 0; j < f; ++j) brow[j] += (arow[j] - mean[j]) * u;
        }
      }
    }
    for (std::size_t t = 0; t < model.dimension; ++t) {
      auto bt = model.basis.row(t);
      for (std::size_t l = 0; l < t; ++l) {
        const auto bl = model.basis.row(l);
        double dot = 0.0;
        for (std::size_t j = 0; j < f; ++j) dot += bt[j] * bl[j];
        for (std::size_t j = 0; j < f; ++j) bt[j] -= dot * bl[j];
      }
      double norm2 = 0.0;
      for (std::size_t j = 0; j < f; ++j) norm2 += bt[j] * bt[j];
      require(norm2 > 0.0, Errc::DegenerateData, "degenerate basis vector");
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t j = 0; j < f; ++j) bt[j] *= inv;
    }
  }
  return model;
}

double anomaly_score(std::span<const double> v, const BackgroundSubspace& model) {
  const std::size_t f = model.feature_count();
  require(v.size() == f, Errc::LengthMismatch,
          "vector length " + std::to_string(v.size()) + " does not match basis rows " +
              std::to_string(f));
  const bool centered = !model.mean.empty();
  double norm2 = 0.0;
  for (std::size_t j = 0; j < f; ++j) {
    const double x = centered ? v[j] - model.mean[j] : v[j];
    norm2 += x * x;
  }
  double proj2 = 0.0;
  for (std::size_t t = 0; t < model.dimension; ++t) {
    const auto b = model.basis.row(t);
    double dot = 0.0;
    if (centered) {
      for (std::size_t j = 0; j < f; ++j) dot += (v[j] - model.mean[j]) * b[j];
    } else {
      for (std::size_t j = 0; j < f; ++j) dot += v[j] * b[j];
    }
    proj2 += dot * dot;
  }
  return std::max(norm2 - proj2, 0.0);
}

std::vector<double> subspace_scores(const DataMatrix& data, const BackgroundSubspace& model) {
  require(data.cols == model.feature_count(), Errc::LengthMismatch,
          "sample width does not match basis rows");
  std::vector<double> scores(data.rows, 0.0);
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(data.rows);
#pragma omp parallel for num_threads(par::thread_count()) schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    scores[static_cast<std::size_t>(i)] =
        anomaly_score(data.row(static_cast<std::size_t>(i)), model);
  }
  return scores;
}

ScdtDetectorResult score_cube(const HsiCube& cube, const ScdtDetectorOptions& options) {
  validate_cube(cube);
  const std::size_t grid = options.grid_size ? options.grid_size : 2 * cube.bands;
  const DataMatrix data = transform_cube(cube, grid, options.mass_weight);

  SubspaceOptions fit_options;
  fit_options.energy_threshold = options.energy_threshold;
  fit_options.centered = options.centered;

  ScdtDetectorResult result;
  result.grid_size = grid;
  result.model = fit_subspace(data, fit_options);
  result.scores.rows = cube.rows;
  result.scores.cols = cube.cols;
  result.scores.detector_id = "scdt";
  result.scores.scores = subspace_scores(data, result.model);
  return result;
}

}  // namespace had
