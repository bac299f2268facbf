#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace had {

// Error categories. The CLI prints the category name as the first token of
// its single-line error output and maps each category to an exit code
// (2 usage, 3 data, 4 numerical).
enum class Errc {
  InvalidArgument,
  BadGrid,
  NonFinite,
  BadShape,
  EmptyCube,
  OutOfBounds,
  NegativeInput,
  DegenerateMass,
  BadProfile,
  NotIncreasing,
  TooFewSamples,
  InconsistentLength,
  DegenerateData,
  LengthMismatch,
  SingularCovariance,
  AllZeroAlphas,
  BadSpec,
  NoAnomalies,
  NoBackground,
  ShapeMismatch,
  ParseError,
  UnsupportedField,
  SizeMismatch,
  IoError,
};

const char* errc_name(Errc code);
int errc_exit_code(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

// Closed interval on the real line; the independent axis of every signal.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
};

// One pixel's spectrum: D samples interpreted as a piecewise-constant
// density on D uniform bins over `domain`.
struct SpectralSignal {
  std::vector<double> values;
  Interval domain{0.0, 1.0};

  std::size_t bands() const { return values.size(); }
  double bin_width() const {
    return domain.width() / static_cast<double>(values.size());
  }
  void validate() const;
};

// Image of rows*cols pixels with `bands` samples each. Storage is
// pixel-major: value (r, c, b) lives at ((r*cols + c)*bands + b).
struct HsiCube {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t bands = 0;
  std::vector<double> data;
  Interval band_domain{0.0, 1.0};
  std::map<std::string, std::string> metadata;

  std::size_t pixel_count() const { return rows * cols; }
  double& at(std::size_t r, std::size_t c, std::size_t b) {
    return data[(r * cols + c) * bands + b];
  }
  double at(std::size_t r, std::size_t c, std::size_t b) const {
    return data[(r * cols + c) * bands + b];
  }
  std::span<const double> pixel_span(std::size_t flat_index) const {
    return {data.data() + flat_index * bands, bands};
  }
};

// Canonical pixel order: row-major, r first.
inline std::size_t flatten_index(std::size_t cols, std::size_t r, std::size_t c) {
  return r * cols + c;
}
inline std::pair<std::size_t, std::size_t> unflatten_index(std::size_t cols,
                                                           std::size_t i) {
  return {i / cols, i % cols};
}

void validate_cube(const HsiCube& cube);
SpectralSignal pixel(const HsiCube& cube, std::size_t r, std::size_t c);

struct GroundTruthMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> labels;  // nonzero = anomaly

  bool at(std::size_t r, std::size_t c) const { return labels[r * cols + c] != 0; }
  std::size_t anomaly_count() const;
};

struct ScoreMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> scores;
  std::string detector_id;

  double at(std::size_t r, std::size_t c) const { return scores[r * cols + c]; }
};

void validate_scoremap(const ScoreMap& map);

// Row-major sample matrix: rows = samples, cols = features.
struct DataMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DataMatrix() = default;
  DataMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * cols, cols};
  }
  std::span<double> row(std::size_t i) {
    return {values.data() + i * cols, cols};
  }
};

// Builds a matrix from equally sized rows; throws InconsistentLength.
DataMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows);

}  // namespace had
