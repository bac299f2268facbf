#include "had/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace had {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::BadGrid: return "BadGrid";
    case Errc::NonFinite: return "NonFinite";
    case Errc::BadShape: return "BadShape";
    case Errc::EmptyCube: return "EmptyCube";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::NegativeInput: return "NegativeInput";
    case Errc::DegenerateMass: return "DegenerateMass";
    case Errc::BadProfile: return "BadProfile";
    case Errc::NotIncreasing: return "NotIncreasing";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::InconsistentLength: return "InconsistentLength";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::SingularCovariance: return "SingularCovariance";
    case Errc::AllZeroAlphas: return "AllZeroAlphas";
    case Errc::BadSpec: return "BadSpec";
    case Errc::NoAnomalies: return "NoAnomalies";
    case Errc::NoBackground: return "NoBackground";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::UnsupportedField: return "UnsupportedField";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::IoError: return "IoError";
  }
  return "Error";
}

int errc_exit_code(Errc code) {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::BadGrid:
      return 2;
    case Errc::DegenerateMass:
    case Errc::DegenerateData:
    case Errc::TooFewSamples:
    case Errc::SingularCovariance:
    case Errc::AllZeroAlphas:
      return 4;
    default:
      return 3;
  }
}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

void SpectralSignal::validate() const {
  require(values.size() >= 2, Errc::BadShape,
          "signal needs at least 2 samples, got " + std::to_string(values.size()));
  require(domain.width() > 0.0, Errc::BadShape, "signal domain has non-positive width");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(Errc::NonFinite, "signal value at band " + std::to_string(i));
    }
  }
}

void validate_cube(const HsiCube& cube) {
  require(cube.rows >= 1 && cube.cols >= 1, Errc::EmptyCube,
          "cube has no pixels (rows=" + std::to_string(cube.rows) +
              ", cols=" + std::to_string(cube.cols) + ")");
  require(cube.bands >= 2, Errc::BadShape,
          "cube needs at least 2 bands, got " + std::to_string(cube.bands));
  require(cube.data.size() == cube.rows * cube.cols * cube.bands, Errc::BadShape,
          "cube data length " + std::to_string(cube.data.size()) + " does not match " +
              std::to_string(cube.rows * cube.cols * cube.bands));
  require(cube.band_domain.width() > 0.0, Errc::BadShape,
          "band domain has non-positive width");
  for (std::size_t r = 0; r < cube.rows; ++r) {
    for (std::size_t c = 0; c < cube.cols; ++c) {
      for (std::size_t b = 0; b < cube.bands; ++b) {
        if (!std::isfinite(cube.at(r, c, b))) {
          std::ostringstream msg;
          msg << "cube value at (r=" << r << ", c=" << c << ", band=" << b << ")";
          fail(Errc::NonFinite, msg.str());
        }
      }
    }
  }
}

SpectralSignal pixel(const HsiCube& cube, std::size_t r, std::size_t c) {
  require(r < cube.rows && c < cube.cols, Errc::OutOfBounds,
          "pixel (" + std::to_string(r) + ", " + std::to_string(c) + ") outside " +
              std::to_string(cube.rows) + "x" + std::to_string(cube.cols));
  SpectralSignal s;
  s.domain = cube.band_domain;
  auto span = cube.pixel_span(flatten_index(cube.cols, r, c));
  s.values.assign(span.begin(), span.end());
  return s;
}

std::size_t GroundTruthMask::anomaly_count() const {
  std::size_t n = 0;
  for (auto v : labels) n += (v != 0);
  return n;
}

void validate_scoremap(const ScoreMap& map) {
  require(map.rows >= 1 && map.cols >= 1, Errc::EmptyCube, "score map has no pixels");
  require(map.scores.size() == map.rows * map.cols, Errc::BadShape,
          "score count does not match map shape");
  for (std::size_t i = 0; i < map.scores.size(); ++i) {
    if (!std::isfinite(map.scores[i])) {
      fail(Errc::NonFinite, "score at flat index " + std::to_string(i));
    }
    if (map.scores[i] < 0.0) {
      fail(Errc::InvalidArgument, "negative score at flat index " + std::to_string(i));
    }
  }
}

DataMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  require(!rows.empty(), Errc::TooFewSamples, "no rows given");
  DataMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == m.cols, Errc::InconsistentLength,
            "row " + std::to_string(i) + " has length " + std::to_string(rows[i].size()) +
                ", expected " + std::to_string(m.cols));
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

}  // namespace had
