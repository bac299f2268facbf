#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "had/eval.hpp"
#include "had/types.hpp"

namespace had::io {

// Supported ENVI subset: BSQ/BIL/BIP interleaves, data types 2 (int16),
// 4 (float32), 5 (float64), both byte orders, uncompressed.
struct EnviHeader {
  enum class Interleave { Bsq, Bil, Bip };
  std::size_t samples = 0;  // columns
  std::size_t lines = 0;    // rows
  std::size_t bands = 0;
  Interleave interleave = Interleave::Bsq;
  int data_type = 4;
  int byte_order = 0;  // 0 little, 1 big
  std::size_t header_offset = 0;
};

EnviHeader parse_envi_header(const std::filesystem::path& header_path);
HsiCube read_envi(const std::filesystem::path& header_path,
                  const std::filesystem::path& data_path);

// New cube with only the listed bands, in list order.
HsiCube select_bands(const HsiCube& cube, std::span<const std::size_t> keep);

// Portable two-file container: JSON sidecar plus a raw little-endian f64
// payload in canonical flattened-pixel order. The payload lives next to
// the sidecar under the name recorded in its "payload" field.
void write_cube(const HsiCube& cube, const std::filesystem::path& sidecar_path);
HsiCube read_cube(const std::filesystem::path& sidecar_path);

// Masks: binary P5 PGM (maxval <= 255, nonzero = anomaly) or a portable
// container with a single band.
GroundTruthMask read_mask(const std::filesystem::path& path);
void write_mask(const GroundTruthMask& mask, const std::filesystem::path& pgm_path);

enum class ScoreMapFormat { Csv, Pgm16, Portable };
void write_scoremap(const ScoreMap& map, const std::filesystem::path& path,
                    ScoreMapFormat format);
ScoreMap read_scoremap(const std::filesystem::path& sidecar_path);

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);

// All writers go through a temp file in the destination directory followed
// by an atomic rename, so failures never leave partial outputs.
void atomic_write_bytes(const std::filesystem::path& path, const void* data,
                        std::size_t size);
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace had::io
