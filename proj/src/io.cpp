#include "had/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace had::io {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// --- little/big-endian scalar codecs -------------------------------------

std::uint64_t load_u64(const unsigned char* p, bool big_endian) {
  std::uint64_t v = 0;
  if (big_endian) {
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  } else {
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  }
  return v;
}

std::uint32_t load_u32(const unsigned char* p, bool big_endian) {
  std::uint32_t v = 0;
  if (big_endian) {
    for (int i = 0; i < 4; ++i) v = (v << 8) | p[i];
  } else {
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  }
  return v;
}

std::uint16_t load_u16(const unsigned char* p, bool big_endian) {
  return big_endian ? static_cast<std::uint16_t>((p[0] << 8) | p[1])
                    : static_cast<std::uint16_t>((p[1] << 8) | p[0]);
}

void store_u64_le(unsigned char* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

double load_f64(const unsigned char* p, bool big_endian) {
  return std::bit_cast<double>(load_u64(p, big_endian));
}

float load_f32(const unsigned char* p, bool big_endian) {
  return std::bit_cast<float>(load_u32(p, big_endian));
}

// --- raw file helpers -----------------------------------------------------

std::vector<unsigned char> read_binary_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoError, "cannot open '" + path.string() + "'");
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  require(size >= 0, Errc::IoError, "cannot stat '" + path.string() + "'");
  std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
  in.seekg(0, std::ios::beg);
  if (!bytes.empty()) {
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  require(in.good() || in.eof(), Errc::IoError, "short read from '" + path.string() + "'");
  return bytes;
}

fs::path payload_path_for(const fs::path& sidecar, const std::string& payload_name) {
  return sidecar.parent_path() / payload_name;
}

std::string default_payload_name(const fs::path& sidecar) {
  return sidecar.stem().string() + ".bin";
}

std::vector<unsigned char> encode_payload(std::span<const double> values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    store_u64_le(bytes.data() + i * 8, std::bit_cast<std::uint64_t>(values[i]));
  }
  return bytes;
}

void decode_payload(const std::vector<unsigned char>& bytes, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = load_f64(bytes.data() + i * 8, false);
  }
}

ordered_json parse_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::ParseError, "'" + path.string() + "': " + e.what());
  }
}

struct SidecarInfo {
  std::string kind;
  std::size_t rows = 0, cols = 0, bands = 0;
  Interval band_domain{0.0, 1.0};
  bool has_domain = false;
  std::map<std::string, std::string> metadata;
  fs::path payload;
};

SidecarInfo parse_sidecar(const fs::path& sidecar_path) {
  const ordered_json j = parse_json_file(sidecar_path);
  require(j.is_object(), Errc::ParseError, "sidecar must be a JSON object");
  for (const char* key : {"kind", "rows", "cols", "bands", "dtype", "order", "endianness",
                          "payload"}) {
    require(j.contains(key), Errc::ParseError,
            "sidecar missing field '" + std::string(key) + "'");
  }
  SidecarInfo info;
  info.kind = j.at("kind").get<std::string>();
  info.rows = j.at("rows").get<std::size_t>();
  info.cols = j.at("cols").get<std::size_t>();
  info.bands = j.at("bands").get<std::size_t>();
  const std::string dtype = j.at("dtype").get<std::string>();
  require(dtype == "f64", Errc::UnsupportedField, "dtype '" + dtype + "'");
  const std::string order = j.at("order").get<std::string>();
  require(order == "band-interleaved-by-pixel", Errc::UnsupportedField,
          "order '" + order + "'");
  const std::string endianness = j.at("endianness").get<std::string>();
  require(endianness == "little", Errc::UnsupportedField, "endianness '" + endianness + "'");
  if (j.contains("band_domain")) {
    const auto& d = j.at("band_domain");
    require(d.is_array() && d.size() == 2, Errc::ParseError, "band_domain must be [lo, hi]");
    info.band_domain = {d[0].get<double>(), d[1].get<double>()};
    info.has_domain = true;
  }
  if (j.contains("metadata")) {
    for (const auto& item : j.at("metadata").items()) {
      info.metadata[item.key()] = item.value().get<std::string>();
    }
  }
  info.payload = payload_path_for(sidecar_path, j.at("payload").get<std::string>());
  return info;
}

std::vector<double> read_payload(const SidecarInfo& info) {
  const std::size_t expected = info.rows * info.cols * info.bands * 8;
  const std::vector<unsigned char> bytes = read_binary_file(info.payload);
  require(bytes.size() == expected, Errc::SizeMismatch,
          "payload '" + info.payload.string() + "' is " + std::to_string(bytes.size()) +
              " bytes, expected " + std::to_string(expected));
  std::vector<double> values(info.rows * info.cols * info.bands);
  decode_payload(bytes, values);
  return values;
}

void write_sidecar_and_payload(const fs::path& sidecar_path, const std::string& kind,
                               std::size_t rows, std::size_t cols, std::size_t bands,
                               const Interval* band_domain,
                               const std::map<std::string, std::string>& metadata,
                               std::span<const double> values) {
  const std::string payload_name = default_payload_name(sidecar_path);
  const std::vector<unsigned char> bytes = encode_payload(values);
  atomic_write_bytes(payload_path_for(sidecar_path, payload_name), bytes.data(),
                     bytes.size());

  ordered_json j;
  j["kind"] = kind;
  j["rows"] = rows;
  j["cols"] = cols;
  j["bands"] = bands;
  j["dtype"] = "f64";
  j["order"] = "band-interleaved-by-pixel";
  j["endianness"] = "little";
  j["payload"] = payload_name;
  if (band_domain) j["band_domain"] = {band_domain->lo, band_domain->hi};
  if (!metadata.empty()) {
    ordered_json m;
    for (const auto& [k, v] : metadata) m[k] = v;
    j["metadata"] = m;
  }
  atomic_write_text(sidecar_path, j.dump(2) + "\n");
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream out;
  out << in.rdbuf();
  require(in.good() || in.eof(), Errc::IoError, "short read from '" + path.string() + "'");
  return out.str();
}

void atomic_write_bytes(const fs::path& path, const void* data, std::size_t size) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), Errc::IoError, "cannot create '" + tmp.string() + "'");
    if (size > 0) out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    require(out.good(), Errc::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(Errc::IoError, "cannot move temp file onto '" + path.string() + "'");
  }
}

void atomic_write_text(const fs::path& path, const std::string& text) {
  atomic_write_bytes(path, text.data(), text.size());
}

// --- ENVI -----------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::size_t parse_size_field(const std::string& value, const std::string& key,
                             std::size_t line_no) {
  try {
    const long long v = std::stoll(trim(value));
    require(v > 0, Errc::ParseError,
            "line " + std::to_string(line_no) + ": " + key + " must be positive, got " +
                std::to_string(v));
    return static_cast<std::size_t>(v);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Errc::ParseError,
         "line " + std::to_string(line_no) + ": cannot parse " + key + " = '" + value + "'");
  }
}

std::size_t envi_sample_bytes(int data_type) {
  switch (data_type) {
    case 2: return 2;   // int16
    case 4: return 4;   // float32
    case 5: return 8;   // float64
    default:
      fail(Errc::UnsupportedField, "data type " + std::to_string(data_type));
  }
}

}  // namespace

EnviHeader parse_envi_header(const fs::path& header_path) {
  std::ifstream in(header_path);
  require(in.good(), Errc::IoError, "cannot open '" + header_path.string() + "'");

  EnviHeader header;
  bool have_samples = false, have_lines = false, have_bands = false, have_interleave = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    if (line_no == 1 && lower(stripped) == "envi") continue;

    const std::size_t eq = stripped.find('=');
    require(eq != std::string::npos, Errc::ParseError,
            "line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = lower(trim(stripped.substr(0, eq)));
    std::string value = trim(stripped.substr(eq + 1));

    // Braced values (band names, wavelengths, ...) may span lines; consume
    // to the closing brace. None of the supported keys use braces.
    if (!value.empty() && value.front() == '{') {
      while (value.find('}') == std::string::npos) {
        std::string more;
        require(static_cast<bool>(std::getline(in, more)), Errc::ParseError,
                "line " + std::to_string(line_no) + ": unterminated '{' for key '" + key + "'");
        ++line_no;
        value += more;
      }
      continue;
    }

    if (key == "samples") {
      header.samples = parse_size_field(value, key, line_no);
      have_samples = true;
    } else if (key == "lines") {
      header.lines = parse_size_field(value, key, line_no);
      have_lines = true;
    } else if (key == "bands") {
      header.bands = parse_size_field(value, key, line_no);
      have_bands = true;
    } else if (key == "data type") {
      header.data_type = static_cast<int>(parse_size_field(value, key, line_no));
      envi_sample_bytes(header.data_type);
    } else if (key == "interleave") {
      const std::string v = lower(value);
      if (v == "bsq") {
        header.interleave = EnviHeader::Interleave::Bsq;
      } else if (v == "bil") {
        header.interleave = EnviHeader::Interleave::Bil;
      } else if (v == "bip") {
        header.interleave = EnviHeader::Interleave::Bip;
      } else {
        fail(Errc::UnsupportedField, "interleave '" + value + "'");
      }
      have_interleave = true;
    } else if (key == "byte order") {
      const std::string v = trim(value);
      require(v == "0" || v == "1", Errc::UnsupportedField, "byte order '" + value + "'");
      header.byte_order = v == "1" ? 1 : 0;
    } else if (key == "header offset") {
      try {
        const long long v = std::stoll(trim(value));
        require(v >= 0, Errc::ParseError,
                "line " + std::to_string(line_no) + ": header offset must be >= 0");
        header.header_offset = static_cast<std::size_t>(v);
      } catch (const Error&) {
        throw;
      } catch (const std::exception&) {
        fail(Errc::ParseError,
             "line " + std::to_string(line_no) + ": cannot parse header offset");
      }
    } else if (key == "file compression") {
      require(trim(value) == "0", Errc::UnsupportedField, "compressed ENVI payloads");
    }
    // all other keys are ignored
  }

  require(have_samples, Errc::ParseError, "header missing 'samples'");
  require(have_lines, Errc::ParseError, "header missing 'lines'");
  require(have_bands, Errc::ParseError, "header missing 'bands'");
  require(have_interleave, Errc::ParseError, "header missing 'interleave'");
  return header;
}

HsiCube read_envi(const fs::path& header_path, const fs::path& data_path) {
  const EnviHeader header = parse_envi_header(header_path);
  const std::size_t rows = header.lines;
  const std::size_t cols = header.samples;
  const std::size_t bands = header.bands;
  const std::size_t sample_bytes = envi_sample_bytes(header.data_type);
  const std::size_t expected = header.header_offset + rows * cols * bands * sample_bytes;

  const std::vector<unsigned char> bytes = read_binary_file(data_path);
  require(bytes.size() == expected, Errc::SizeMismatch,
          "data file '" + data_path.string() + "' is " + std::to_string(bytes.size()) +
              " bytes, expected " + std::to_string(expected));
  const unsigned char* payload = bytes.data() + header.header_offset;
  const bool big = header.byte_order == 1;

  HsiCube cube;
  cube.rows = rows;
  cube.cols = cols;
  cube.bands = bands;
  cube.data.assign(rows * cols * bands, 0.0);
  cube.metadata["source"] = data_path.filename().string();

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t b = 0; b < bands; ++b) {
        std::size_t src;
        switch (header.interleave) {
          case EnviHeader::Interleave::Bsq: src = (b * rows + r) * cols + c; break;
          case EnviHeader::Interleave::Bil: src = (r * bands + b) * cols + c; break;
          default: src = (r * cols + c) * bands + b; break;
        }
        const unsigned char* p = payload + src * sample_bytes;
        double value;
        switch (header.data_type) {
          case 2: value = static_cast<double>(static_cast<std::int16_t>(load_u16(p, big))); break;
          case 4: value = static_cast<double>(load_f32(p, big)); break;
          default: value = load_f64(p, big); break;
        }
        cube.at(r, c, b) = value;
      }
    }
  }
  return cube;
}

HsiCube select_bands(const HsiCube& cube, std::span<const std::size_t> keep) {
  validate_cube(cube);
  require(!keep.empty(), Errc::InvalidArgument, "band keep-list is empty");
  for (std::size_t b : keep) {
    require(b < cube.bands, Errc::OutOfBounds,
            "band index " + std::to_string(b) + " >= " + std::to_string(cube.bands));
  }
  HsiCube out;
  out.rows = cube.rows;
  out.cols = cube.cols;
  out.bands = keep.size();
  out.band_domain = cube.band_domain;
  out.metadata = cube.metadata;
  out.data.resize(out.rows * out.cols * out.bands);
  for (std::size_t i = 0; i < cube.pixel_count(); ++i) {
    const auto src = cube.pixel_span(i);
    double* dst = out.data.data() + i * out.bands;
    for (std::size_t t = 0; t < keep.size(); ++t) dst[t] = src[keep[t]];
  }
  return out;
}

// --- portable containers ----------------------------------------------------

void write_cube(const HsiCube& cube, const fs::path& sidecar_path) {
  validate_cube(cube);
  write_sidecar_and_payload(sidecar_path, "cube", cube.rows, cube.cols, cube.bands,
                            &cube.band_domain, cube.metadata, cube.data);
}

HsiCube read_cube(const fs::path& sidecar_path) {
  const SidecarInfo info = parse_sidecar(sidecar_path);
  require(info.kind == "cube", Errc::UnsupportedField,
          "expected kind 'cube', got '" + info.kind + "'");
  HsiCube cube;
  cube.rows = info.rows;
  cube.cols = info.cols;
  cube.bands = info.bands;
  if (info.has_domain) cube.band_domain = info.band_domain;
  cube.metadata = info.metadata;
  cube.data = read_payload(info);
  return cube;
}

// --- masks ------------------------------------------------------------------

namespace {

struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t maxval = 0;
  std::vector<unsigned char> payload;
};

PgmImage parse_pgm(const fs::path& path) {
  const std::vector<unsigned char> bytes = read_binary_file(path);
  require(bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5', Errc::ParseError,
          "'" + path.string() + "' is not a binary P5 PGM");

  std::size_t pos = 2;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string token;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) {
      token.push_back(static_cast<char>(bytes[pos]));
      ++pos;
    }
    require(!token.empty(), Errc::ParseError, "'" + path.string() + "': truncated header");
    return token;
  };
  auto parse_number = [&](const char* what) -> std::size_t {
    const std::string token = next_token();
    try {
      const long long v = std::stoll(token);
      require(v > 0, Errc::ParseError,
              "'" + path.string() + "': " + what + " must be positive");
      return static_cast<std::size_t>(v);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(Errc::ParseError, "'" + path.string() + "': bad " + std::string(what));
    }
  };

  PgmImage img;
  img.width = parse_number("width");
  img.height = parse_number("height");
  img.maxval = parse_number("maxval");
  require(pos < bytes.size() && std::isspace(bytes[pos]), Errc::ParseError,
          "'" + path.string() + "': missing separator after maxval");
  ++pos;

  const std::size_t sample_bytes = img.maxval > 255 ? 2 : 1;
  const std::size_t expected = img.width * img.height * sample_bytes;
  require(bytes.size() - pos == expected, Errc::SizeMismatch,
          "'" + path.string() + "' payload is " + std::to_string(bytes.size() - pos) +
              " bytes, expected " + std::to_string(expected));
  img.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

}  // namespace

GroundTruthMask read_mask(const fs::path& path) {
  if (lower(path.extension().string()) == ".pgm") {
    const PgmImage img = parse_pgm(path);
    require(img.maxval <= 255, Errc::UnsupportedField,
            "mask PGM maxval " + std::to_string(img.maxval) + " (need 8-bit)");
    GroundTruthMask mask;
    mask.rows = img.height;
    mask.cols = img.width;
    mask.labels.resize(img.payload.size());
    for (std::size_t i = 0; i < img.payload.size(); ++i) {
      mask.labels[i] = img.payload[i] != 0 ? 1 : 0;
    }
    return mask;
  }

  const SidecarInfo info = parse_sidecar(path);
  require(info.bands == 1, Errc::UnsupportedField,
          "mask container must have 1 band, got " + std::to_string(info.bands));
  const std::vector<double> values = read_payload(info);
  GroundTruthMask mask;
  mask.rows = info.rows;
  mask.cols = info.cols;
  mask.labels.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) mask.labels[i] = values[i] != 0.0 ? 1 : 0;
  return mask;
}

void write_mask(const GroundTruthMask& mask, const fs::path& pgm_path) {
  require(mask.rows >= 1 && mask.cols >= 1, Errc::EmptyCube, "mask has no pixels");
  require(mask.labels.size() == mask.rows * mask.cols, Errc::BadShape,
          "mask label count mismatch");
  std::ostringstream header;
  header << "P5\n" << mask.cols << " " << mask.rows << "\n255\n";
  const std::string head = header.str();
  std::vector<unsigned char> bytes(head.begin(), head.end());
  for (auto label : mask.labels) bytes.push_back(label ? 255 : 0);
  atomic_write_bytes(pgm_path, bytes.data(), bytes.size());
}

// --- score maps ---------------------------------------------------------------

void write_scoremap(const ScoreMap& map, const fs::path& path, ScoreMapFormat format) {
  validate_scoremap(map);
  switch (format) {
    case ScoreMapFormat::Csv: {
      std::ostringstream out;
      out << "row,col,score\n";
      char buffer[64];
      for (std::size_t r = 0; r < map.rows; ++r) {
        for (std::size_t c = 0; c < map.cols; ++c) {
          std::snprintf(buffer, sizeof(buffer), "%.17g", map.at(r, c));
          out << r << "," << c << "," << buffer << "\n";
        }
      }
      atomic_write_text(path, out.str());
      return;
    }
    case ScoreMapFormat::Pgm16: {
      double lo = map.scores.front();
      double hi = lo;
      for (double v : map.scores) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double range = hi - lo;
      std::ostringstream header;
      header << "P5\n" << map.cols << " " << map.rows << "\n65535\n";
      const std::string head = header.str();
      std::vector<unsigned char> bytes(head.begin(), head.end());
      for (double v : map.scores) {
        const std::uint16_t q =
            range > 0.0
                ? static_cast<std::uint16_t>(std::lround((v - lo) / range * 65535.0))
                : 0;
        bytes.push_back(static_cast<unsigned char>(q >> 8));
        bytes.push_back(static_cast<unsigned char>(q & 0xFF));
      }
      atomic_write_bytes(path, bytes.data(), bytes.size());
      ordered_json sidecar;
      sidecar["min"] = lo;
      sidecar["max"] = hi;
      if (range <= 0.0) sidecar["note"] = "constant score map, image written as zeros";
      fs::path sidecar_path = path;
      sidecar_path += ".json";
      atomic_write_text(sidecar_path, sidecar.dump(2) + "\n");
      return;
    }
    case ScoreMapFormat::Portable: {
      std::map<std::string, std::string> metadata;
      metadata["detector_id"] = map.detector_id;
      write_sidecar_and_payload(path, "scoremap", map.rows, map.cols, 1, nullptr, metadata,
                                map.scores);
      return;
    }
  }
}

ScoreMap read_scoremap(const fs::path& sidecar_path) {
  const SidecarInfo info = parse_sidecar(sidecar_path);
  require(info.kind == "scoremap" || (info.kind == "cube" && info.bands == 1),
          Errc::UnsupportedField, "expected a single-band score container");
  require(info.bands == 1, Errc::UnsupportedField,
          "score container must have 1 band, got " + std::to_string(info.bands));
  ScoreMap map;
  map.rows = info.rows;
  map.cols = info.cols;
  map.scores = read_payload(info);
  const auto it = info.metadata.find("detector_id");
  map.detector_id = it != info.metadata.end() ? it->second : "unknown";
  return map;
}

void write_roc_csv(const RocCurve& curve, const fs::path& path) {
  std::ostringstream out;
  out << "threshold,fpr,tpr\n";
  char buffer[64];
  for (std::size_t i = 0; i < curve.size(); ++i) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", curve.thresholds[i]);
    out << buffer << ",";
    std::snprintf(buffer, sizeof(buffer), "%.17g", curve.fpr[i]);
    out << buffer << ",";
    std::snprintf(buffer, sizeof(buffer), "%.17g", curve.tpr[i]);
    out << buffer << "\n";
  }
  atomic_write_text(path, out.str());
}

}  // namespace had::io
