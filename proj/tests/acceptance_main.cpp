// Acceptance suite: one criterion per function, each printing a single
// PASS/FAIL line with its measured values. Run with no arguments for the
// whole suite or with criterion numbers to select. Criterion 10 needs
// real data supplied through environment variables and reports SKIP
// (exit 77 when selected explicitly) without them.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "had/eval.hpp"
#include "had/io.hpp"
#include "had/reference.hpp"
#include "had/rng.hpp"
#include "had/rx.hpp"
#include "had/scdt.hpp"
#include "had/subspace.hpp"
#include "had/synth.hpp"
#include "oracles.hpp"

using namespace had;

namespace {

class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

bool require_line(bool ok, int criterion, const std::string& detail) {
  std::printf("[%s] C%d %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  return ok;
}

std::string fmt(const char* pattern, ...) {
  char buffer[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buffer, sizeof(buffer), pattern, args);
  va_end(args);
  return buffer;
}

// --- C1: warp-then-transform vs transform-then-compose --------------------

bool criterion_1() {
  WallClock clock;
  rng::Stream stream(20001, 0);
  const std::size_t d = 128;
  const std::size_t m = 256;
  double worst = 0.0;
  for (int si = 0; si < 50; ++si) {
    const SpectralSignal s = (si % 2 == 0)
                                 ? oracle::random_smooth_density(stream, d)
                                 : oracle::random_split_signed_signal(stream, d);
    const ScdtVector direct = scdt_forward(s, m);
    for (int gi = 0; gi < 10; ++gi) {
      const MonotoneMap g = oracle::random_smooth_deformation(stream);
      const std::vector<double> via_signal = scdt_forward(apply_deformation(s, g), m).flatten();
      const std::vector<double> via_compose = compose_in_scdt(direct, g).flatten();
      for (std::size_t i = 0; i < via_signal.size(); ++i) {
        worst = std::max(worst, std::abs(via_signal[i] - via_compose[i]));
      }
    }
  }
  const double elapsed = clock.seconds();
  const bool ok = worst <= 5.0 / static_cast<double>(m) && elapsed < 10.0;
  return require_line(ok, 1,
                      fmt("composition property: worst discrepancy %.3e <= %.3e over "
                          "50x10 cases, %.1fs",
                          worst, 5.0 / static_cast<double>(m), elapsed));
}

// --- C2: zero and mass conventions -----------------------------------------

bool criterion_2() {
  const ScdtVector zero = scdt_forward({std::vector<double>(64, 0.0), {0, 1}}, 32);
  bool zero_ok = zero.pos_mass == 0.0 && zero.neg_mass == 0.0;
  for (double q : zero.pos_quantiles.quantiles) zero_ok = zero_ok && q == 0.0;
  for (double q : zero.neg_quantiles.quantiles) zero_ok = zero_ok && q == 0.0;

  rng::Stream stream(20002, 0);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const SpectralSignal s = oracle::random_signed_signal(stream, 64);
    double l1 = 0.0;
    for (double v : s.values) l1 += std::abs(v) * s.bin_width();
    const ScdtVector v = scdt_forward(s, 32);
    worst_rel = std::max(worst_rel, std::abs(v.pos_mass + v.neg_mass - l1) / l1);
  }
  const bool ok = zero_ok && worst_rel <= 1e-12;
  return require_line(
      ok, 2,
      fmt("zero signal maps to the exact zero pair (%s); mass split relative error "
          "%.3e <= 1e-12 over 1000 signals",
          zero_ok ? "yes" : "no", worst_rel));
}

// --- C3: subspace fit vs brute-force eigendecomposition --------------------

bool criterion_3() {
  rng::Stream stream(20003, 0);
  double worst_angle = 0.0;
  int k_mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    DataMatrix data(50, 30);
    for (double& v : data.values) v = stream.next_uniform(-1.0, 1.0);
    for (const double threshold : {0.9, 0.99, 0.9999}) {
      const BackgroundSubspace model = fit_subspace(data, {threshold, false});
      const oracle::OracleSubspace brute = oracle::fit_subspace_jacobi(data, threshold);
      if (model.dimension != brute.k) ++k_mismatches;
      worst_angle =
          std::max(worst_angle, oracle::max_principal_angle_sin(model.basis, brute.basis));
    }
  }
  const bool ok = k_mismatches == 0 && worst_angle <= 1e-8;
  return require_line(ok, 3,
                      fmt("subspace oracle: 100 matrices x 3 thresholds, k mismatches %d, "
                          "worst principal-angle sine %.3e <= 1e-8",
                          k_mismatches, worst_angle));
}

// --- C4: noiseless transport scenes land in a <= 3-dim subspace ------------

bool criterion_4() {
  WallClock clock;
  SceneSpec spec = default_scene_spec();
  spec.rows = 64;
  spec.cols = 64;
  spec.bands = 96;
  spec.anomaly_fraction = 0.0;
  spec.noise_sigma = 0.0;
  spec.alpha_law = {0.05, 1.2, false};  // enough spread that all three
                                        // generator directions carry energy
  spec.seed = 20004;

  const Scene scene = generate_scene(spec);
  const DataMatrix data = transform_cube(scene.cube, 2 * spec.bands);
  const BackgroundSubspace model = fit_subspace(data, {0.9999, false});
  const std::vector<double> scores = subspace_scores(data, model);

  double mean_norm2 = 0.0;
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (double v : data.row(i)) mean_norm2 += v * v;
  }
  mean_norm2 /= static_cast<double>(data.rows);
  const double max_score = *std::max_element(scores.begin(), scores.end());
  const double elapsed = clock.seconds();

  const bool ok =
      model.dimension <= 3 && max_score <= 1e-6 * mean_norm2 && elapsed < 60.0;
  return require_line(ok, 4,
                      fmt("model realizability: fitted k=%zu <= 3, max background score "
                          "%.3e <= %.3e, %.1fs",
                          model.dimension, max_score, 1e-6 * mean_norm2, elapsed));
}

// --- C5: end-to-end detection on a noisy scene ------------------------------

bool criterion_5() {
  WallClock clock;
  SceneSpec spec = default_scene_spec();
  spec.rows = 64;
  spec.cols = 64;
  spec.bands = 96;
  spec.anomaly_fraction = 0.01;
  spec.noise_sigma = 0.005;
  spec.seed = 20005;

  const Scene scene = generate_scene(spec);
  const ScdtDetectorResult detector = score_cube(scene.cube);
  const AucReport scdt_report = auc_report(roc(detector.scores, scene.mask));

  const ScoreMap rx_scores = rx_score_cube(scene.cube, fit_rx_auto(scene.cube));
  const AucReport rx_report = auc_report(roc(rx_scores, scene.mask));

  const double elapsed = clock.seconds();
  const bool ok =
      scdt_report.auc_full >= 0.99 && scdt_report.pauc_std_1e2 >= 0.9 && elapsed < 120.0;
  return require_line(
      ok, 5,
      fmt("end-to-end: scdt auc_full=%.4f >= 0.99, pauc_std_1e2=%.4f >= 0.9 "
          "(rx baseline: auc_full=%.4f, pauc_std_1e2=%.4f), %.1fs",
          scdt_report.auc_full, scdt_report.pauc_std_1e2, rx_report.auc_full,
          rx_report.pauc_std_1e2, elapsed));
}

// --- C6: reconstruction-error identities ------------------------------------

bool criterion_6() {
  rng::Stream stream(20006, 0);
  // rank-8 samples in a 24-dim feature space leave a real orthogonal
  // complement for the identity checks
  const std::size_t f = 24;
  const std::size_t rank = 8;
  DataMatrix directions(rank, f);
  for (double& v : directions.values) v = stream.next_uniform(-1.0, 1.0);
  DataMatrix data(60, f);
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t t = 0; t < rank; ++t) {
      const double c = stream.next_uniform(-2.0, 2.0);
      for (std::size_t j = 0; j < f; ++j) data.at(i, j) += c * directions.at(t, j);
    }
  }
  const BackgroundSubspace model = fit_subspace(data, {0.999999, false});

  double worst_in_basis = 0.0;
  double worst_orthogonal = 0.0;
  double worst_scaling = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    // random in-span vector
    std::vector<double> in_span(f, 0.0);
    for (std::size_t t = 0; t < model.dimension; ++t) {
      const double c = stream.next_uniform(-2.0, 2.0);
      for (std::size_t j = 0; j < f; ++j) in_span[j] += c * model.basis.at(t, j);
    }
    worst_in_basis = std::max(worst_in_basis, anomaly_score(in_span, model));

    // random unit vector orthogonal to the basis
    std::vector<double> u(f);
    for (double& x : u) x = stream.next_uniform(-1.0, 1.0);
    for (std::size_t t = 0; t < model.dimension; ++t) {
      double dot = 0.0;
      for (std::size_t j = 0; j < f; ++j) dot += u[j] * model.basis.at(t, j);
      for (std::size_t j = 0; j < f; ++j) u[j] -= dot * model.basis.at(t, j);
    }
    double norm = 0.0;
    for (double x : u) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : u) x /= norm;
    worst_orthogonal = std::max(worst_orthogonal, std::abs(anomaly_score(u, model) - 1.0));

    // quadratic scaling
    std::vector<double> v(f);
    for (double& x : v) x = stream.next_uniform(-2.0, 2.0);
    const double c = stream.next_uniform(0.1, 4.0);
    std::vector<double> cv(f);
    for (std::size_t j = 0; j < f; ++j) cv[j] = c * v[j];
    const double base = anomaly_score(v, model);
    const double scaled = anomaly_score(cv, model);
    worst_scaling = std::max(
        worst_scaling, std::abs(scaled - c * c * base) / std::max(1.0, c * c * base));
  }
  const bool ok =
      worst_in_basis <= 1e-10 && worst_orthogonal <= 1e-10 && worst_scaling <= 1e-9;
  return require_line(ok, 6,
                      fmt("scoring identities over 1000 cases: in-span %.3e <= 1e-10, "
                          "orthogonal-unit error %.3e <= 1e-10, scaling error %.3e <= 1e-9",
                          worst_in_basis, worst_orthogonal, worst_scaling));
}

// --- C7: ROC sweep vs exhaustive enumeration --------------------------------

bool criterion_7() {
  rng::Stream stream(20007, 0);
  const std::size_t n = 12;
  std::size_t compared = 0;
  bool exact = true;

  for (int vec = 0; vec < 20 && exact; ++vec) {
    std::vector<double> scores(n);
    for (double& s : scores) {
      s = stream.next_unit();
      if (vec % 2 == 1 && stream.next_unit() < 0.4) {
        s = std::round(s * 4.0) / 4.0;  // tie-heavy vectors
      }
    }
    ScoreMap map;
    map.rows = 1;
    map.cols = n;
    map.scores = scores;

    for (std::uint32_t bits = 1; bits + 1 < (1u << n) && exact; ++bits) {
      GroundTruthMask mask;
      mask.rows = 1;
      mask.cols = n;
      mask.labels.resize(n);
      std::vector<bool> flags(n);
      for (std::size_t i = 0; i < n; ++i) {
        flags[i] = (bits >> i) & 1u;
        mask.labels[i] = flags[i] ? 1 : 0;
      }
      const RocCurve curve = roc(map, mask);
      const auto brute = oracle::brute_roc(scores, flags);
      if (curve.size() != brute.size()) {
        exact = false;
        break;
      }
      for (std::size_t i = 0; i < brute.size(); ++i) {
        if (curve.thresholds[i] != brute[i].threshold || curve.fpr[i] != brute[i].fpr ||
            curve.tpr[i] != brute[i].tpr) {
          exact = false;
          break;
        }
      }
      ++compared;
    }
  }

  // chance anchor at 10000 pixels
  rng::Stream chance_stream(20017, 0);
  const std::size_t big = 10000;
  ScoreMap chance;
  chance.rows = 100;
  chance.cols = 100;
  chance.scores.resize(big);
  for (double& s : chance.scores) s = chance_stream.next_unit();
  GroundTruthMask chance_mask;
  chance_mask.rows = 100;
  chance_mask.cols = 100;
  chance_mask.labels.assign(big, 0);
  for (int i = 0; i < 500; ++i) {
    chance_mask.labels[chance_stream.next_below(big)] = 1;
  }
  const AucReport chance_report = auc_report(roc(chance, chance_mask));
  const double dev_1e2 = std::abs(chance_report.pauc_std_1e2 - 0.5);
  const double dev_1e3 = std::abs(chance_report.pauc_std_1e3 - 0.5);

  const bool ok = exact && dev_1e2 <= 0.02 && dev_1e3 <= 0.02;
  return require_line(ok, 7,
                      fmt("ROC oracle: %zu exhaustive labelings exact=%s; chance anchor "
                          "|pauc_std-0.5| = %.3f / %.3f <= 0.02",
                          compared, exact ? "yes" : "no", dev_1e2, dev_1e3));
}

// --- C8: RX sanity -----------------------------------------------------------

bool criterion_8() {
  rng::Stream stream(20008, 0);
  const std::size_t n = 10000;
  const std::size_t d = 20;
  HsiCube cube;
  cube.rows = n;
  cube.cols = 1;
  cube.bands = d;
  cube.data.resize(n * d);
  for (double& v : cube.data) v = stream.next_normal();

  const ScoreMap base = rx_score_cube(cube, fit_rx(cube, 0.0));
  const double mean_score =
      std::accumulate(base.scores.begin(), base.scores.end(), 0.0) / static_cast<double>(n);
  const double mean_dev = std::abs(mean_score - static_cast<double>(d)) / static_cast<double>(d);

  // invertible affine remap of every pixel
  std::vector<double> matrix(d * d, 0.0);
  std::vector<double> shift(d);
  for (std::size_t i = 0; i < d; ++i) {
    matrix[i * d + i] = stream.next_uniform(0.8, 1.6);
    for (std::size_t j = 0; j < d; ++j) matrix[i * d + j] += stream.next_uniform(-0.1, 0.1);
    shift[i] = stream.next_uniform(-2.0, 2.0);
  }
  HsiCube remapped = cube;
  for (std::size_t p = 0; p < n; ++p) {
    const auto src = cube.pixel_span(p);
    for (std::size_t i = 0; i < d; ++i) {
      double v = shift[i];
      for (std::size_t j = 0; j < d; ++j) v += matrix[i * d + j] * src[j];
      remapped.data[p * d + i] = v;
    }
  }
  const ScoreMap after = rx_score_cube(remapped, fit_rx(remapped, 0.0));

  double worst_rel = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    worst_rel = std::max(worst_rel, std::abs(after.scores[p] - base.scores[p]) /
                                        std::max(1.0, base.scores[p]));
  }
  std::vector<std::size_t> order_a(n), order_b(n);
  for (std::size_t i = 0; i < n; ++i) order_a[i] = order_b[i] = i;
  std::sort(order_a.begin(), order_a.end(),
            [&](std::size_t x, std::size_t y) { return base.scores[x] < base.scores[y]; });
  std::sort(order_b.begin(), order_b.end(),
            [&](std::size_t x, std::size_t y) { return after.scores[x] < after.scores[y]; });
  const bool ranks_equal = order_a == order_b;

  const bool ok = mean_dev <= 0.05 && worst_rel <= 1e-8 && ranks_equal;
  return require_line(ok, 8,
                      fmt("RX sanity: mean score %.2f within 5%% of %zu; affine remap score "
                          "deviation %.3e <= 1e-8, rank correlation %s",
                          mean_score, d, worst_rel, ranks_equal ? "1.0" : "< 1.0"));
}

// --- C9: I/O bit-exactness ----------------------------------------------------

bool criterion_9() {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("had_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  bool ok = true;
  std::string detail;
  try {
    rng::Stream stream(20009, 0);
    HsiCube cube;
    cube.rows = 8;
    cube.cols = 8;
    cube.bands = 16;
    cube.data.resize(8 * 8 * 16);
    for (double& v : cube.data) v = stream.next_uniform(-3.0, 3.0);
    io::write_cube(cube, dir / "cube.json");
    const HsiCube cube_back = io::read_cube(dir / "cube.json");
    const bool cube_bitwise = cube_back.data == cube.data;

    ScoreMap map;
    map.rows = 16;
    map.cols = 4;
    map.detector_id = "scdt";
    map.scores.resize(64);
    for (double& v : map.scores) v = stream.next_uniform(0.0, 9.0);
    io::write_scoremap(map, dir / "scores.json", io::ScoreMapFormat::Portable);
    const bool map_bitwise = io::read_scoremap(dir / "scores.json").scores == map.scores;

    // one value table encoded by hand in all three interleaves
    const std::size_t rows = 3, cols = 2, bands = 4;
    auto value = [](std::size_t r, std::size_t c, std::size_t b) {
      return static_cast<float>(1 + r * 31 + c * 7 + b);
    };
    auto push_f32 = [](std::vector<unsigned char>& bytes, float v) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<unsigned char>(bits >> (8 * i)));
    };
    std::vector<unsigned char> bsq, bil, bip;
    for (std::size_t b = 0; b < bands; ++b)
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) push_f32(bsq, value(r, c, b));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t b = 0; b < bands; ++b)
        for (std::size_t c = 0; c < cols; ++c) push_f32(bil, value(r, c, b));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t b = 0; b < bands; ++b) push_f32(bip, value(r, c, b));
    auto write_envi = [&](const char* stem, const char* interleave,
                          const std::vector<unsigned char>& payload) {
      const std::string header = "ENVI\nsamples = 2\nlines = 3\nbands = 4\n"
                                 "data type = 4\ninterleave = " +
                                 std::string(interleave) + "\nbyte order = 0\n";
      io::atomic_write_text(dir / (std::string(stem) + ".hdr"), header);
      io::atomic_write_bytes(dir / (std::string(stem) + ".img"), payload.data(),
                             payload.size());
    };
    write_envi("a", "bsq", bsq);
    write_envi("b", "bil", bil);
    write_envi("c", "bip", bip);
    const HsiCube ca = io::read_envi(dir / "a.hdr", dir / "a.img");
    const HsiCube cb = io::read_envi(dir / "b.hdr", dir / "b.img");
    const HsiCube cc = io::read_envi(dir / "c.hdr", dir / "c.img");
    const bool interleaves_equal = ca.data == cb.data && ca.data == cc.data;

    ok = cube_bitwise && map_bitwise && interleaves_equal;
    detail = fmt("portable cube bitwise=%s, score map bitwise=%s, "
                 "BSQ/BIL/BIP decode equal=%s",
                 cube_bitwise ? "yes" : "no", map_bitwise ? "yes" : "no",
                 interleaves_equal ? "yes" : "no");
  } catch (const std::exception& e) {
    ok = false;
    detail = fmt("unexpected error: %s", e.what());
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return require_line(ok, 9, detail);
}

// --- C10: optional real-data smoke --------------------------------------------

int criterion_10() {
  const char* header = std::getenv("HAD_SMOKE_ENVI_HEADER");
  const char* data = std::getenv("HAD_SMOKE_ENVI_DATA");
  const char* mask_path = std::getenv("HAD_SMOKE_MASK");
  if (!header || !data || !mask_path) {
    std::printf("[SKIP] C10 real-data smoke: set HAD_SMOKE_ENVI_HEADER, "
                "HAD_SMOKE_ENVI_DATA, HAD_SMOKE_MASK to enable\n");
    return -1;
  }
  try {
    const HsiCube cube = io::read_envi(header, data);
    const GroundTruthMask mask = io::read_mask(mask_path);
    const ScdtDetectorResult result = score_cube(cube);
    const RocCurve curve = roc(result.scores, mask);
    bool monotone = true;
    for (std::size_t i = 1; i < curve.size(); ++i) {
      monotone = monotone && curve.fpr[i] >= curve.fpr[i - 1] &&
                 curve.tpr[i] >= curve.tpr[i - 1];
    }
    const double auc = auc_report(curve).auc_full;
    const bool ok = monotone && auc >= 0.0 && auc <= 1.0;
    return require_line(ok, 10,
                        fmt("real-data smoke: %zux%zux%zu cube, monotone ROC=%s, "
                            "auc_full=%.4f in [0,1]",
                            cube.rows, cube.cols, cube.bands, monotone ? "yes" : "no", auc))
               ? 1
               : 0;
  } catch (const std::exception& e) {
    return require_line(false, 10, fmt("real-data smoke failed: %s", e.what())) ? 1 : 0;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  const bool all = selected.empty();
  auto wants = [&](int c) {
    return all || std::find(selected.begin(), selected.end(), c) != selected.end();
  };

  bool ok = true;
  if (wants(1)) ok = criterion_1() && ok;
  if (wants(2)) ok = criterion_2() && ok;
  if (wants(3)) ok = criterion_3() && ok;
  if (wants(4)) ok = criterion_4() && ok;
  if (wants(5)) ok = criterion_5() && ok;
  if (wants(6)) ok = criterion_6() && ok;
  if (wants(7)) ok = criterion_7() && ok;
  if (wants(8)) ok = criterion_8() && ok;
  if (wants(9)) ok = criterion_9() && ok;
  if (wants(10)) {
    const int r = criterion_10();
    if (r == -1 && !all && selected.size() == 1) return 77;  // explicit skip
    if (r == 0) ok = false;
  }
  return ok ? 0 : 1;
}
