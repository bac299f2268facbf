// Command-line front end: scene synthesis, detection, and ROC/AUC
// evaluation. Every run writes a JSON manifest next to its outputs so the
// exact parameters (including defaults) are auditable.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "had/eval.hpp"
#include "had/io.hpp"
#include "had/parallel.hpp"
#include "had/rx.hpp"
#include "had/subspace.hpp"
#include "had/synth.hpp"
#include "had/types.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

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

// HAD_THREADS overrides the flag; 0 means all cores.
int resolve_threads(int flag_value) {
  if (const char* env = std::getenv("HAD_THREADS")) {
    try {
      const int n = std::stoi(env);
      had::require(n >= 0, had::Errc::InvalidArgument, "HAD_THREADS must be >= 0");
      flag_value = n;
    } catch (const had::Error&) {
      throw;
    } catch (const std::exception&) {
      had::fail(had::Errc::InvalidArgument,
                std::string("cannot parse HAD_THREADS='") + env + "'");
    }
  }
  had::require(flag_value >= 0, had::Errc::InvalidArgument, "--threads must be >= 0");
  had::par::set_thread_override(flag_value);
  return had::par::thread_count();
}

// "0-185" / "3,7,9" / "0-10,90-95"
std::vector<std::size_t> parse_band_list(const std::string& text) {
  std::vector<std::size_t> bands;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        bands.push_back(std::stoull(item));
      } else {
        const std::size_t lo = std::stoull(item.substr(0, dash));
        const std::size_t hi = std::stoull(item.substr(dash + 1));
        had::require(hi >= lo, had::Errc::InvalidArgument,
                     "descending band range '" + item + "'");
        for (std::size_t b = lo; b <= hi; ++b) bands.push_back(b);
      }
    } catch (const had::Error&) {
      throw;
    } catch (const std::exception&) {
      had::fail(had::Errc::InvalidArgument, "cannot parse band list item '" + item + "'");
    }
    pos = comma + 1;
  }
  had::require(!bands.empty(), had::Errc::InvalidArgument, "empty band keep-list");
  return bands;
}

had::HsiCube load_cube(const fs::path& input, const std::string& envi_data) {
  if (input.extension() == ".hdr") {
    if (!envi_data.empty()) return had::io::read_envi(input, envi_data);
    for (const char* ext : {"", ".img", ".dat", ".raw"}) {
      fs::path candidate = input;
      candidate.replace_extension(ext);
      if (fs::exists(candidate)) return had::io::read_envi(input, candidate);
    }
    had::fail(had::Errc::IoError,
              "no data file found next to '" + input.string() + "'; pass --envi-data");
  }
  return had::io::read_cube(input);
}

std::string format_fpr(double target) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", target);
  return buffer;
}

void write_manifest(const fs::path& path, const ordered_json& manifest) {
  had::io::atomic_write_text(path, manifest.dump(2) + "\n");
}

fs::path derived_path(const fs::path& base, const char* suffix) {
  fs::path p = base;
  p.replace_extension("");
  p += suffix;
  return p;
}

struct SynthArgs {
  std::string spec_path;
  std::string output_cube = "scene.json";
  std::string output_mask = "scene-mask.pgm";
  std::string output_spec;
  std::string manifest;
  int threads = 0;
};

int run_synth(const SynthArgs& args) {
  WallClock clock;
  const int threads = resolve_threads(args.threads);

  const had::SceneSpec spec =
      had::scene_spec_from_json_text(had::io::read_text_file(args.spec_path));
  spec.validate();

  const had::Scene scene = had::generate_scene(spec);
  had::io::write_cube(scene.cube, args.output_cube);
  had::io::write_mask(scene.mask, args.output_mask);

  const fs::path spec_out = args.output_spec.empty()
                                ? derived_path(args.output_cube, "-spec.json")
                                : fs::path(args.output_spec);
  had::io::atomic_write_text(spec_out, had::scene_spec_to_json_text(spec));

  ordered_json manifest;
  manifest["command"] = "synth";
  manifest["inputs"] = {{"spec", args.spec_path}};
  manifest["parameters"] = {{"rows", spec.rows},
                            {"cols", spec.cols},
                            {"bands", spec.bands},
                            {"anomaly-fraction", spec.anomaly_fraction},
                            {"noise-sigma", spec.noise_sigma},
                            {"seed", spec.seed},
                            {"threads", threads}};
  manifest["results"] = {{"anomaly-count", scene.mask.anomaly_count()}};
  manifest["outputs"] = {{"cube", args.output_cube},
                         {"mask", args.output_mask},
                         {"resolved-spec", spec_out.string()}};
  manifest["wall-time-seconds"] = clock.seconds();
  const fs::path manifest_path = args.manifest.empty()
                                     ? derived_path(args.output_cube, "-manifest.json")
                                     : fs::path(args.manifest);
  write_manifest(manifest_path, manifest);
  return 0;
}

struct DetectArgs {
  std::string input;
  std::string envi_data;
  std::string detector = "scdt";
  std::size_t grid_size = 0;
  double energy_threshold = 0.9999;
  double mass_weight = 1.0;
  bool centered = false;
  double ridge = -1.0;  // negative = trace-scaled default
  std::string keep_bands;
  std::string output = "scores.json";
  std::string manifest;
  int threads = 0;
};

int run_detect(const DetectArgs& args) {
  WallClock clock;
  const int threads = resolve_threads(args.threads);
  had::require(args.detector == "scdt" || args.detector == "rx", had::Errc::InvalidArgument,
               "--detector must be scdt or rx");
  had::require(args.energy_threshold > 0.0 && args.energy_threshold <= 1.0,
               had::Errc::InvalidArgument, "--energy-threshold must lie in (0, 1]");
  if (args.grid_size != 0) {
    had::require(args.grid_size >= 2, had::Errc::BadGrid,
                 "--grid-size must be 0 (auto) or >= 2");
  }

  had::HsiCube cube = load_cube(args.input, args.envi_data);
  ordered_json keep_bands_json = nullptr;
  if (!args.keep_bands.empty()) {
    const std::vector<std::size_t> keep = parse_band_list(args.keep_bands);
    cube = had::io::select_bands(cube, keep);
    keep_bands_json = keep;
  }

  ordered_json manifest;
  manifest["command"] = "detect";
  manifest["inputs"] = {{"cube", args.input}};
  ordered_json parameters = {{"detector", args.detector},
                             {"keep-bands", keep_bands_json},
                             {"threads", threads}};
  ordered_json results;

  had::ScoreMap scores;
  if (args.detector == "scdt") {
    had::ScdtDetectorOptions options;
    options.grid_size = args.grid_size;
    options.energy_threshold = args.energy_threshold;
    options.mass_weight = args.mass_weight;
    options.centered = args.centered;
    const had::ScdtDetectorResult result = had::score_cube(cube, options);
    scores = result.scores;

    parameters["grid-size"] = result.grid_size;
    parameters["energy-threshold"] = args.energy_threshold;
    parameters["mass-weight"] = args.mass_weight;
    parameters["centered"] = args.centered;

    results["k"] = result.model.dimension;
    results["singular-values"] = result.model.singular_values;
    double total = 0.0;
    for (double s : result.model.singular_values) total += s * s;
    ordered_json energy = ordered_json::array();
    double cum = 0.0;
    for (double s : result.model.singular_values) {
      cum += s * s;
      energy.push_back(total > 0.0 ? cum / total : 0.0);
    }
    results["cumulative-energy"] = energy;
  } else {
    const double ridge = args.ridge >= 0.0 ? args.ridge : had::default_ridge(cube);
    const had::RxModel model = had::fit_rx(cube, ridge);
    scores = had::rx_score_cube(cube, model);
    parameters["ridge"] = ridge;
    results["ridge"] = ridge;
  }

  had::io::write_scoremap(scores, args.output, had::io::ScoreMapFormat::Portable);

  manifest["parameters"] = parameters;
  manifest["results"] = results;
  manifest["outputs"] = {{"scores", args.output}};
  manifest["wall-time-seconds"] = clock.seconds();
  const fs::path manifest_path = args.manifest.empty()
                                     ? derived_path(args.output, "-manifest.json")
                                     : fs::path(args.manifest);
  write_manifest(manifest_path, manifest);
  return 0;
}

struct EvalArgs {
  std::string scores;
  std::string mask;
  std::vector<double> fpr_targets = {1e-3, 1e-2, 1e0};
  std::string output = "eval.json";
  std::string curve_csv;
  std::string binary_map_prefix;
  int threads = 0;
};

int run_eval(const EvalArgs& args) {
  WallClock clock;
  const int threads = resolve_threads(args.threads);

  const had::ScoreMap scores = had::io::read_scoremap(args.scores);
  const had::GroundTruthMask mask = had::io::read_mask(args.mask);
  const had::RocCurve curve = had::roc(scores, mask);
  const had::AucReport report = had::auc_report(curve);

  const fs::path curve_csv = args.curve_csv.empty() ? derived_path(args.output, "-roc.csv")
                                                    : fs::path(args.curve_csv);
  had::io::write_roc_csv(curve, curve_csv);

  const fs::path map_prefix = args.binary_map_prefix.empty()
                                  ? derived_path(args.output, "-map-fpr")
                                  : fs::path(args.binary_map_prefix);

  ordered_json operating_points = ordered_json::array();
  ordered_json map_files = ordered_json::array();
  for (double target : args.fpr_targets) {
    const had::OperatingPoint point = had::threshold_at_fpr(curve, target);
    const had::GroundTruthMask detections = had::binary_map(scores, point.threshold);
    fs::path map_path = map_prefix;
    map_path += format_fpr(target) + ".pgm";
    had::io::write_mask(detections, map_path);
    map_files.push_back(map_path.string());
    operating_points.push_back({{"target-fpr", target},
                                {"threshold", point.threshold},
                                {"achieved-fpr", point.achieved_fpr},
                                {"unachievable", point.unachievable},
                                {"detections", detections.anomaly_count()}});
  }

  ordered_json summary;
  summary["command"] = "eval";
  summary["inputs"] = {{"scores", args.scores}, {"mask", args.mask}};
  summary["parameters"] = {{"fpr-targets", args.fpr_targets}, {"threads", threads}};
  summary["counts"] = {{"anomaly", curve.anomaly_count},
                       {"background", curve.background_count}};
  summary["auc"] = {{"auc_full", report.auc_full},
                    {"pauc_raw_1e2", report.pauc_raw_1e2},
                    {"pauc_std_1e2", report.pauc_std_1e2},
                    {"pauc_raw_1e3", report.pauc_raw_1e3},
                    {"pauc_std_1e3", report.pauc_std_1e3}};
  summary["operating-points"] = operating_points;
  summary["outputs"] = {{"curve-csv", curve_csv.string()}, {"binary-maps", map_files}};
  summary["wall-time-seconds"] = clock.seconds();
  write_manifest(args.output, summary);
  return 0;
}

struct RocArgs {
  std::string scores;
  std::string mask;
  std::string output = "roc.csv";
  int threads = 0;
};

int run_roc(const RocArgs& args) {
  resolve_threads(args.threads);
  const had::ScoreMap scores = had::io::read_scoremap(args.scores);
  const had::GroundTruthMask mask = had::io::read_mask(args.mask);
  had::io::write_roc_csv(had::roc(scores, mask), args.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Hyperspectral anomaly detection via subspace modeling in the signed "
      "cumulative distribution transform domain"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.\n"
      "HAD_THREADS overrides --threads everywhere; thread count never changes results.\n"
      "Binary detection maps mark pixels with score strictly greater than the threshold.");

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene + mask");
  synth_cmd->add_option("--spec", synth.spec_path, "SceneSpec JSON path")->required();
  synth_cmd->add_option("--output-cube", synth.output_cube, "Output cube sidecar path");
  synth_cmd->add_option("--output-mask", synth.output_mask, "Output mask PGM path");
  synth_cmd->add_option("--output-spec", synth.output_spec,
                        "Resolved SceneSpec path (default: derived from cube)");
  synth_cmd->add_option("--manifest", synth.manifest, "Manifest path");
  synth_cmd->add_option("--threads", synth.threads, "Worker threads (0 = all cores)");

  DetectArgs detect;
  CLI::App* detect_cmd = app.add_subcommand("detect", "Score a cube for anomalies");
  detect_cmd->add_option("--input", detect.input, "Cube sidecar (.json) or ENVI header (.hdr)")
      ->required();
  detect_cmd->add_option("--envi-data", detect.envi_data, "ENVI data file (with .hdr input)");
  detect_cmd->add_option("--detector", detect.detector, "scdt (default) or rx");
  detect_cmd->add_option("--grid-size", detect.grid_size,
                         "Quantile grid M (0 = twice the band count)");
  detect_cmd->add_option("--energy-threshold", detect.energy_threshold,
                         "Cumulative energy fraction for the subspace rank");
  detect_cmd->add_option("--mass-weight", detect.mass_weight,
                         "Scale on the two mass coordinates");
  detect_cmd->add_flag("--centered", detect.centered,
                       "Subtract the mean before fitting (comparison mode)");
  detect_cmd->add_option("--ridge", detect.ridge,
                         "RX covariance ridge (negative = trace-scaled default)");
  detect_cmd->add_option("--keep-bands", detect.keep_bands,
                         "Band keep-list, e.g. 0-10,20,30-40");
  detect_cmd->add_option("--output", detect.output, "Score map sidecar path");
  detect_cmd->add_option("--manifest", detect.manifest, "Manifest path");
  detect_cmd->add_option("--threads", detect.threads, "Worker threads (0 = all cores)");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "ROC/AUC report with binary maps");
  eval_cmd->add_option("--scores", eval.scores, "Score map sidecar path")->required();
  eval_cmd->add_option("--mask", eval.mask, "Ground-truth mask (PGM or sidecar)")->required();
  eval_cmd->add_option("--fpr-targets", eval.fpr_targets,
                       "FPR operating points (default 1e-3 1e-2 1)");
  eval_cmd->add_option("--output", eval.output, "Summary JSON path");
  eval_cmd->add_option("--curve-csv", eval.curve_csv, "ROC CSV path (default derived)");
  eval_cmd->add_option("--binary-map-prefix", eval.binary_map_prefix,
                       "Binary map path prefix (default derived)");
  eval_cmd->add_option("--threads", eval.threads, "Worker threads (0 = all cores)");

  RocArgs roc_args;
  CLI::App* roc_cmd = app.add_subcommand("roc", "Write the ROC curve as CSV");
  roc_cmd->add_option("--scores", roc_args.scores, "Score map sidecar path")->required();
  roc_cmd->add_option("--mask", roc_args.mask, "Ground-truth mask path")->required();
  roc_cmd->add_option("--output", roc_args.output, "CSV output path");
  roc_cmd->add_option("--threads", roc_args.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
    if (synth_cmd->parsed()) return run_synth(synth);
    if (detect_cmd->parsed()) return run_detect(detect);
    if (eval_cmd->parsed()) return run_eval(eval);
    if (roc_cmd->parsed()) return run_roc(roc_args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const had::Error& e) {
    std::cerr << e.what() << "\n";
    return errc_exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "Unexpected: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
