#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "had/monotone.hpp"
#include "had/types.hpp"

namespace had {

// One strictly increasing generator function, kept as a small recipe so
// scene specs stay compact and reproducible in JSON.
struct GeneratorSpec {
  enum class Kind { Identity, Power, Smoothstep, Table };
  Kind kind = Kind::Identity;
  double exponent = 1.0;        // Power
  std::vector<double> values;   // Table

  MonotoneMap realize(Interval domain,
                      std::size_t samples = MonotoneMap::kDefaultSamples) const;
};

struct DeformationBasis {
  std::vector<GeneratorSpec> generators;

  std::size_t size() const { return generators.size(); }
  // Realizes every generator and checks strict monotonicity plus numerical
  // linear independence of the sample tables.
  std::vector<MonotoneMap> realize(Interval domain) const;
};

// Template spectrum recipe: explicit samples, or a Gaussian mixture over
// the band domain plus a constant floor.
struct GaussianBump {
  double center = 0.5;
  double width = 0.1;
  double amplitude = 1.0;
};

struct TemplateSpec {
  std::vector<double> values;          // wins when non-empty
  std::vector<GaussianBump> gaussians;
  double floor = 0.0;

  SpectralSignal realize(std::size_t bands, Interval domain) const;
};

// Per-coordinate uniform law for the deformation coefficients.
struct AlphaLaw {
  double low = 0.2;
  double high = 1.0;
  bool normalize = false;  // rescale draws to sum 1
};

struct SceneSpec {
  std::size_t rows = 64;
  std::size_t cols = 64;
  std::size_t bands = 96;
  Interval band_domain{0.0, 1.0};
  TemplateSpec background_template;
  TemplateSpec anomaly_template;
  DeformationBasis basis;
  AlphaLaw alpha_law;
  double anomaly_fraction = 0.0;
  double noise_sigma = 0.0;  // fraction of the background template peak
  std::uint64_t seed = 0;
  bool signed_mode = false;  // allow negative template values

  void validate() const;
};

// Normalized combination of the basis: (G - G(lo)) / (G(hi) - G(lo)) with
// G = sum_i alpha_i f_i, remapped onto the domain so deformed signals stay
// on the common band grid.
MonotoneMap sample_deformation(std::span<const MonotoneMap> basis,
                               std::span<const double> alphas);

struct Scene {
  HsiCube cube;
  GroundTruthMask mask;
};

// Deterministic for a fixed spec: every pixel draws from its own counter
// stream keyed by (seed, flat index), so outputs are bit-identical across
// runs and thread counts.
Scene generate_scene(const SceneSpec& spec);

// Smooth three-bump template, anomaly with one bump center shifted by
// 0.2, basis {x, x^2, smoothstep}, 1% anomalies, mild noise.
SceneSpec default_scene_spec();

SceneSpec scene_spec_from_json_text(const std::string& text);
std::string scene_spec_to_json_text(const SceneSpec& spec);

}  // namespace had
