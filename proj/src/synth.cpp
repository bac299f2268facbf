#include "had/synth.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>

#include <json.hpp>

#include "had/parallel.hpp"
#include "had/rng.hpp"
#include "had/scdt.hpp"

namespace had {

MonotoneMap GeneratorSpec::realize(Interval domain, std::size_t samples) const {
  // Named generators are defined in normalized coordinates so they fix the
  // domain endpoints; tables are taken as given.
  const double lo = domain.lo;
  const double w = domain.width();
  switch (kind) {
    case Kind::Identity:
      return MonotoneMap::identity(domain, samples);
    case Kind::Power: {
      require(exponent > 0.0, Errc::BadSpec, "power generator needs a positive exponent");
      const double p = exponent;
      return MonotoneMap::sample(
          [lo, w, p](double x) { return lo + w * std::pow((x - lo) / w, p); }, domain,
          samples);
    }
    case Kind::Smoothstep:
      return MonotoneMap::sample(
          [lo, w](double x) {
            const double u = (x - lo) / w;
            return lo + w * u * u * (3.0 - 2.0 * u);
          },
          domain, samples);
    case Kind::Table: {
      MonotoneMap raw = MonotoneMap::from_table(values, domain);
      if (raw.size() == samples) return raw;
      // resample onto the common grid so tables of any length mix with the
      // named generators
      return MonotoneMap::sample([&raw](double x) { return raw(x); }, domain, samples);
    }
  }
  fail(Errc::BadSpec, "unknown generator kind");
}

std::vector<MonotoneMap> DeformationBasis::realize(Interval domain) const {
  require(!generators.empty(), Errc::BadSpec, "deformation basis is empty");
  std::vector<MonotoneMap> maps;
  maps.reserve(generators.size());
  for (const auto& g : generators) {
    MonotoneMap m = g.realize(domain);
    m.require_increasing("generator");
    maps.push_back(std::move(m));
  }

  // Numerical rank check on the k x S sample matrix via its Gram matrix.
  const std::size_t k = maps.size();
  const std::size_t s = maps.front().size();
  for (const auto& m : maps) {
    require(m.size() == s, Errc::InconsistentLength, "generator tables differ in length");
  }
  Eigen::MatrixXd gram(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < s; ++i) dot += maps[a].table()[i] * maps[b].table()[i];
      gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = dot;
      gram(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = dot;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  require(solver.info() == Eigen::Success, Errc::BadSpec, "generator rank check failed");
  const double sigma_max = std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
  const double sigma_min = std::sqrt(std::max(solver.eigenvalues().minCoeff(), 0.0));
  require(sigma_min > 1e-8 * sigma_max, Errc::BadSpec,
          "generators are numerically linearly dependent");
  return maps;
}

SpectralSignal TemplateSpec::realize(std::size_t bands, Interval domain) const {
  require(bands >= 2, Errc::BadSpec, "template needs at least 2 bands");
  SpectralSignal out{std::vector<double>(bands, 0.0), domain};
  if (!values.empty()) {
    require(values.size() == bands, Errc::BadSpec,
            "template has " + std::to_string(values.size()) + " values, expected " +
                std::to_string(bands));
    out.values = values;
    return out;
  }
  require(!gaussians.empty() || floor > 0.0, Errc::BadSpec, "template recipe is empty");
  const double h = out.bin_width();
  for (std::size_t b = 0; b < bands; ++b) {
    const double x = domain.lo + h * (static_cast<double>(b) + 0.5);
    double v = floor;
    for (const auto& g : gaussians) {
      require(g.width > 0.0, Errc::BadSpec, "gaussian bump needs a positive width");
      const double z = (x - g.center) / g.width;
      v += g.amplitude * std::exp(-0.5 * z * z);
    }
    out.values[b] = v;
  }
  return out;
}

void SceneSpec::validate() const {
  require(rows >= 1 && cols >= 1, Errc::BadSpec, "scene needs at least one pixel");
  require(bands >= 2, Errc::BadSpec, "scene needs at least 2 bands");
  require(band_domain.width() > 0.0, Errc::BadSpec, "band domain has non-positive width");
  require(!basis.generators.empty(), Errc::BadSpec, "deformation basis is empty");
  require(alpha_law.low >= 0.0 && alpha_law.high >= alpha_law.low, Errc::BadSpec,
          "alpha law needs 0 <= low <= high");
  require(alpha_law.high > 0.0, Errc::BadSpec, "alpha law admits only zero draws");
  require(anomaly_fraction >= 0.0 && anomaly_fraction <= 0.2, Errc::BadSpec,
          "anomaly fraction must lie in [0, 0.2]");
  require(noise_sigma >= 0.0, Errc::BadSpec, "noise sigma must be non-negative");

  const double n = static_cast<double>(rows) * static_cast<double>(cols);
  if (anomaly_fraction > 0.0) {
    require(anomaly_fraction * n >= 1.0, Errc::BadSpec,
            "anomaly fraction rounds to zero pixels");
  }

  const SpectralSignal bg = background_template.realize(bands, band_domain);
  bg.validate();
  if (!signed_mode) {
    for (double v : bg.values) {
      require(v >= 0.0, Errc::BadSpec, "background template is negative without signed mode");
    }
  }
  if (anomaly_fraction > 0.0) {
    const SpectralSignal an = anomaly_template.realize(bands, band_domain);
    an.validate();
    if (!signed_mode) {
      for (double v : an.values) {
        require(v >= 0.0, Errc::BadSpec, "anomaly template is negative without signed mode");
      }
    }
  }
}

MonotoneMap sample_deformation(std::span<const MonotoneMap> basis,
                               std::span<const double> alphas) {
  require(!basis.empty(), Errc::BadSpec, "deformation basis is empty");
  require(alphas.size() == basis.size(), Errc::LengthMismatch,
          "coefficient count does not match basis size");
  bool any_positive = false;
  for (double a : alphas) {
    require(a >= 0.0, Errc::InvalidArgument, "deformation coefficients must be non-negative");
    if (a > 0.0) any_positive = true;
  }
  require(any_positive, Errc::AllZeroAlphas, "all deformation coefficients are zero");

  const Interval domain = basis.front().domain();
  const std::size_t s = basis.front().size();
  std::vector<double> combined(s, 0.0);
  for (std::size_t g = 0; g < basis.size(); ++g) {
    require(basis[g].size() == s, Errc::InconsistentLength,
            "generator tables differ in length");
    const auto& table = basis[g].table();
    const double a = alphas[g];
    if (a == 0.0) continue;
    for (std::size_t i = 0; i < s; ++i) combined[i] += a * table[i];
  }

  const double range = combined.back() - combined.front();
  require(range > 0.0, Errc::NotIncreasing, "combined deformation has no rise");
  const double offset = combined.front();
  for (double& v : combined) {
    v = domain.lo + domain.width() * ((v - offset) / range);
  }
  MonotoneMap map = MonotoneMap::from_table(std::move(combined), domain);
  map.require_increasing("sampled deformation");
  return map;
}

namespace {

constexpr std::uint64_t kPositionStream = ~0ULL;

std::vector<std::size_t> draw_anomaly_positions(std::uint64_t seed, std::size_t n,
                                                std::size_t count) {
  rng::Stream stream(seed, kPositionStream);
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t j = t + static_cast<std::size_t>(stream.next_below(n - t));
    std::swap(indices[t], indices[j]);
  }
  indices.resize(count);
  return indices;
}

std::vector<double> draw_alphas(rng::Stream& stream, const AlphaLaw& law, std::size_t k) {
  std::vector<double> alphas(k);
  for (int attempt = 0; attempt < 64; ++attempt) {
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      alphas[i] = stream.next_uniform(law.low, law.high);
      sum += alphas[i];
    }
    if (sum > 0.0) {
      if (law.normalize) {
        for (double& a : alphas) a /= sum;
      }
      return alphas;
    }
  }
  fail(Errc::AllZeroAlphas, "alpha law produced only zero draws");
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();

  const SpectralSignal background = spec.background_template.realize(spec.bands, spec.band_domain);
  const std::size_t n = spec.rows * spec.cols;
  const std::size_t n_anom =
      static_cast<std::size_t>(std::llround(spec.anomaly_fraction * static_cast<double>(n)));
  SpectralSignal anomaly = background;
  if (n_anom > 0) anomaly = spec.anomaly_template.realize(spec.bands, spec.band_domain);

  const std::vector<MonotoneMap> basis = spec.basis.realize(spec.band_domain);

  double peak = 0.0;
  for (double v : background.values) peak = std::max(peak, std::abs(v));
  const double noise_abs = spec.noise_sigma * peak;

  Scene scene;
  scene.cube.rows = spec.rows;
  scene.cube.cols = spec.cols;
  scene.cube.bands = spec.bands;
  scene.cube.band_domain = spec.band_domain;
  scene.cube.data.assign(n * spec.bands, 0.0);
  scene.mask.rows = spec.rows;
  scene.mask.cols = spec.cols;
  scene.mask.labels.assign(n, 0);

  if (n_anom > 0) {
    for (std::size_t idx : draw_anomaly_positions(spec.seed, n, n_anom)) {
      scene.mask.labels[idx] = 1;
    }
  }

  std::exception_ptr first_error = nullptr;
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(par::thread_count()) schedule(static)
  for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
    try {
      const std::size_t i = static_cast<std::size_t>(ii);
      rng::Stream stream(spec.seed, i);
      const std::vector<double> alphas = draw_alphas(stream, spec.alpha_law, basis.size());
      const MonotoneMap g_inverse = sample_deformation(basis, alphas);
      const SpectralSignal& tmpl = scene.mask.labels[i] ? anomaly : background;
      SpectralSignal sig = apply_deformation(tmpl, g_inverse);
      if (noise_abs > 0.0) {
        for (double& v : sig.values) v += noise_abs * stream.next_normal();
      }
      std::copy(sig.values.begin(), sig.values.end(),
                scene.cube.data.begin() + static_cast<std::ptrdiff_t>(i * spec.bands));
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return scene;
}

SceneSpec default_scene_spec() {
  SceneSpec spec;
  spec.rows = 64;
  spec.cols = 64;
  spec.bands = 96;
  spec.background_template.gaussians = {
      {0.25, 0.05, 1.0}, {0.50, 0.08, 0.7}, {0.75, 0.06, 0.9}};
  spec.background_template.floor = 0.02;
  spec.anomaly_template.gaussians = {
      {0.45, 0.05, 1.0}, {0.50, 0.08, 0.7}, {0.75, 0.06, 0.9}};
  spec.anomaly_template.floor = 0.02;
  spec.basis.generators = {
      {GeneratorSpec::Kind::Identity, 1.0, {}},
      {GeneratorSpec::Kind::Power, 2.0, {}},
      {GeneratorSpec::Kind::Smoothstep, 1.0, {}}};
  spec.alpha_law = {0.2, 1.0, false};
  spec.anomaly_fraction = 0.01;
  spec.noise_sigma = 0.005;
  spec.seed = 1;
  return spec;
}

namespace {

using nlohmann::ordered_json;

const char* generator_kind_name(GeneratorSpec::Kind kind) {
  switch (kind) {
    case GeneratorSpec::Kind::Identity: return "identity";
    case GeneratorSpec::Kind::Power: return "power";
    case GeneratorSpec::Kind::Smoothstep: return "smoothstep";
    case GeneratorSpec::Kind::Table: return "table";
  }
  return "identity";
}

ordered_json template_to_json(const TemplateSpec& t) {
  ordered_json j;
  if (!t.values.empty()) {
    j["values"] = t.values;
  } else {
    ordered_json bumps = ordered_json::array();
    for (const auto& g : t.gaussians) {
      bumps.push_back({{"center", g.center}, {"width", g.width}, {"amplitude", g.amplitude}});
    }
    j["gaussians"] = bumps;
    j["floor"] = t.floor;
  }
  return j;
}

void check_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(Errc::UnsupportedField,
           std::string(where) + " has unknown field '" + item.key() + "'");
    }
  }
}

TemplateSpec template_from_json(const ordered_json& j, const char* where) {
  require(j.is_object(), Errc::ParseError, std::string(where) + " must be an object");
  check_keys(j, {"values", "gaussians", "floor"}, where);
  TemplateSpec t;
  if (j.contains("values")) t.values = j.at("values").get<std::vector<double>>();
  if (j.contains("floor")) t.floor = j.at("floor").get<double>();
  if (j.contains("gaussians")) {
    for (const auto& g : j.at("gaussians")) {
      check_keys(g, {"center", "width", "amplitude"}, "gaussian bump");
      GaussianBump bump;
      bump.center = g.at("center").get<double>();
      bump.width = g.at("width").get<double>();
      bump.amplitude = g.at("amplitude").get<double>();
      t.gaussians.push_back(bump);
    }
  }
  return t;
}

GeneratorSpec generator_from_json(const ordered_json& j) {
  require(j.is_object(), Errc::ParseError, "generator must be an object");
  check_keys(j, {"type", "exponent", "values"}, "generator");
  const std::string type = j.at("type").get<std::string>();
  GeneratorSpec g;
  if (type == "identity") {
    g.kind = GeneratorSpec::Kind::Identity;
  } else if (type == "power") {
    g.kind = GeneratorSpec::Kind::Power;
    g.exponent = j.at("exponent").get<double>();
  } else if (type == "smoothstep") {
    g.kind = GeneratorSpec::Kind::Smoothstep;
  } else if (type == "table") {
    g.kind = GeneratorSpec::Kind::Table;
    g.values = j.at("values").get<std::vector<double>>();
  } else {
    fail(Errc::UnsupportedField, "unknown generator type '" + type + "'");
  }
  return g;
}

}  // namespace

SceneSpec scene_spec_from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::ParseError, std::string("scene spec: ") + e.what());
  }
  require(j.is_object(), Errc::ParseError, "scene spec must be a JSON object");
  check_keys(j,
             {"rows", "cols", "bands", "band_domain", "template", "anomaly_template",
              "basis", "alpha_law", "anomaly_fraction", "noise_sigma", "seed",
              "signed_mode"},
             "scene spec");

  SceneSpec spec = default_scene_spec();
  if (j.contains("rows")) spec.rows = j.at("rows").get<std::size_t>();
  if (j.contains("cols")) spec.cols = j.at("cols").get<std::size_t>();
  if (j.contains("bands")) spec.bands = j.at("bands").get<std::size_t>();
  if (j.contains("band_domain")) {
    const auto& d = j.at("band_domain");
    require(d.is_array() && d.size() == 2, Errc::ParseError,
            "band_domain must be [lo, hi]");
    spec.band_domain = {d[0].get<double>(), d[1].get<double>()};
  }
  if (j.contains("template")) {
    spec.background_template = template_from_json(j.at("template"), "template");
  }
  if (j.contains("anomaly_template")) {
    spec.anomaly_template = template_from_json(j.at("anomaly_template"), "anomaly_template");
  }
  if (j.contains("basis")) {
    const auto& b = j.at("basis");
    require(b.is_object(), Errc::ParseError, "basis must be an object");
    check_keys(b, {"generators"}, "basis");
    spec.basis.generators.clear();
    for (const auto& g : b.at("generators")) {
      spec.basis.generators.push_back(generator_from_json(g));
    }
  }
  if (j.contains("alpha_law")) {
    const auto& a = j.at("alpha_law");
    require(a.is_object(), Errc::ParseError, "alpha_law must be an object");
    check_keys(a, {"low", "high", "normalize"}, "alpha_law");
    if (a.contains("low")) spec.alpha_law.low = a.at("low").get<double>();
    if (a.contains("high")) spec.alpha_law.high = a.at("high").get<double>();
    if (a.contains("normalize")) spec.alpha_law.normalize = a.at("normalize").get<bool>();
  }
  if (j.contains("anomaly_fraction")) {
    spec.anomaly_fraction = j.at("anomaly_fraction").get<double>();
  }
  if (j.contains("noise_sigma")) spec.noise_sigma = j.at("noise_sigma").get<double>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("signed_mode")) spec.signed_mode = j.at("signed_mode").get<bool>();
  return spec;
}

std::string scene_spec_to_json_text(const SceneSpec& spec) {
  ordered_json j;
  j["rows"] = spec.rows;
  j["cols"] = spec.cols;
  j["bands"] = spec.bands;
  j["band_domain"] = {spec.band_domain.lo, spec.band_domain.hi};
  j["template"] = template_to_json(spec.background_template);
  j["anomaly_template"] = template_to_json(spec.anomaly_template);
  ordered_json generators = ordered_json::array();
  for (const auto& g : spec.basis.generators) {
    ordered_json gj;
    gj["type"] = generator_kind_name(g.kind);
    if (g.kind == GeneratorSpec::Kind::Power) gj["exponent"] = g.exponent;
    if (g.kind == GeneratorSpec::Kind::Table) gj["values"] = g.values;
    generators.push_back(gj);
  }
  j["basis"] = {{"generators", generators}};
  j["alpha_law"] = {{"low", spec.alpha_law.low},
                    {"high", spec.alpha_law.high},
                    {"normalize", spec.alpha_law.normalize}};
  j["anomaly_fraction"] = spec.anomaly_fraction;
  j["noise_sigma"] = spec.noise_sigma;
  j["seed"] = spec.seed;
  j["signed_mode"] = spec.signed_mode;
  return j.dump(2) + "\n";
}

}  // namespace had
