#include <doctest.h>

#include <cmath>
#include <vector>

#include "had/parallel.hpp"
#include "had/subspace.hpp"
#include "had/synth.hpp"

using namespace had;

namespace {

std::vector<MonotoneMap> default_basis_maps() {
  return default_scene_spec().basis.realize({0.0, 1.0});
}

}  // namespace

TEST_CASE("a scaled identity generator normalizes back to the identity") {
  DeformationBasis basis;
  basis.generators = {{GeneratorSpec::Kind::Identity, 1.0, {}}};
  const auto maps = basis.realize({0.0, 1.0});
  const std::vector<double> alphas = {5.0};
  const MonotoneMap g = sample_deformation(maps, alphas);
  for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    CHECK(g(x) == doctest::Approx(x).epsilon(1e-14));
  }
}

TEST_CASE("equal weights on x and x^2 give their normalized average") {
  DeformationBasis basis;
  basis.generators = {{GeneratorSpec::Kind::Identity, 1.0, {}},
                      {GeneratorSpec::Kind::Power, 2.0, {}}};
  const auto maps = basis.realize({0.0, 1.0});
  const std::vector<double> alphas = {1.0, 1.0};
  const MonotoneMap g = sample_deformation(maps, alphas);
  // table interpolation of the quadratic is exact to O(step^2)
  for (double x : {0.1, 0.3, 0.5, 0.9}) {
    CHECK(g(x) == doctest::Approx((x + x * x) / 2.0).epsilon(1e-7));
  }
  CHECK(g.strictly_increasing());
}

TEST_CASE("all-zero coefficients are rejected") {
  const auto maps = default_basis_maps();
  const std::vector<double> alphas = {0.0, 0.0, 0.0};
  try {
    sample_deformation(maps, alphas);
    FAIL("expected AllZeroAlphas");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AllZeroAlphas);
  }
}

TEST_CASE("degenerate coefficient law collapses the scene to one spectrum") {
  SceneSpec spec = default_scene_spec();
  spec.rows = 8;
  spec.cols = 8;
  spec.bands = 48;
  spec.anomaly_fraction = 0.0;
  spec.noise_sigma = 0.0;
  spec.alpha_law = {0.7, 0.7, false};

  const Scene scene = generate_scene(spec);
  const auto first = scene.cube.pixel_span(0);
  for (std::size_t i = 1; i < scene.cube.pixel_count(); ++i) {
    const auto px = scene.cube.pixel_span(i);
    for (std::size_t b = 0; b < scene.cube.bands; ++b) CHECK(px[b] == first[b]);
  }
  CHECK(scene.mask.anomaly_count() == 0);

  const ScdtDetectorResult result = score_cube(scene.cube);
  CHECK(result.model.dimension == 1);
}

TEST_CASE("a noiseless three-generator scene stays within three fitted dimensions") {
  SceneSpec spec = default_scene_spec();
  spec.rows = 24;
  spec.cols = 24;
  spec.bands = 48;
  spec.anomaly_fraction = 0.0;
  spec.noise_sigma = 0.0;
  spec.seed = 5;

  const Scene scene = generate_scene(spec);
  const ScdtDetectorResult result = score_cube(scene.cube);
  CHECK(result.model.dimension <= 3);
}

TEST_CASE("the same spec generates bit-identical output twice") {
  SceneSpec spec = default_scene_spec();
  spec.rows = 12;
  spec.cols = 10;
  spec.bands = 32;
  spec.seed = 99;
  const Scene a = generate_scene(spec);
  const Scene b = generate_scene(spec);
  CHECK(a.cube.data == b.cube.data);
  CHECK(a.mask.labels == b.mask.labels);
}

TEST_CASE("thread count does not change the generated scene") {
  SceneSpec spec = default_scene_spec();
  spec.rows = 16;
  spec.cols = 9;
  spec.bands = 32;
  spec.seed = 1234;

  par::set_thread_override(1);
  const Scene serial = generate_scene(spec);
  par::set_thread_override(0);
  const Scene parallel = generate_scene(spec);
  CHECK(serial.cube.data == parallel.cube.data);
  CHECK(serial.mask.labels == parallel.mask.labels);
}

TEST_CASE("the anomaly count follows the rounded fraction") {
  SceneSpec spec = default_scene_spec();
  spec.rows = 64;
  spec.cols = 64;
  spec.bands = 16;
  spec.anomaly_fraction = 0.01;
  const Scene scene = generate_scene(spec);
  CHECK(scene.mask.anomaly_count() == 41);  // round(0.01 * 4096)
  CHECK(scene.mask.rows == 64);
  CHECK(scene.mask.cols == 64);
}

TEST_CASE("invalid specs are rejected before any work") {
  SceneSpec spec = default_scene_spec();

  SUBCASE("empty basis") {
    spec.basis.generators.clear();
    CHECK_THROWS_AS(generate_scene(spec), Error);
  }
  SUBCASE("fraction rounding to zero pixels") {
    spec.rows = 4;
    spec.cols = 4;
    spec.anomaly_fraction = 0.01;
    try {
      generate_scene(spec);
      FAIL("expected BadSpec");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::BadSpec);
    }
  }
  SUBCASE("fraction above the supported range") {
    spec.anomaly_fraction = 0.25;
    CHECK_THROWS_AS(generate_scene(spec), Error);
  }
  SUBCASE("negative template without signed mode") {
    spec.background_template.values.assign(spec.bands, 1.0);
    spec.background_template.values[3] = -0.5;
    CHECK_THROWS_AS(generate_scene(spec), Error);
    spec.signed_mode = true;
    CHECK_NOTHROW(generate_scene(spec));
  }
  SUBCASE("zero-only coefficient law") {
    spec.alpha_law = {0.0, 0.0, false};
    CHECK_THROWS_AS(generate_scene(spec), Error);
  }
  SUBCASE("duplicated generators are linearly dependent") {
    spec.basis.generators = {{GeneratorSpec::Kind::Identity, 1.0, {}},
                             {GeneratorSpec::Kind::Identity, 1.0, {}}};
    try {
      generate_scene(spec);
      FAIL("expected BadSpec");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::BadSpec);
    }
  }
}

TEST_CASE("scene specs round-trip through JSON") {
  SceneSpec spec = default_scene_spec();
  spec.rows = 32;
  spec.seed = 777;
  spec.basis.generators.push_back(
      {GeneratorSpec::Kind::Table, 1.0, {0.0, 0.2, 0.5, 0.9, 1.0}});
  const std::string text = scene_spec_to_json_text(spec);
  const SceneSpec parsed = scene_spec_from_json_text(text);
  CHECK(scene_spec_to_json_text(parsed) == text);
  CHECK(parsed.rows == 32);
  CHECK(parsed.seed == 777);
  CHECK(parsed.basis.generators.size() == 4);

  const Scene a = generate_scene(spec);
  const Scene b = generate_scene(parsed);
  CHECK(a.cube.data == b.cube.data);
}

TEST_CASE("unknown spec fields are rejected") {
  try {
    scene_spec_from_json_text("{\"rows\": 8, \"colz\": 8}");
    FAIL("expected UnsupportedField");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnsupportedField);
  }
  try {
    scene_spec_from_json_text("{rows: }");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
  }
}

TEST_CASE("partial specs inherit defaults") {
  const SceneSpec spec = scene_spec_from_json_text("{\"rows\": 8, \"cols\": 8, \"seed\": 3}");
  CHECK(spec.rows == 8);
  CHECK(spec.bands == default_scene_spec().bands);
  CHECK(spec.basis.generators.size() == 3);
  CHECK(spec.seed == 3);
}
