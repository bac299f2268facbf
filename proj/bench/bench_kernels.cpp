// Throughput comparison of the OpenMP kernels against their serial
// reference implementations. Outputs are asserted bit-identical in the
// unit tests; this target only measures the speed difference.

#include <benchmark/benchmark.h>

#include "had/parallel.hpp"
#include "had/reference.hpp"
#include "had/rx.hpp"
#include "had/scdt.hpp"
#include "had/subspace.hpp"
#include "had/synth.hpp"

namespace {

const had::Scene& bench_scene() {
  static const had::Scene scene = [] {
    had::SceneSpec spec = had::default_scene_spec();
    spec.rows = 48;
    spec.cols = 48;
    spec.bands = 64;
    spec.seed = 4242;
    return had::generate_scene(spec);
  }();
  return scene;
}

const had::DataMatrix& bench_matrix() {
  static const had::DataMatrix data = had::transform_cube(bench_scene().cube, 128);
  return data;
}

const had::BackgroundSubspace& bench_model() {
  static const had::BackgroundSubspace model = had::fit_subspace(bench_matrix());
  return model;
}

const had::RxModel& bench_rx_model() {
  static const had::RxModel model = had::fit_rx_auto(bench_scene().cube);
  return model;
}

void BM_transform_serial(benchmark::State& state) {
  bench_scene();
  for (auto _ : state) {
    benchmark::DoNotOptimize(had::ref::transform_cube(bench_scene().cube, 128));
  }
}

void BM_transform_omp(benchmark::State& state) {
  bench_scene();
  for (auto _ : state) {
    benchmark::DoNotOptimize(had::transform_cube(bench_scene().cube, 128));
  }
}

void BM_scatter_serial(benchmark::State& state) {
  bench_matrix();
  for (auto _ : state) {
    benchmark::DoNotOptimize(had::ref::scatter_matrix(bench_matrix()));
  }
}

void BM_scatter_omp(benchmark::State& state) {
  bench_matrix();
  for (auto _ : state) {
    benchmark::DoNotOptimize(had::scatter_matrix(bench_matrix()));
  }
}

void BM_subspace_scores_serial(benchmark::State& state) {
  bench_model();
  for (auto _ : state) {
    benchmark::DoNotOptimize(had::ref::subspace_scores(bench_matrix(), bench_model()));
  }
}

void BM_subspace_scores_omp(benchmark::State& state) {
  bench_model();
  for (auto _ : state) {
    benchmark::DoNotOptimize(had::subspace_scores(bench_matrix(), bench_model()));
  }
}

void BM_rx_scores_serial(benchmark::State& state) {
  bench_rx_model();
  for (auto _ : state) {
    benchmark::DoNotOptimize(had::ref::rx_score_cube(bench_scene().cube, bench_rx_model()));
  }
}

void BM_rx_scores_omp(benchmark::State& state) {
  bench_rx_model();
  for (auto _ : state) {
    benchmark::DoNotOptimize(had::rx_score_cube(bench_scene().cube, bench_rx_model()));
  }
}

void BM_generate_scene(benchmark::State& state) {
  had::SceneSpec spec = had::default_scene_spec();
  spec.rows = 48;
  spec.cols = 48;
  spec.bands = 64;
  spec.seed = 4242;
  had::par::set_thread_override(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(had::generate_scene(spec));
  }
  had::par::set_thread_override(0);
}

}  // namespace

BENCHMARK(BM_transform_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_transform_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_scatter_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_scatter_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_subspace_scores_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_subspace_scores_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rx_scores_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rx_scores_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_generate_scene)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
