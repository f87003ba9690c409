#include <benchmark/benchmark.h>

#include <chromaprobe/stimulus.hpp>

using namespace chromaprobe;

static void BM_RenderShape(benchmark::State& state) {
  ShapeSceneSpec spec;
  spec.shape = static_cast<ShapeKind>(state.range(0));
  spec.rotation_deg = 17.0;
  spec.scale = 0.45;
  for (auto _ : state) benchmark::DoNotOptimize(render_scene(spec));
  state.SetLabel(std::string(to_string(spec.shape)));
}
BENCHMARK(BM_RenderShape)->DenseRange(0, 7);

static void BM_RenderStroop(benchmark::State& state) {
  StroopSceneSpec spec;
  spec.word = ColorId::Orange;
  spec.font_id = static_cast<int>(state.range(0));
  spec.font_size = 40;
  for (auto _ : state) benchmark::DoNotOptimize(render_scene(spec));
  state.SetLabel(std::string(font_name(spec.font_id)));
}
BENCHMARK(BM_RenderStroop)->DenseRange(0, 2);

static void BM_EnumerateStroop(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_stroop_dataset(2, 7));
}
BENCHMARK(BM_EnumerateStroop);
