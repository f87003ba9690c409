#include <benchmark/benchmark.h>

#include <chromaprobe/hashing.hpp>
#include <chromaprobe/probe.hpp>

using namespace chromaprobe;

static void BM_PredictLabel(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  SplitMixStream rng(3);
  LabelEmbeddings labels;
  for (auto& l : labels) {
    l.resize(dim);
    for (auto& v : l) v = rng.uniform(-1.0, 1.0);
  }
  std::vector<double> image(dim);
  for (auto& v : image) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(predict_label(image, labels));
}
BENCHMARK(BM_PredictLabel)->Arg(512)->Arg(1024);
