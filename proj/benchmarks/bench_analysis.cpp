#include <benchmark/benchmark.h>

#include <chromaprobe/activation_lab.hpp>
#include <chromaprobe/hashing.hpp>

using namespace chromaprobe;

namespace {

ActivationMatrix random_matrix(std::size_t neurons, std::size_t images) {
  SplitMixStream rng(42);
  std::vector<double> values(neurons * images);
  for (auto& v : values) v = rng.uniform();
  std::vector<std::string> refs;
  for (std::size_t i = 0; i < images; ++i) refs.push_back("img" + std::to_string(i));
  return ActivationMatrix("layer", neurons, std::move(refs), std::move(values));
}

}  // namespace

static void BM_TopK(benchmark::State& state) {
  const auto m = random_matrix(16, static_cast<std::size_t>(state.range(0)));
  std::size_t n = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(top_k(m, n, 100));
    n = (n + 1) % m.neurons();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TopK)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_LabelSelectivity(benchmark::State& state) {
  const auto m = random_matrix(1, 4950);
  std::vector<std::optional<ColorId>> labels(m.images());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<ColorId>(i % kNumColorTerms);
  const auto topk = top_k(m, 0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(color_label_selectivity(topk, labels));
}
BENCHMARK(BM_LabelSelectivity)->Arg(25)->Arg(100)->Arg(1000);

static void BM_AnalyzeLayer(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 990);
  AnalysisCorpus corpus;
  corpus.gray_column.assign(m.images(), std::nullopt);
  corpus.word.assign(m.images(), std::nullopt);
  corpus.font.assign(m.images(), std::nullopt);
  corpus.background.assign(m.images(), std::nullopt);
  for (std::size_t i = 0; i < m.images(); ++i) {
    corpus.stroop_columns.push_back(i);
    corpus.reference_columns.push_back(i);
    corpus.word[i] = static_cast<ColorId>(i % kNumColorTerms);
    corpus.font[i] = static_cast<ColorId>((i / 11) % kNumColorTerms);
    corpus.background[i] = static_cast<ColorId>((i / 121) % kNumColorTerms);
  }
  AnalysisOptions options;
  options.jobs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(analyze_layer(m, corpus, options));
}
BENCHMARK(BM_AnalyzeLayer)->Arg(64)->Arg(256);
