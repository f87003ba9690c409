#pragma once

// Stand-in for the model adapter: writes embedding and activation exchange
// files whose contents are simple functions of the scene ground truth.

#include <chromaprobe/exchange.hpp>
#include <chromaprobe/prompt_bank.hpp>
#include <chromaprobe/stimulus.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace fake {

using namespace chromaprobe;

inline constexpr std::size_t kDim = 16;

inline void add_onehot(std::vector<float>& row, std::size_t offset, ColorId c, float w) {
  row[offset + index_of(c)] += w;
}

// Text rows are one-hot on the label. Stroop images lean towards the written
// word (a reader), shape images towards the object.
inline void write_embeddings_for(const std::filesystem::path& dir, const DatasetManifest& manifest,
                                 std::span<const PromptTemplate> templates,
                                 const Palette& palette = Palette::standard()) {
  std::filesystem::create_directories(dir);
  for (const auto& t : templates) {
    EmbeddingTable text;
    text.dim = kDim;
    text.meta["model"] = "fake-reader";
    for (auto id : kAllColorIds) {
      text.keys.push_back(instantiate(t, id, palette));
      std::vector<float> row(kDim, 0.0f);
      add_onehot(row, 0, id, 1.0f);
      text.values.insert(text.values.end(), row.begin(), row.end());
    }
    write_embeddings(dir / ("text-" + t.id()), text);
  }
  EmbeddingTable images;
  images.dim = kDim;
  images.meta["model"] = "fake-reader";
  for (const auto& r : manifest.records) {
    std::vector<float> row(kDim, 0.0f);
    if (r.is_stroop()) {
      add_onehot(row, 0, r.stroop().word, 1.0f);
      add_onehot(row, 0, r.stroop().font_color, 0.3f);
      add_onehot(row, 0, r.stroop().background, 0.2f);
    } else {
      add_onehot(row, 0, r.shape().object_color, 0.5f);
      add_onehot(row, 0, r.shape().background, 0.4f);
    }
    row[kDim - 1] = 0.1f;
    images.keys.push_back(r.id);
    images.values.insert(images.values.end(), row.begin(), row.end());
  }
  write_embeddings(dir / "images", images);
}

// Neuron 0 reads the word "red"; neuron 1 never fires on Stroop images;
// neuron 2 follows blue font color and loses most of its response in gray;
// neuron 3 fires on any text.
inline void write_activations_for(const std::filesystem::path& dir, const DatasetManifest& stroop,
                                  const DatasetManifest& stroop_gray) {
  ActivationDump d;
  d.layer = "layer4";
  d.neurons = 4;
  d.meta["model"] = "fake-reader";
  std::vector<std::array<float, 4>> columns;
  for (const auto& r : stroop.records) {
    const auto& s = r.stroop();
    d.image_refs.push_back(r.id);
    columns.push_back({s.word == ColorId::Red ? 4.0f : 0.1f, 0.0f, s.font_color == ColorId::Blue ? 3.0f : 0.2f,
                       1.0f});
  }
  for (const auto& r : stroop_gray.records) {
    d.image_refs.push_back(r.id);
    columns.push_back({0.1f, 0.5f, 0.3f, 1.0f});
  }
  d.values.resize(d.neurons * columns.size());
  for (std::size_t n = 0; n < d.neurons; ++n) {
    for (std::size_t c = 0; c < columns.size(); ++c) d.values[n * columns.size() + c] = columns[c][n];
  }
  std::filesystem::create_directories(dir);
  write_activation_dump(dir / "layer4", d);
}

}  // namespace fake
