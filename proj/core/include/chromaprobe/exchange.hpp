#pragma once

// Header-plus-binary exchange files shared with the model adapter.
//
//   <stem>.emb     one JSON header line, then count x dim f32 little-endian values
//   <stem>.keys    one key per line (prompt text or record id), row order
//   <stem>.act     one JSON header line, then neurons x images f32 little-endian values
//   <stem>.images  one image reference (record id) per line, column order
//
// Headers carry "format", "version", "encoding" ("f32 little-endian row-major")
// plus the model identifier and any adapter provenance as extra string fields.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chromaprobe {

inline constexpr std::string_view kF32Encoding = "f32 little-endian row-major";

struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<std::string> keys;  // one per row
  std::vector<float> values;      // keys.size() x dim
  std::map<std::string, std::string> meta;  // model id, adapter version, ...

  std::size_t count() const { return keys.size(); }
};

struct ActivationDump {
  std::string layer;
  std::size_t neurons = 0;
  std::vector<std::string> image_refs;  // one per column
  std::vector<float> values;            // neurons x image_refs.size()
  std::map<std::string, std::string> meta;

  std::size_t images() const { return image_refs.size(); }
};

/// `stem` is the path without extension; writes are atomic (temp + rename).
void write_embeddings(const std::filesystem::path& stem, const EmbeddingTable& table);
EmbeddingTable read_embeddings(const std::filesystem::path& stem);

void write_activation_dump(const std::filesystem::path& stem, const ActivationDump& dump);
ActivationDump read_activation_dump(const std::filesystem::path& stem);

/// Reads every `*.act` file under `dir`. Dumps that share a layer name are
/// joined column-wise in file-name order; layers are returned sorted by name.
std::vector<ActivationDump> load_activation_dir(const std::filesystem::path& dir);

struct CropEntry {
  std::size_t rank = 0;
  std::string image;  // record id
  double activation = 0.0;
  std::array<int, 4> box{};  // x0, y0, x1, y1 in source-image pixels
  std::filesystem::path path;  // crop PNG, resolved against the crop root `dir`
};

/// Crop index written by the adapter for one neuron:
/// `<dir>/<layer>/<neuron>.ndjson`, one JSON object per crop with fields
/// rank, image, activation, box [x0,y0,x1,y1] and path. Returns empty when
/// the index does not exist.
std::vector<CropEntry> read_crop_index(const std::filesystem::path& dir, const std::string& layer,
                                       std::size_t neuron);

}  // namespace chromaprobe
