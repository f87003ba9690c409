#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chromaprobe/color_vocab.hpp"
#include "chromaprobe/exchange.hpp"
#include "chromaprobe/manifest_io.hpp"
#include "chromaprobe/prompt_bank.hpp"
#include "chromaprobe/stimulus.hpp"

namespace chromaprobe {

/// What a predicted label corresponds to in the scene's ground truth.
enum class Outcome : std::uint8_t {
  BackgroundColor,
  ObjectOrFontColor,
  WrittenColor,
  NoneOfInput,  // Stroop scenes: a color not present in the stimulus
  Incorrect,    // shape scenes: neither background nor object
};

std::string_view to_string(Outcome o);
Outcome parse_outcome(std::string_view s);

using LabelEmbeddings = PerColor<std::vector<double>>;

struct LabelPrediction {
  ColorId label;
  PerColor<double> scores;  // cosine similarity per label
};

/// Cosine-similarity argmax over the 11 label embeddings. Ties resolve to
/// the first label in vocabulary order.
LabelPrediction predict_label(std::span<const double> image, const LabelEmbeddings& labels);

/// Shape records: BackgroundColor / ObjectOrFontColor / Incorrect.
/// Stroop records: BackgroundColor / ObjectOrFontColor (font) / WrittenColor / NoneOfInput.
Outcome categorize_outcome(ColorId predicted, const StimulusRecord& record);

/// Unit text embeddings for one template plus unit image embeddings by record id.
class EmbeddingSet {
 public:
  EmbeddingSet(std::size_t dim, LabelEmbeddings labels);

  /// Builds the set from adapter tables. Text rows are matched to labels by
  /// their instantiated prompt text. Every vector is re-normalized; vectors
  /// whose stored norm deviates from 1 by more than 1e-3 are counted in
  /// `warnings()`.
  static EmbeddingSet from_tables(const EmbeddingTable& text, const EmbeddingTable& images,
                                  const PromptTemplate& tmpl, const Palette& palette);

  void add_image(std::string id, std::span<const double> vec);

  std::size_t dim() const { return dim_; }
  const LabelEmbeddings& labels() const { return labels_; }
  /// Empty span when the id is unknown.
  std::span<const double> image(std::string_view id) const;
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::size_t dim_;
  LabelEmbeddings labels_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> images_;
  std::vector<std::string> warnings_;
};

struct PredictionRecord {
  std::string record_id;
  std::string template_id;
  PerColor<double> scores{};
  ColorId predicted = ColorId::Black;
  Outcome outcome = Outcome::Incorrect;
};

/// One prediction per manifest record, in manifest order.
std::vector<PredictionRecord> run_experiment(const DatasetManifest& manifest,
                                             const PromptTemplate& tmpl, const EmbeddingSet& embeddings,
                                             unsigned jobs = 1);

/// Assignment counts for one chromaticity cell; ratios are derived.
struct AssignmentCell {
  std::uint64_t total = 0;
  std::uint64_t background = 0;
  std::uint64_t object = 0;
  std::uint64_t other = 0;

  std::optional<double> background_ratio() const;
  std::optional<double> object_ratio() const;
  std::optional<double> other_ratio() const;

  friend bool operator==(const AssignmentCell&, const AssignmentCell&) = default;
};

/// 2x2 table keyed by (background chromaticity, object chromaticity).
struct ChromaticityTable {
  std::array<std::array<AssignmentCell, 2>, 2> cells{};

  AssignmentCell& at(Chromaticity background, Chromaticity object) {
    return cells[static_cast<std::size_t>(background)][static_cast<std::size_t>(object)];
  }
  const AssignmentCell& at(Chromaticity background, Chromaticity object) const {
    return cells[static_cast<std::size_t>(background)][static_cast<std::size_t>(object)];
  }

  ChromaticityTable& merge(const ChromaticityTable& other);
  friend bool operator==(const ChromaticityTable&, const ChromaticityTable&) = default;
};

struct StroopRow {
  std::uint64_t total = 0;
  std::uint64_t font = 0;  // correct answers
  std::uint64_t written = 0;
  std::uint64_t background = 0;
  std::uint64_t none = 0;

  std::optional<double> font_ratio() const;
  std::optional<double> written_ratio() const;
  std::optional<double> background_ratio() const;
  std::optional<double> none_ratio() const;

  StroopRow& merge(const StroopRow& other);
  friend bool operator==(const StroopRow&, const StroopRow&) = default;
};

/// Rows keyed by font color plus a global row.
struct StroopTable {
  PerColor<StroopRow> by_font{};
  StroopRow global;

  StroopTable& merge(const StroopTable& other);
  friend bool operator==(const StroopTable&, const StroopTable&) = default;
};

/// Predictions must align with the manifest records by position and id.
ChromaticityTable aggregate_chromaticity(std::span<const PredictionRecord> predictions,
                                         std::span<const StimulusRecord> records);
StroopTable aggregate_stroop(std::span<const PredictionRecord> predictions,
                             std::span<const StimulusRecord> records);

/// A results file: predictions plus the ground truth needed to aggregate
/// them without the originating manifest.
struct ProbeResults {
  std::string template_id;
  std::string template_text;
  DatasetKind kind = DatasetKind::Stroop;
  bool white_background = false;
  std::string palette_hash;
  std::vector<std::string> warnings;
  std::vector<PredictionRecord> predictions;
  std::vector<StimulusRecord> truths;  // color fields only
};

std::string results_to_ndjson(const ProbeResults& results, const Palette& palette,
                              const Provenance& provenance = {});
ProbeResults parse_results(std::string_view text, const Palette& palette);
ProbeResults read_results(const std::filesystem::path& path, const Palette& palette);

}  // namespace chromaprobe
