#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chromaprobe/color_vocab.hpp"
#include "chromaprobe/exchange.hpp"
#include "chromaprobe/image.hpp"

namespace chromaprobe {

/// Spatially max-pooled, rectified activations of one layer (neurons x images).
class ActivationMatrix {
 public:
  /// Throws InputError on shape mismatch or on negative / non-finite values.
  ActivationMatrix(std::string layer, std::size_t neurons, std::vector<std::string> image_refs,
                   std::vector<double> values);
  explicit ActivationMatrix(const ActivationDump& dump);

  const std::string& layer() const { return layer_; }
  std::size_t neurons() const { return neurons_; }
  std::size_t images() const { return image_refs_.size(); }
  const std::vector<std::string>& image_refs() const { return image_refs_; }

  double at(std::size_t neuron, std::size_t image) const { return values_[neuron * images() + image]; }
  std::span<const double> row(std::size_t neuron) const {
    return std::span<const double>(values_).subspan(neuron * images(), images());
  }

 private:
  std::string layer_;
  std::size_t neurons_;
  std::vector<std::string> image_refs_;
  std::vector<double> values_;
};

struct CropBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
};

struct TopKEntry {
  std::size_t image = 0;  // column in the activation matrix
  double activation = 0.0;
  std::optional<CropBox> box;
};

struct TopKSet {
  std::size_t neuron = 0;
  std::vector<TopKEntry> entries;  // activation non-increasing, ties by column
  bool truncated = false;          // fewer candidates than requested
};

/// Highest-activation images of one neuron. When `columns` is non-empty the
/// search is restricted to those columns.
TopKSet top_k(const ActivationMatrix& matrix, std::size_t neuron, std::size_t k,
              std::span<const std::size_t> columns = {});

/// Fractional activation drop under grayscale conversion,
/// max(0, 1 - sum(gray) / sum(color)), clamped to [0, 1]. Empty when the
/// color activations sum to zero.
std::optional<double> color_selectivity_index(std::span<const double> color_acts,
                                              std::span<const double> gray_acts);

using LabelFrequencies = PerColor<double>;

/// Image -> label map indexed by matrix column; empty entries are unlabeled.
using ColumnLabels = std::span<const std::optional<ColorId>>;

/// Activation-weighted relative frequency of each label among the top
/// images: f_c = sum of activations of images labeled c / sum of all top
/// activations. Empty when the total activation is zero.
std::optional<LabelFrequencies> color_label_selectivity(const TopKSet& topk, ColumnLabels labels);

/// Font and background labels pooled: every image contributes half its
/// weight to each of its two labels.
std::optional<LabelFrequencies> pooled_label_selectivity(const TopKSet& topk, ColumnLabels font,
                                                         ColumnLabels background);

/// Activation-weighted mean of the crops; crops[i] belongs to topk.entries[i]
/// and all crops share one geometry.
RgbImage neuron_feature(const TopKSet& topk, std::span<const RgbImage> crops);

/// Saturation-weighted circular mean of per-pixel hues. Empty when the mean
/// saturation is below `min_saturation` or the hues cancel out.
std::optional<double> dominant_hue(const RgbImage& feature, double min_saturation = 0.1);

struct HueHistogram {
  std::vector<double> mass;  // fixed-width bins over [0, 360)
  std::size_t samples = 0;

  std::size_t bins() const { return mass.size(); }
  double bin_width() const { return 360.0 / static_cast<double>(mass.size()); }
  bool empty() const { return samples == 0; }
};

HueHistogram hue_histogram(std::span<const double> hues, std::size_t bins);

/// Pearson correlation of two equally sized samples; empty when either has
/// zero variance.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);
std::optional<double> pearson(const HueHistogram& a, const HueHistogram& b);

enum class NeuronKind : std::uint8_t {
  Color,
  AnyWord,
  ColorWord,
  ColorMultimodal,
  NotActivated,
  Unclassified,
};

struct NeuronType {
  NeuronKind kind = NeuronKind::Unclassified;
  std::optional<ColorId> term;  // set for Color, ColorWord, ColorMultimodal

  friend bool operator==(const NeuronType&, const NeuronType&) = default;
};

/// Reporting categories; Color splits by the chromaticity of its term.
enum class TypeCategory : std::uint8_t {
  ColorChromatic,
  ColorAchromatic,
  AnyWord,
  ColorWord,
  ColorMultimodal,
  NotActivated,
  Unclassified,
};
inline constexpr std::size_t kNumTypeCategories = 7;

TypeCategory category_of(const NeuronType& type);
std::string_view to_string(TypeCategory c);
std::string to_string(const NeuronType& type, const Palette& palette = Palette::standard());

struct ClassifierInputs {
  std::optional<LabelFrequencies> word;
  std::optional<LabelFrequencies> font;
  std::optional<LabelFrequencies> background;
  double any_word_max = 0.0;  // max activation over text-bearing probe images
  double stroop_max = 0.0;
  double reference_max = 0.0;
};

struct ClassifierThresholds {
  double theta_high = 0.5;
  double theta_active = 0.5;
};

/// Applies the decision list: NotActivated, ColorMultimodal, ColorWord,
/// Color, AnyWord, else Unclassified. A neuron with zero Stroop activation
/// is NotActivated. Throws InputError naming any missing modality.
NeuronType classify_neuron(const ClassifierInputs& inputs, const ClassifierThresholds& thresholds = {});

struct NeuronProfile {
  std::string layer;
  std::size_t neuron = 0;
  std::optional<double> color_selectivity;
  std::optional<LabelFrequencies> f_word;
  std::optional<LabelFrequencies> f_font;
  std::optional<LabelFrequencies> f_background;
  std::optional<LabelFrequencies> f_pooled;
  std::optional<double> dominant_hue;
  NeuronType type;
  double stroop_max = 0.0;
  double reference_max = 0.0;
  double any_word_max = 0.0;
};

/// Dominant hues of neurons with color selectivity above `alpha_threshold`.
HueHistogram hue_histogram(std::span<const NeuronProfile> profiles, std::size_t bins,
                           double alpha_threshold);

struct LayerDistribution {
  std::string layer;
  std::array<std::uint64_t, kNumTypeCategories> counts{};
  std::uint64_t total = 0;

  double ratio(TypeCategory c) const;
};

/// Per-layer counts in order of first appearance.
std::vector<LayerDistribution> layer_type_distribution(std::span<const NeuronProfile> profiles);

/// Column roles for one layer's analysis.
struct AnalysisCorpus {
  std::vector<std::size_t> stroop_columns;
  std::vector<std::size_t> reference_columns;
  std::vector<std::size_t> text_reference_columns;
  std::vector<std::optional<std::size_t>> gray_column;  // by column; grayscale twin
  std::vector<std::optional<ColorId>> word;        // by column
  std::vector<std::optional<ColorId>> font;        // by column
  std::vector<std::optional<ColorId>> background;  // by column
};

/// Loads the image used for neuron features; receives the top-K entry.
using FeatureSource = std::function<std::optional<RgbImage>(std::size_t neuron, const TopKEntry&)>;

struct AnalysisOptions {
  std::size_t top_k = 100;
  ClassifierThresholds thresholds;
  unsigned jobs = 1;
  FeatureSource features;  // optional
  Geometry feature_geometry{56, 56};
};

/// Builds column roles by matching image references to record ids.
AnalysisCorpus build_corpus(const ActivationMatrix& matrix, std::span<const std::string> stroop_ids,
                            std::span<const std::string> reference_ids,
                            std::span<const std::string> text_reference_ids,
                            std::span<const std::optional<ColorId>> stroop_word,
                            std::span<const std::optional<ColorId>> stroop_font,
                            std::span<const std::optional<ColorId>> stroop_background,
                            std::string_view gray_suffix);

/// Profiles for every neuron of one layer.
std::vector<NeuronProfile> analyze_layer(const ActivationMatrix& matrix, const AnalysisCorpus& corpus,
                                         const AnalysisOptions& options);

}  // namespace chromaprobe
