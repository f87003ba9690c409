#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chromaprobe/activation_lab.hpp"
#include "chromaprobe/manifest_io.hpp"
#include "chromaprobe/probe.hpp"

namespace chromaprobe {

/// Percentage with two decimals, or "n/a" for an empty cell.
std::string format_pct(const std::optional<double>& ratio);

/// "# key=value" lines that open every CSV artifact.
std::string csv_provenance(const Provenance& provenance);

// Chromaticity tables. The long form carries counts and parses back into the
// exact table; the grid form mirrors the 2x2 "background / object" layout.
std::string chromaticity_csv(const ChromaticityTable& table, const Provenance& provenance = {});
std::string chromaticity_grid_csv(const ChromaticityTable& table, const Provenance& provenance = {});
ChromaticityTable parse_chromaticity_csv(std::string_view text);

// Stroop tables: one row per font color in vocabulary order, then "global".
std::string stroop_csv(const StroopTable& table, const Palette& palette,
                       const Provenance& provenance = {});
StroopTable parse_stroop_csv(std::string_view text, const Palette& palette);

struct PromptRow {
  std::string template_id;
  std::string template_text;
  StroopRow row;
};

/// Answer distribution per prompt template.
std::string prompts_csv(std::span<const PromptRow> rows, const Provenance& provenance = {});

std::string layer_types_csv(std::span<const LayerDistribution> layers, const Provenance& provenance = {});
std::vector<LayerDistribution> parse_layer_types_csv(std::string_view text);

std::string hue_histogram_csv(const HueHistogram& histogram, const Provenance& provenance = {});
/// Reads bin masses from a hue histogram CSV (or a bare one-column list).
HueHistogram parse_hue_histogram_csv(std::string_view text);

std::string profiles_to_ndjson(std::span<const NeuronProfile> profiles, const Palette& palette,
                               const Provenance& provenance = {});
std::vector<NeuronProfile> parse_profiles(std::string_view text, const Palette& palette);

struct BarSeries {
  std::string name;
  std::vector<double> values;  // one per category
};

/// Grouped vertical bars; values are percentages in [0, 100].
std::string grouped_bars_svg(std::string_view title, std::span<const std::string> categories,
                             std::span<const BarSeries> series, const Provenance& provenance = {});

/// One stacked bar per layer; segment heights are type percentages and each
/// segment carries data-layer / data-type / data-pct attributes.
std::string layer_types_svg(std::span<const LayerDistribution> layers, const Provenance& provenance = {});

std::string stroop_svg(const StroopTable& table, const Palette& palette, const Provenance& provenance = {});
std::string chromaticity_svg(const ChromaticityTable& table, const Provenance& provenance = {});
std::string hue_histogram_svg(const HueHistogram& histogram, const HueHistogram* reference,
                              const Provenance& provenance = {});
/// Color selectivity distribution per layer (10 bins over [0, 1]).
std::string selectivity_svg(std::span<const NeuronProfile> profiles, const Provenance& provenance = {});

}  // namespace chromaprobe
