#pragma once

// Subcommand pipelines behind the chromaprobe CLI. Each one resolves its
// inputs, writes its artifacts and returns a flat summary.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chromaprobe/activation_lab.hpp"
#include "chromaprobe/color_vocab.hpp"
#include "chromaprobe/manifest_io.hpp"
#include "chromaprobe/stimulus.hpp"

namespace chromaprobe {

inline constexpr std::string_view kToolVersion = "chromaprobe 1.0.0";

struct RunContext {
  Palette palette = Palette::standard();
  unsigned jobs = 0;  // 0: hardware concurrency
  std::function<void(std::string_view)> progress;  // optional
};

/// Ordered key/value facts about a finished run.
using Summary = std::vector<std::pair<std::string, std::string>>;

/// FNV-1a over "key=value\n" lines; identifies a configuration.
std::string config_hash(const Provenance& settings);

struct GenerateOptions {
  DatasetKind kind = DatasetKind::Shapes;
  std::uint32_t samples = 1;
  std::uint64_t seed = 0;
  bool white_background = false;  // Stroop only
  bool grayscale = false;         // also write the ":gray" companion corpus
  GeneratorOptions generator;
  std::filesystem::path out;
};

/// Writes OUT/manifest.ndjson and the PNGs it references (plus
/// OUT/manifest.gray.ndjson and OUT/gray/ when requested).
Summary generate_dataset(const GenerateOptions& options, const RunContext& ctx);

struct ProbeOptions {
  std::filesystem::path manifest;
  std::string template_id;
  std::optional<std::filesystem::path> template_file;
  /// Holds images.emb/.keys (keys are record ids) and
  /// text-<template-id>.emb/.keys (keys are instantiated prompts).
  std::filesystem::path embeddings;
  std::filesystem::path out;
};

Summary run_probe(const ProbeOptions& options, const RunContext& ctx);

struct AnalyzeOptions {
  std::filesystem::path activations;
  std::filesystem::path stroop_manifest;
  std::filesystem::path probe_manifest;
  std::size_t top_k = 100;
  ClassifierThresholds thresholds;
  double alpha_threshold = 0.1;
  std::size_t hue_bins = 36;
  std::optional<std::filesystem::path> reference_hues;  // hue histogram CSV
  bool features = false;
  std::optional<std::filesystem::path> crops;  // adapter crop index root
  std::filesystem::path out;
};

/// Writes profiles.ndjson, layer_types.csv/.svg, hue_histogram.csv/.svg and
/// selectivity.svg under OUT.
Summary analyze_neurons(const AnalyzeOptions& options, const RunContext& ctx);

enum class ReportKind : std::uint8_t { Chromaticity, Stroop, Prompts, Neurons };

std::string_view to_string(ReportKind kind);
ReportKind parse_report_kind(std::string_view name);

struct ReportOptions {
  std::vector<std::filesystem::path> results;  // results.ndjson, or profiles.ndjson for Neurons
  ReportKind kind = ReportKind::Stroop;
  double alpha_threshold = 0.1;  // Neurons only
  std::size_t hue_bins = 36;     // Neurons only
  std::filesystem::path out;
};

/// Results sharing a template are merged into one table. Chromaticity and
/// Stroop reports write <kind>-<template-id>.csv/.svg, Prompts writes
/// prompts.csv/.svg and Neurons re-emits the layer and hue artifacts.
Summary emit_report(const ReportOptions& options, const RunContext& ctx);

}  // namespace chromaprobe
