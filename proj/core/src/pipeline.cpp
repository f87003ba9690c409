#include "chromaprobe/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "chromaprobe/errors.hpp"
#include "chromaprobe/exchange.hpp"
#include "chromaprobe/hashing.hpp"
#include "chromaprobe/parallel.hpp"
#include "chromaprobe/probe.hpp"
#include "chromaprobe/prompt_bank.hpp"
#include "chromaprobe/report.hpp"
#include "file_util.hpp"

namespace chromaprobe {

namespace fs = std::filesystem;

namespace {

void say(const RunContext& ctx, const std::string& line) {
  if (ctx.progress) ctx.progress(line);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string flag(bool b) { return b ? "true" : "false"; }

// Settings go in first; the hash of everything before it closes the block.
Provenance sealed(Provenance settings) {
  const auto hash = config_hash(settings);
  settings.emplace_back("config_hash", hash);
  return settings;
}

std::string meta_or(const std::map<std::string, std::string>& meta, const std::string& key,
                    std::string fallback) {
  const auto it = meta.find(key);
  return it == meta.end() ? fallback : it->second;
}

void write_text(const fs::path& path, std::string_view content) {
  detail::write_file_atomic(path, content, "cli_report");
}

std::string file_safe(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

void render_corpus(const DatasetManifest& manifest, const fs::path& root, const Provenance& provenance,
                   const RunContext& ctx) {
  std::set<fs::path> dirs;
  for (const auto& rec : manifest.records) dirs.insert((root / rec.path).parent_path());
  for (const auto& d : dirs) fs::create_directories(d);

  std::atomic<std::size_t> done{0};
  const auto total = manifest.records.size();
  parallel_for(total, ctx.jobs, [&](std::size_t i) {
    const auto& rec = manifest.records[i];
    const auto image = render_record(manifest, rec, ctx.palette);
    auto text = provenance;
    text.emplace_back("record_id", rec.id);
    write_png(root / rec.path, image, text);
    const auto n = ++done;
    if (n % 500 == 0 || n == total) say(ctx, "rendered " + std::to_string(n) + "/" + std::to_string(total));
  });
}

}  // namespace

std::string config_hash(const Provenance& settings) {
  std::string canonical;
  for (const auto& [k, v] : settings) canonical += k + "=" + v + "\n";
  return to_hex(fnv1a(canonical));
}

Summary generate_dataset(const GenerateOptions& options, const RunContext& ctx) {
  if (options.samples == 0) throw InputError("stimulus_gen: --samples must be >= 1");
  if (options.out.empty()) throw InputError("stimulus_gen: --out is required");
  if (options.white_background && options.kind != DatasetKind::Stroop) {
    throw InputError("stimulus_gen: white background applies to Stroop corpora only");
  }
  auto gen = options.generator;
  gen.white_background_only = options.white_background;
  say(ctx, "enumerating " + std::string(to_string(options.kind)) + " corpus");
  const auto manifest = options.kind == DatasetKind::Shapes
                            ? enumerate_shape_dataset(options.samples, options.seed, ctx.palette, gen)
                            : options.kind == DatasetKind::Stroop
                                  ? enumerate_stroop_dataset(options.samples, options.seed, ctx.palette, gen)
                                  : throw InputError("stimulus_gen: external corpora are not generated");

  const auto& r = gen.ranges;
  const auto provenance = sealed({
      {"tool", std::string(kToolVersion)},
      {"command", options.kind == DatasetKind::Shapes ? "gen-shapes" : "gen-stroop"},
      {"seed", std::to_string(options.seed)},
      {"samples", std::to_string(options.samples)},
      {"white_background", flag(options.white_background)},
      {"geometry", std::to_string(gen.geometry.width) + "x" + std::to_string(gen.geometry.height)},
      {"ranges", num(r.rotation_min) + "," + num(r.rotation_max) + "," + num(r.scale_min) + "," +
                     num(r.scale_max) + "," + std::to_string(r.font_size_min) + "," +
                     std::to_string(r.font_size_max)},
      {"palette_hash", ctx.palette.hash_hex()},
      {"generator_version", std::string(kGeneratorVersion)},
  });

  fs::create_directories(options.out);
  render_corpus(manifest, options.out, provenance, ctx);
  write_text(options.out / "manifest.ndjson", manifest_to_ndjson(manifest, ctx.palette, provenance));

  Summary summary{{"records", std::to_string(manifest.records.size())},
                  {"manifest", (options.out / "manifest.ndjson").string()}};
  if (options.grayscale) {
    const auto gray = grayscale_manifest(manifest);
    say(ctx, "rendering grayscale variants");
    render_corpus(gray, options.out, provenance, ctx);
    write_text(options.out / "manifest.gray.ndjson", manifest_to_ndjson(gray, ctx.palette, provenance));
    summary.emplace_back("gray_records", std::to_string(gray.records.size()));
    summary.emplace_back("gray_manifest", (options.out / "manifest.gray.ndjson").string());
  }
  summary.emplace_back("config_hash", provenance.back().second);
  return summary;
}

Summary run_probe(const ProbeOptions& options, const RunContext& ctx) {
  if (options.out.empty()) throw InputError("probe_runner: --out is required");
  const auto manifest = read_manifest(options.manifest, ctx.palette);

  std::vector<PromptTemplate> candidates(builtin_templates().begin(), builtin_templates().end());
  if (options.template_file) {
    auto custom = load_template_file(*options.template_file);
    candidates.insert(candidates.end(), custom.begin(), custom.end());
  }
  const auto& tmpl = find_template(candidates, options.template_id);

  const auto text = read_embeddings(options.embeddings / ("text-" + tmpl.id()));
  const auto images = read_embeddings(options.embeddings / "images");
  const auto set = EmbeddingSet::from_tables(text, images, tmpl, ctx.palette);
  for (const auto& w : set.warnings()) say(ctx, "warning: " + w);

  say(ctx, "predicting " + std::to_string(manifest.records.size()) + " records with template " + tmpl.id());
  ProbeResults results;
  results.template_id = tmpl.id();
  results.template_text = tmpl.text();
  results.kind = manifest.kind;
  results.white_background = manifest.white_background;
  results.palette_hash = ctx.palette.hash_hex();
  results.warnings = set.warnings();
  results.predictions = run_experiment(manifest, tmpl, set, ctx.jobs);
  results.truths = manifest.records;

  const auto provenance = sealed({
      {"tool", std::string(kToolVersion)},
      {"command", "run-probe"},
      {"dataset", std::string(to_string(manifest.kind))},
      {"seed", std::to_string(manifest.master_seed)},
      {"samples", std::to_string(manifest.samples_per_combo)},
      {"template_id", tmpl.id()},
      {"template", tmpl.text()},
      {"model", meta_or(images.meta, "model", meta_or(text.meta, "model", "unknown"))},
      {"palette_hash", ctx.palette.hash_hex()},
  });
  write_text(options.out, results_to_ndjson(results, ctx.palette, provenance));

  std::array<std::size_t, 5> outcomes{};
  for (const auto& p : results.predictions) ++outcomes[static_cast<std::size_t>(p.outcome)];
  Summary summary{{"records", std::to_string(results.predictions.size())},
                  {"template_id", tmpl.id()},
                  {"warnings", std::to_string(results.warnings.size())}};
  for (std::size_t o = 0; o < outcomes.size(); ++o) {
    summary.emplace_back(std::string(to_string(static_cast<Outcome>(o))), std::to_string(outcomes[o]));
  }
  summary.emplace_back("results", options.out.string());
  summary.emplace_back("config_hash", provenance.back().second);
  return summary;
}

namespace {

struct NeuronArtifacts {
  std::vector<LayerDistribution> layers;
  HueHistogram hues;
  std::optional<double> pearson_r;
};

NeuronArtifacts write_neuron_artifacts(std::span<const NeuronProfile> profiles, const fs::path& out,
                                       double alpha_threshold, std::size_t hue_bins,
                                       const std::optional<fs::path>& reference_hues,
                                       Provenance provenance, const RunContext& ctx) {
  NeuronArtifacts a;
  a.layers = layer_type_distribution(profiles);
  a.hues = hue_histogram(profiles, hue_bins, alpha_threshold);
  std::optional<HueHistogram> reference;
  if (reference_hues) {
    reference = parse_hue_histogram_csv(detail::read_file(*reference_hues, "activation_lab"));
    if (reference->bins() != hue_bins) {
      throw InputError("activation_lab: reference histogram has " + std::to_string(reference->bins()) +
                       " bins, expected " + std::to_string(hue_bins));
    }
    a.pearson_r = pearson(a.hues, *reference);
  }
  auto hue_provenance = provenance;
  hue_provenance.emplace_back("alpha_threshold", num(alpha_threshold));
  if (reference) hue_provenance.emplace_back("pearson_r", a.pearson_r ? num(*a.pearson_r) : "n/a");

  write_text(out / "layer_types.csv", layer_types_csv(a.layers, provenance));
  write_text(out / "layer_types.svg", layer_types_svg(a.layers, provenance));
  write_text(out / "hue_histogram.csv", hue_histogram_csv(a.hues, hue_provenance));
  write_text(out / "hue_histogram.svg",
             hue_histogram_svg(a.hues, reference ? &*reference : nullptr, hue_provenance));
  write_text(out / "selectivity.svg", selectivity_svg(profiles, provenance));
  say(ctx, "wrote layer, hue and selectivity artifacts to " + out.string());
  return a;
}

void summarize_neurons(Summary& summary, const NeuronArtifacts& a, std::size_t neurons) {
  summary.emplace_back("layers", std::to_string(a.layers.size()));
  summary.emplace_back("neurons", std::to_string(neurons));
  std::array<std::uint64_t, kNumTypeCategories> totals{};
  for (const auto& l : a.layers) {
    for (std::size_t c = 0; c < kNumTypeCategories; ++c) totals[c] += l.counts[c];
  }
  for (std::size_t c = 0; c < kNumTypeCategories; ++c) {
    summary.emplace_back(std::string(to_string(static_cast<TypeCategory>(c))), std::to_string(totals[c]));
  }
  summary.emplace_back("hue_samples", std::to_string(a.hues.samples));
  if (a.pearson_r) summary.emplace_back("pearson_r", num(*a.pearson_r));
}

}  // namespace

Summary analyze_neurons(const AnalyzeOptions& options, const RunContext& ctx) {
  if (options.out.empty()) throw InputError("activation_lab: --out is required");
  if (options.hue_bins == 0) throw InputError("activation_lab: --hue-bins must be >= 1");
  const auto stroop = read_manifest(options.stroop_manifest, ctx.palette);
  if (stroop.kind != DatasetKind::Stroop) {
    throw InputError("activation_lab: --stroop-manifest must describe a Stroop corpus");
  }
  if (stroop.grayscale) {
    throw InputError("activation_lab: --stroop-manifest must be the color corpus, not its grayscale companion");
  }
  const auto probe = read_manifest(options.probe_manifest, ctx.palette);
  const auto probe_root = options.probe_manifest.parent_path();

  std::vector<std::string> stroop_ids;
  std::vector<std::optional<ColorId>> word;
  std::vector<std::optional<ColorId>> font;
  std::vector<std::optional<ColorId>> background;
  for (const auto& r : stroop.records) {
    stroop_ids.push_back(r.id);
    word.emplace_back(r.stroop().word);
    font.emplace_back(r.stroop().font_color);
    background.emplace_back(r.stroop().background);
  }
  std::vector<std::string> reference_ids;
  std::vector<std::string> text_ids;
  std::unordered_map<std::string, fs::path> image_path;
  for (const auto& r : probe.records) {
    reference_ids.push_back(r.id);
    if (r.has_text()) text_ids.push_back(r.id);
    image_path.emplace(r.id, probe_root / r.path);
  }

  const auto dumps = load_activation_dir(options.activations);
  if (dumps.empty()) throw InputError("activation_lab: no .act files under " + options.activations.string());

  std::vector<NeuronProfile> profiles;
  std::string model = "unknown";
  for (const auto& dump : dumps) {
    model = meta_or(dump.meta, "model", model);
    const ActivationMatrix matrix(dump);
    const auto corpus = build_corpus(matrix, stroop_ids, reference_ids, text_ids, word, font, background,
                                     kGraySuffix);
    say(ctx, "layer " + matrix.layer() + ": " + std::to_string(matrix.neurons()) + " neurons, " +
                 std::to_string(corpus.stroop_columns.size()) + " Stroop / " +
                 std::to_string(corpus.reference_columns.size()) + " reference columns");
    if (corpus.stroop_columns.empty()) {
      throw InputError("activation_lab: layer " + matrix.layer() + " has no Stroop columns");
    }

    AnalysisOptions ao;
    ao.top_k = options.top_k;
    ao.thresholds = options.thresholds;
    ao.jobs = ctx.jobs;
    if (options.features) {
      const auto& refs = matrix.image_refs();
      const auto layer = matrix.layer();
      const auto crops = options.crops;
      ao.features = [&, layer, crops](std::size_t neuron, const TopKEntry& e) -> std::optional<RgbImage> {
        const auto& id = refs[e.image];
        if (crops) {
          for (const auto& c : read_crop_index(*crops, layer, neuron)) {
            if (c.image == id) return read_png(c.path);
          }
        }
        const auto it = image_path.find(id);
        if (it == image_path.end() || !fs::exists(it->second)) return std::nullopt;
        return read_png(it->second);
      };
    }
    auto layer_profiles = analyze_layer(matrix, corpus, ao);
    profiles.insert(profiles.end(), std::make_move_iterator(layer_profiles.begin()),
                    std::make_move_iterator(layer_profiles.end()));
  }

  const auto provenance = sealed({
      {"tool", std::string(kToolVersion)},
      {"command", "analyze-neurons"},
      {"stroop_seed", std::to_string(stroop.master_seed)},
      {"stroop_records", std::to_string(stroop.records.size())},
      {"probe_dataset", std::string(to_string(probe.kind))},
      {"probe_seed", std::to_string(probe.master_seed)},
      {"probe_records", std::to_string(probe.records.size())},
      {"top_k", std::to_string(options.top_k)},
      {"theta_high", num(options.thresholds.theta_high)},
      {"theta_active", num(options.thresholds.theta_active)},
      {"features", flag(options.features)},
      {"model", model},
      {"palette_hash", ctx.palette.hash_hex()},
  });

  fs::create_directories(options.out);
  write_text(options.out / "profiles.ndjson", profiles_to_ndjson(profiles, ctx.palette, provenance));
  const auto a = write_neuron_artifacts(profiles, options.out, options.alpha_threshold, options.hue_bins,
                                        options.reference_hues, provenance, ctx);
  Summary summary;
  summarize_neurons(summary, a, profiles.size());
  summary.emplace_back("theta_high", num(options.thresholds.theta_high));
  summary.emplace_back("profiles", (options.out / "profiles.ndjson").string());
  summary.emplace_back("config_hash", provenance.back().second);
  return summary;
}

std::string_view to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::Chromaticity:
      return "chromaticity";
    case ReportKind::Stroop:
      return "stroop";
    case ReportKind::Prompts:
      return "prompts";
    case ReportKind::Neurons:
      return "neurons";
  }
  return "?";
}

ReportKind parse_report_kind(std::string_view name) {
  for (auto k : {ReportKind::Chromaticity, ReportKind::Stroop, ReportKind::Prompts, ReportKind::Neurons}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("cli_report: unknown report kind '" + std::string(name) +
                   "' (expected chromaticity, stroop, prompts or neurons)");
}

Summary emit_report(const ReportOptions& options, const RunContext& ctx) {
  if (options.results.empty()) throw InputError("cli_report: at least one --results file is required");
  if (options.out.empty()) throw InputError("cli_report: --out is required");
  fs::create_directories(options.out);
  Provenance base{{"tool", std::string(kToolVersion)},
                  {"command", "report"},
                  {"kind", std::string(to_string(options.kind))},
                  {"palette_hash", ctx.palette.hash_hex()}};

  if (options.kind == ReportKind::Neurons) {
    std::vector<NeuronProfile> profiles;
    for (const auto& path : options.results) {
      auto p = parse_profiles(detail::read_file(path, "cli_report"), ctx.palette);
      profiles.insert(profiles.end(), p.begin(), p.end());
    }
    base.emplace_back("inputs", std::to_string(options.results.size()));
    const auto provenance = sealed(base);
    const auto a = write_neuron_artifacts(profiles, options.out, options.alpha_threshold, options.hue_bins,
                                          std::nullopt, provenance, ctx);
    Summary summary;
    summarize_neurons(summary, a, profiles.size());
    summary.emplace_back("config_hash", provenance.back().second);
    return summary;
  }

  // Group by template, keeping first-seen order.
  struct Group {
    std::string id;
    std::string text;
    DatasetKind kind;
    std::uint64_t records = 0;
    ChromaticityTable chromaticity;
    StroopTable stroop;
  };
  std::vector<Group> groups;
  for (const auto& path : options.results) {
    const auto res = read_results(path, ctx.palette);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.id == res.template_id; });
    if (it == groups.end()) {
      groups.push_back({res.template_id, res.template_text, res.kind, 0, {}, {}});
      it = std::prev(groups.end());
    } else if (it->kind != res.kind) {
      throw InputError("cli_report: results for template " + res.template_id + " mix dataset kinds");
    }
    it->records += res.predictions.size();
    if (res.kind == DatasetKind::Shapes) {
      it->chromaticity.merge(aggregate_chromaticity(res.predictions, res.truths));
    } else {
      it->stroop.merge(aggregate_stroop(res.predictions, res.truths));
    }
    say(ctx, "read " + std::to_string(res.predictions.size()) + " predictions from " + path.string());
  }

  Summary summary;
  std::uint64_t records = 0;
  if (options.kind == ReportKind::Prompts) {
    std::vector<PromptRow> rows;
    std::vector<std::string> categories;
    std::array<BarSeries, 4> series{{{"background", {}}, {"font", {}}, {"written", {}}, {"none", {}}}};
    for (const auto& g : groups) {
      if (g.kind == DatasetKind::Shapes) {
        throw InputError("cli_report: prompts reports need Stroop results; template " + g.id +
                         " ran on a shape corpus");
      }
      rows.push_back({g.id, g.text, g.stroop.global});
      records += g.records;
      if (g.stroop.global.total == 0) continue;
      categories.push_back(g.id);
      series[0].values.push_back(100.0 * *g.stroop.global.background_ratio());
      series[1].values.push_back(100.0 * *g.stroop.global.font_ratio());
      series[2].values.push_back(100.0 * *g.stroop.global.written_ratio());
      series[3].values.push_back(100.0 * *g.stroop.global.none_ratio());
    }
    const auto provenance = sealed(base);
    write_text(options.out / "prompts.csv", prompts_csv(rows, provenance));
    write_text(options.out / "prompts.svg",
               grouped_bars_svg("Answer distribution per prompt", categories, series, provenance));
    summary.emplace_back("templates", std::to_string(rows.size()));
    summary.emplace_back("records", std::to_string(records));
    summary.emplace_back("config_hash", provenance.back().second);
    return summary;
  }

  const auto wanted = options.kind == ReportKind::Chromaticity ? DatasetKind::Shapes : DatasetKind::Stroop;
  std::size_t tables = 0;
  for (const auto& g : groups) {
    if (g.kind != wanted) {
      throw InputError("cli_report: " + std::string(to_string(options.kind)) + " reports need " +
                       std::string(to_string(wanted)) + " results; template " + g.id + " ran on " +
                       std::string(to_string(g.kind)));
    }
    auto settings = base;
    settings.emplace_back("template_id", g.id);
    settings.emplace_back("template", g.text);
    settings.emplace_back("records", std::to_string(g.records));
    const auto provenance = sealed(settings);
    const auto stem = options.out / (std::string(to_string(options.kind)) + "-" + file_safe(g.id));
    if (options.kind == ReportKind::Chromaticity) {
      write_text(fs::path(stem) += ".csv", chromaticity_csv(g.chromaticity, provenance));
      write_text(fs::path(stem) += "_grid.csv", chromaticity_grid_csv(g.chromaticity, provenance));
      write_text(fs::path(stem) += ".svg", chromaticity_svg(g.chromaticity, provenance));
    } else {
      write_text(fs::path(stem) += ".csv", stroop_csv(g.stroop, ctx.palette, provenance));
      write_text(fs::path(stem) += ".svg", stroop_svg(g.stroop, ctx.palette, provenance));
    }
    records += g.records;
    ++tables;
  }
  summary.emplace_back("tables", std::to_string(tables));
  summary.emplace_back("records", std::to_string(records));
  return summary;
}

}  // namespace chromaprobe
