#include <chromaprobe/errors.hpp>
#include <chromaprobe/pipeline.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace chromaprobe;

namespace {

struct GlobalFlags {
  unsigned jobs = 0;
  std::string palette;
  bool porcelain = false;
};

void print_summary(const Summary& summary, bool porcelain) {
  for (const auto& [k, v] : summary) {
    if (porcelain) {
      std::cout << k << '=' << v << '\n';
    } else {
      std::cout << k << ": " << v << '\n';
    }
  }
}

void add_ranges(CLI::App* cmd, GeneratorOptions& gen) {
  auto& r = gen.ranges;
  cmd->add_option("--rotation-min", r.rotation_min, "Shape rotation lower bound (degrees)")->capture_default_str();
  cmd->add_option("--rotation-max", r.rotation_max, "Shape rotation upper bound (degrees)")->capture_default_str();
  cmd->add_option("--scale-min", r.scale_min, "Shape scale lower bound")->capture_default_str();
  cmd->add_option("--scale-max", r.scale_max, "Shape scale upper bound")->capture_default_str();
  cmd->add_option("--font-size-min", r.font_size_min, "Cap height lower bound (px)")->capture_default_str();
  cmd->add_option("--font-size-max", r.font_size_max, "Cap height upper bound (px)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chromaprobe: color cognition probes for dual-encoder vision-language models", "chromaprobe"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "Flat key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags global;
  app.add_option("--jobs,-j", global.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--palette", global.palette, "Palette override file (term = R,G,B [as spelling])")
      ->check(CLI::ExistingFile);
  app.add_flag("--porcelain", global.porcelain, "Machine-readable key=value summary on stdout");

  GenerateOptions shapes;
  shapes.kind = DatasetKind::Shapes;
  std::string shapes_out;
  auto* gen_shapes = app.add_subcommand("gen-shapes", "Render the shape corpus");
  gen_shapes->add_option("--samples", shapes.samples, "Samples per (shape, background, object) combination")
      ->required();
  gen_shapes->add_option("--seed", shapes.seed, "Master seed")->capture_default_str();
  gen_shapes->add_flag("--gray", shapes.grayscale, "Also render the grayscale companion corpus");
  gen_shapes->add_option("--out", shapes_out, "Output directory")->required();
  add_ranges(gen_shapes, shapes.generator);

  GenerateOptions stroop;
  stroop.kind = DatasetKind::Stroop;
  std::string stroop_out;
  auto* gen_stroop = app.add_subcommand("gen-stroop", "Render the Stroop corpus");
  gen_stroop->add_option("--samples", stroop.samples, "Samples per (word, font, background) combination")
      ->required();
  gen_stroop->add_option("--seed", stroop.seed, "Master seed")->capture_default_str();
  gen_stroop->add_flag("--white-bg", stroop.white_background, "Only white backgrounds");
  gen_stroop->add_flag("--gray", stroop.grayscale, "Also render the grayscale companion corpus");
  gen_stroop->add_option("--out", stroop_out, "Output directory")->required();
  add_ranges(gen_stroop, stroop.generator);

  ProbeOptions probe;
  std::string probe_manifest, probe_embeddings, probe_out, probe_templates;
  auto* run_probe_cmd = app.add_subcommand("run-probe", "Zero-shot color prediction over a manifest");
  run_probe_cmd->add_option("--manifest", probe_manifest, "Corpus manifest")->required()->check(CLI::ExistingFile);
  run_probe_cmd->add_option("--template-id", probe.template_id, "Prompt template id")->required();
  run_probe_cmd->add_option("--template-file", probe_templates, "Extra templates, one per line")
      ->check(CLI::ExistingFile);
  run_probe_cmd->add_option("--embeddings", probe_embeddings, "Adapter embedding directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  run_probe_cmd->add_option("--out", probe_out, "Results file (ndjson)")->required();

  AnalyzeOptions analyze;
  std::string act_dir, stroop_manifest, probe_manifest_a, ref_hues, crops_dir, analyze_out;
  auto* analyze_cmd = app.add_subcommand("analyze-neurons", "Per-neuron color selectivity and types");
  analyze_cmd->add_option("--activations", act_dir, "Directory of .act dumps")
      ->required()
      ->check(CLI::ExistingDirectory);
  analyze_cmd->add_option("--stroop-manifest", stroop_manifest, "Stroop corpus manifest")
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--probe-manifest", probe_manifest_a, "Reference probe corpus manifest")
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--topk", analyze.top_k, "Top images per neuron")->capture_default_str();
  analyze_cmd->add_option("--theta", analyze.thresholds.theta_high, "High label-selectivity threshold")
      ->capture_default_str();
  analyze_cmd->add_option("--active-ratio", analyze.thresholds.theta_active,
                          "Activation ratio below which a neuron is not activated")
      ->capture_default_str();
  analyze_cmd->add_option("--alpha-threshold", analyze.alpha_threshold,
                          "Color selectivity needed to enter the hue histogram")
      ->capture_default_str();
  analyze_cmd->add_option("--hue-bins", analyze.hue_bins, "Hue histogram bins")->capture_default_str();
  analyze_cmd->add_option("--reference-hues", ref_hues, "Reference hue histogram CSV for Pearson R")
      ->check(CLI::ExistingFile);
  analyze_cmd->add_flag("--features", analyze.features, "Compute neuron features and dominant hues");
  analyze_cmd->add_option("--crops", crops_dir, "Adapter crop index directory")->check(CLI::ExistingDirectory);
  analyze_cmd->add_option("--out", analyze_out, "Output directory")->required();

  ReportOptions report;
  std::vector<std::string> report_results;
  std::string report_kind, report_out;
  auto* report_cmd = app.add_subcommand("report", "CSV and SVG tables from results");
  report_cmd->add_option("--results", report_results, "Results or profiles file (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--kind", report_kind, "chromaticity | stroop | prompts | neurons")
      ->required()
      ->check(CLI::IsMember({"chromaticity", "stroop", "prompts", "neurons"}));
  report_cmd->add_option("--alpha-threshold", report.alpha_threshold, "Neurons: hue histogram cutoff")
      ->capture_default_str();
  report_cmd->add_option("--hue-bins", report.hue_bins, "Neurons: hue histogram bins")->capture_default_str();
  report_cmd->add_option("--out", report_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const auto extras = app.remaining();
    if (app.get_subcommands().empty() && !extras.empty() && extras.front().rfind("-", 0) != 0) {
      std::cerr << "chromaprobe: unknown subcommand '" << extras.front() << "'\n\n" << app.help();
      return 2;
    }
    std::cerr << "chromaprobe: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    RunContext ctx;
    if (!global.palette.empty()) ctx.palette = Palette::load(global.palette);
    ctx.jobs = global.jobs;
    ctx.progress = [](std::string_view line) { std::cerr << "chromaprobe: " << line << '\n'; };

    Summary summary;
    if (gen_shapes->parsed()) {
      shapes.out = shapes_out;
      summary = generate_dataset(shapes, ctx);
    } else if (gen_stroop->parsed()) {
      stroop.out = stroop_out;
      summary = generate_dataset(stroop, ctx);
    } else if (run_probe_cmd->parsed()) {
      probe.manifest = probe_manifest;
      probe.embeddings = probe_embeddings;
      probe.out = probe_out;
      if (!probe_templates.empty()) probe.template_file = fs::path(probe_templates);
      summary = run_probe(probe, ctx);
    } else if (analyze_cmd->parsed()) {
      analyze.activations = act_dir;
      analyze.stroop_manifest = stroop_manifest;
      analyze.probe_manifest = probe_manifest_a;
      analyze.out = analyze_out;
      if (!ref_hues.empty()) analyze.reference_hues = fs::path(ref_hues);
      if (!crops_dir.empty()) analyze.crops = fs::path(crops_dir);
      summary = analyze_neurons(analyze, ctx);
    } else if (report_cmd->parsed()) {
      for (const auto& r : report_results) report.results.emplace_back(r);
      report.kind = parse_report_kind(report_kind);
      report.out = report_out;
      summary = emit_report(report, ctx);
    }
    print_summary(summary, global.porcelain);
  } catch (const std::exception& e) {
    std::cerr << "chromaprobe: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
