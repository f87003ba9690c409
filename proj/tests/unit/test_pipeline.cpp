#include <doctest.h>

#include <chromaprobe/errors.hpp>
#include <chromaprobe/pipeline.hpp>
#include <chromaprobe/probe.hpp>
#include <chromaprobe/report.hpp>

#include <map>

#include "fake_adapter.hpp"
#include "oracles.hpp"

using namespace chromaprobe;

namespace {

std::map<std::string, std::string> as_map(const Summary& s) { return {s.begin(), s.end()}; }

RunContext quiet(unsigned jobs = 1) {
  RunContext ctx;
  ctx.jobs = jobs;
  return ctx;
}

}  // namespace

TEST_CASE("generation is byte-identical across thread counts and output directories") {
  oracle::TempDir dir("gen");
  GenerateOptions o;
  o.kind = DatasetKind::Stroop;
  o.samples = 1;
  o.seed = 7;
  o.white_background = true;
  o.grayscale = true;
  o.out = dir / "a";
  const auto s = as_map(generate_dataset(o, quiet(1)));
  CHECK(s.at("records") == "90");
  CHECK(s.at("gray_records") == "90");
  o.out = dir / "b";
  generate_dataset(o, quiet(4));

  const auto a = oracle::tree(dir / "a");
  const auto b = oracle::tree(dir / "b");
  CHECK(a.size() == 2 + 90 + 90);
  CHECK(a == b);

  const auto m = read_manifest(dir / "a/manifest.ndjson", Palette::standard());
  CHECK(m.records.size() == 90);
  const auto gray = read_manifest(dir / "a/manifest.gray.ndjson", Palette::standard());
  CHECK(gray.grayscale);
  const auto img = read_png(dir / "a" / gray.records[3].path);
  CHECK(img == render_record(gray, gray.records[3]));

  o.kind = DatasetKind::Shapes;
  CHECK_THROWS_AS(generate_dataset(o, quiet()), InputError);
  o.white_background = false;
  o.samples = 0;
  CHECK_THROWS_AS(generate_dataset(o, quiet()), InputError);
}

TEST_CASE("probe, report and neuron analysis through the exchange files") {
  oracle::TempDir dir("pipeline");
  GenerateOptions g;
  g.kind = DatasetKind::Stroop;
  g.samples = 1;
  g.seed = 3;
  g.grayscale = true;
  g.out = dir / "stroop";
  generate_dataset(g, quiet());
  const auto manifest = read_manifest(dir / "stroop/manifest.ndjson", Palette::standard());
  const auto gray = read_manifest(dir / "stroop/manifest.gray.ndjson", Palette::standard());
  REQUIRE(manifest.records.size() == 990);

  const auto templates = builtin_templates();
  fake::write_embeddings_for(dir / "emb", manifest, templates);
  fake::write_activations_for(dir / "act", manifest, gray);

  ProbeOptions p;
  p.manifest = dir / "stroop/manifest.ndjson";
  p.template_id = "word-font";
  p.embeddings = dir / "emb";
  p.out = dir / "word-font.ndjson";
  const auto ps = as_map(run_probe(p, quiet(2)));
  CHECK(ps.at("records") == "990");
  CHECK(ps.at("WrittenColor") == "990");
  p.template_id = "text-says";
  p.out = dir / "text-says.ndjson";
  run_probe(p, quiet());

  const auto res = read_results(dir / "word-font.ndjson", Palette::standard());
  CHECK(res.predictions.size() == 990);
  for (std::size_t i = 0; i < res.predictions.size(); ++i) {
    CHECK(res.predictions[i].predicted == manifest.records[i].stroop().word);
  }

  ReportOptions r;
  r.kind = ReportKind::Stroop;
  r.results = {dir / "word-font.ndjson"};
  r.out = dir / "report";
  emit_report(r, quiet());
  const auto csv = oracle::slurp(dir / "report/stroop-word-font.csv");
  const auto table = parse_stroop_csv(csv, Palette::standard());
  CHECK(table.global.total == 990);
  CHECK(*table.global.written_ratio() == 1.0);
  CHECK(csv.find("\nglobal,990,0,990,0,0,0.00,100.00,0.00,0.00\n") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "report/stroop-word-font.svg"));

  r.kind = ReportKind::Prompts;
  r.results = {dir / "word-font.ndjson", dir / "text-says.ndjson"};
  const auto prompts = as_map(emit_report(r, quiet()));
  CHECK(prompts.at("templates") == "2");
  CHECK(oracle::slurp(dir / "report/prompts.csv").find("text-says,The text says {},990") != std::string::npos);

  r.kind = ReportKind::Chromaticity;
  CHECK_THROWS_AS(emit_report(r, quiet()), InputError);

  // Top-K spans the whole corpus so constant neurons are not swayed by tie order.
  AnalyzeOptions a;
  a.activations = dir / "act";
  a.stroop_manifest = dir / "stroop/manifest.ndjson";
  a.probe_manifest = dir / "stroop/manifest.ndjson";
  a.top_k = 990;
  a.out = dir / "neurons";
  const auto as = as_map(analyze_neurons(a, quiet()));
  CHECK(as.at("neurons") == "4");
  CHECK(as.at("ColorWord") == "1");
  CHECK(as.at("ColorChromatic") == "1");
  CHECK(as.at("NotActivated") == "1");
  CHECK(as.at("AnyWord") == "1");
  const auto profiles = parse_profiles(oracle::slurp(dir / "neurons/profiles.ndjson"), Palette::standard());
  REQUIRE(profiles.size() == 4);
  CHECK(profiles[0].type == NeuronType{NeuronKind::ColorWord, ColorId::Red});
  CHECK(profiles[1].type.kind == NeuronKind::NotActivated);
  CHECK(profiles[2].type == NeuronType{NeuronKind::Color, ColorId::Blue});
  CHECK(profiles[3].type.kind == NeuronKind::AnyWord);
  // 90 red words at 4.0 and 900 others at 0.1; gray twins all at 0.1.
  CHECK((*profiles[0].f_word)[index_of(ColorId::Red)] == doctest::Approx(360.0 / 450.0));
  CHECK(*profiles[0].color_selectivity == doctest::Approx(1.0 - 99.0 / 450.0));
  // 90 blue fonts at 3.0 and 900 others at 0.2; gray twins at 0.3.
  CHECK((*profiles[2].f_font)[index_of(ColorId::Blue)] == doctest::Approx(270.0 / 450.0));
  CHECK(*profiles[2].color_selectivity == doctest::Approx(1.0 - 297.0 / 450.0));
  CHECK(*profiles[3].color_selectivity == 0.0);
  for (const char* f : {"layer_types.csv", "layer_types.svg", "hue_histogram.csv", "hue_histogram.svg",
                        "selectivity.svg"}) {
    CHECK_MESSAGE(std::filesystem::exists(dir / "neurons" / f), f);
  }

  // Features leave the types alone and feed the hue histogram.
  a.features = true;
  a.top_k = 90;
  a.out = dir / "neurons-features";
  const auto fs = as_map(analyze_neurons(a, quiet()));
  const auto with_hues =
      parse_profiles(oracle::slurp(dir / "neurons-features/profiles.ndjson"), Palette::standard());
  std::size_t hued = 0;
  for (const auto& pr : with_hues) {
    if (pr.dominant_hue && pr.color_selectivity && *pr.color_selectivity > 0.1) ++hued;
  }
  CHECK(fs.at("hue_samples") == std::to_string(hued));
  CHECK(with_hues[0].type == NeuronType{NeuronKind::ColorWord, ColorId::Red});
  CHECK(with_hues[2].type == NeuronType{NeuronKind::Color, ColorId::Blue});

  // Re-running is byte-identical.
  a.features = false;
  a.top_k = 990;
  a.out = dir / "neurons2";
  analyze_neurons(a, quiet(3));
  CHECK(oracle::tree(dir / "neurons") == oracle::tree(dir / "neurons2"));

  ReportOptions n;
  n.kind = ReportKind::Neurons;
  n.results = {dir / "neurons/profiles.ndjson"};
  n.out = dir / "neuron-report";
  CHECK(as_map(emit_report(n, quiet())).at("neurons") == "4");
  CHECK(parse_layer_types_csv(oracle::slurp(dir / "neuron-report/layer_types.csv")).at(0).total == 4);

  a.stroop_manifest = dir / "stroop/manifest.gray.ndjson";
  CHECK_THROWS_AS(analyze_neurons(a, quiet()), InputError);
}

TEST_CASE("report kinds and config hashes") {
  CHECK(parse_report_kind("neurons") == ReportKind::Neurons);
  CHECK_THROWS_AS(parse_report_kind("table9"), InputError);
  CHECK(config_hash({{"a", "1"}}) == config_hash({{"a", "1"}}));
  CHECK(config_hash({{"a", "1"}}) != config_hash({{"a", "2"}}));
  ReportOptions r;
  r.out = "unused";
  CHECK_THROWS_AS(emit_report(r, quiet()), InputError);
}
