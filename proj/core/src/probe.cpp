#include "chromaprobe/probe.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chromaprobe/errors.hpp"
#include "chromaprobe/parallel.hpp"
#include "text_util.hpp"

namespace chromaprobe {

using nlohmann::json;

namespace {

constexpr std::string_view kResultsFormat = "chromaprobe-results";
constexpr double kNormTolerance = 1e-3;

std::optional<double> ratio(std::uint64_t part, std::uint64_t total) {
  if (total == 0) return std::nullopt;
  return static_cast<double>(part) / static_cast<double>(total);
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Normalizes in place; returns whether the input norm was off by more than the tolerance.
bool normalize(std::span<double> v) {
  const double norm = std::sqrt(squared_norm(v));
  if (norm == 0.0) return true;
  for (double& x : v) x /= norm;
  return std::abs(norm - 1.0) > kNormTolerance;
}

void check_aligned(std::span<const PredictionRecord> predictions,
                   std::span<const StimulusRecord> records) {
  if (predictions.size() != records.size()) {
    throw InputError("probe_runner: " + std::to_string(predictions.size()) + " predictions for " +
                     std::to_string(records.size()) + " records");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (predictions[i].record_id != records[i].id) {
      throw InputError("probe_runner: prediction " + std::to_string(i) + " is for record " +
                       predictions[i].record_id + ", expected " + records[i].id);
    }
  }
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::BackgroundColor:
      return "BackgroundColor";
    case Outcome::ObjectOrFontColor:
      return "ObjectOrFontColor";
    case Outcome::WrittenColor:
      return "WrittenColor";
    case Outcome::NoneOfInput:
      return "NoneOfInput";
    case Outcome::Incorrect:
      return "Incorrect";
  }
  return "?";
}

Outcome parse_outcome(std::string_view s) {
  for (auto o : {Outcome::BackgroundColor, Outcome::ObjectOrFontColor, Outcome::WrittenColor,
                 Outcome::NoneOfInput, Outcome::Incorrect}) {
    if (to_string(o) == s) return o;
  }
  throw FormatError("probe_runner: unknown outcome '" + std::string(s) + "'");
}

LabelPrediction predict_label(std::span<const double> image, const LabelEmbeddings& labels) {
  const double image_sq = squared_norm(image);
  if (image_sq == 0.0) throw InputError("probe_runner: image embedding has zero norm");
  const double image_norm = std::sqrt(image_sq);

  LabelPrediction out{ColorId::Black, {}};
  double best = -std::numeric_limits<double>::infinity();
  for (auto id : kAllColorIds) {
    const auto& t = labels[index_of(id)];
    if (t.size() != image.size()) {
      throw InputError("probe_runner: label embedding for '" + std::string(canonical_name(id)) +
                       "' has dimension " + std::to_string(t.size()) + ", image has " +
                       std::to_string(image.size()));
    }
    double dot = 0.0;
    double label_sq = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      dot += image[k] * t[k];
      label_sq += t[k] * t[k];
    }
    if (label_sq == 0.0) {
      throw InputError("probe_runner: label embedding for '" + std::string(canonical_name(id)) +
                       "' has zero norm");
    }
    const double score = dot / (image_norm * std::sqrt(label_sq));
    out.scores[index_of(id)] = score;
    if (score > best) {  // strict: earlier labels win ties
      best = score;
      out.label = id;
    }
  }
  return out;
}

Outcome categorize_outcome(ColorId predicted, const StimulusRecord& record) {
  if (record.is_shape()) {
    const auto& s = record.shape();
    if (predicted == s.background) return Outcome::BackgroundColor;
    if (predicted == s.object_color) return Outcome::ObjectOrFontColor;
    return Outcome::Incorrect;
  }
  if (record.is_stroop()) {
    const auto& s = record.stroop();
    if (predicted == s.background) return Outcome::BackgroundColor;
    if (predicted == s.font_color) return Outcome::ObjectOrFontColor;
    if (predicted == s.word) return Outcome::WrittenColor;
    return Outcome::NoneOfInput;
  }
  throw InputError("probe_runner: record " + record.id + " has no color ground truth");
}

EmbeddingSet::EmbeddingSet(std::size_t dim, LabelEmbeddings labels)
    : dim_(dim), labels_(std::move(labels)) {
  if (dim_ == 0) throw InputError("probe_runner: embedding dimension must be positive");
  std::size_t off = 0;
  for (auto& v : labels_) {
    if (v.size() != dim_) throw InputError("probe_runner: label embedding dimension mismatch");
    if (normalize(v)) ++off;
  }
  if (off > 0) {
    warnings_.push_back(std::to_string(off) + " text embeddings deviated from unit norm by more than 1e-3");
  }
}

EmbeddingSet EmbeddingSet::from_tables(const EmbeddingTable& text, const EmbeddingTable& images,
                                       const PromptTemplate& tmpl, const Palette& palette) {
  if (text.dim != images.dim) {
    throw InputError("probe_runner: text embeddings have dimension " + std::to_string(text.dim) +
                     " but image embeddings have " + std::to_string(images.dim));
  }
  std::unordered_map<std::string_view, std::size_t> rows;
  for (std::size_t i = 0; i < text.keys.size(); ++i) rows.emplace(text.keys[i], i);

  LabelEmbeddings labels;
  for (auto id : kAllColorIds) {
    const auto prompt = instantiate(tmpl, id, palette);
    const auto it = rows.find(prompt);
    if (it == rows.end()) {
      throw InputError("probe_runner: no text embedding for prompt \"" + prompt + "\"");
    }
    const auto* row = text.values.data() + it->second * text.dim;
    labels[index_of(id)].assign(row, row + text.dim);
  }
  EmbeddingSet set(text.dim, std::move(labels));

  std::size_t off = 0;
  std::vector<double> vec(images.dim);
  for (std::size_t i = 0; i < images.keys.size(); ++i) {
    const auto* row = images.values.data() + i * images.dim;
    vec.assign(row, row + images.dim);
    if (std::abs(std::sqrt(squared_norm(vec)) - 1.0) > kNormTolerance) ++off;
    set.add_image(images.keys[i], vec);
  }
  if (off > 0) {
    set.warnings_.push_back(std::to_string(off) +
                            " image embeddings deviated from unit norm by more than 1e-3");
  }
  return set;
}

void EmbeddingSet::add_image(std::string id, std::span<const double> vec) {
  if (vec.size() != dim_) {
    throw InputError("probe_runner: image embedding for " + id + " has dimension " +
                     std::to_string(vec.size()) + ", expected " + std::to_string(dim_));
  }
  const auto start = images_.size();
  images_.insert(images_.end(), vec.begin(), vec.end());
  normalize(std::span<double>(images_).subspan(start, dim_));
  if (!index_.emplace(std::move(id), start / dim_).second) {
    images_.resize(start);
    throw InputError("probe_runner: duplicate image embedding id");
  }
}

std::span<const double> EmbeddingSet::image(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return {};
  return std::span<const double>(images_).subspan(it->second * dim_, dim_);
}

std::vector<PredictionRecord> run_experiment(const DatasetManifest& manifest,
                                             const PromptTemplate& tmpl,
                                             const EmbeddingSet& embeddings, unsigned jobs) {
  const auto& records = manifest.records;
  for (const auto& r : records) {
    if (embeddings.image(r.id).empty()) {
      throw InputError("probe_runner: missing image embedding for record " + r.id);
    }
  }
  std::vector<PredictionRecord> out(records.size());
  parallel_for(records.size(), jobs, [&](std::size_t i) {
    const auto& r = records[i];
    const auto p = predict_label(embeddings.image(r.id), embeddings.labels());
    out[i] = PredictionRecord{r.id, tmpl.id(), p.scores, p.label, categorize_outcome(p.label, r)};
  });
  return out;
}

std::optional<double> AssignmentCell::background_ratio() const { return ratio(background, total); }
std::optional<double> AssignmentCell::object_ratio() const { return ratio(object, total); }
std::optional<double> AssignmentCell::other_ratio() const { return ratio(other, total); }

ChromaticityTable& ChromaticityTable::merge(const ChromaticityTable& o) {
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      auto& c = cells[i][j];
      const auto& d = o.cells[i][j];
      c.total += d.total;
      c.background += d.background;
      c.object += d.object;
      c.other += d.other;
    }
  }
  return *this;
}

std::optional<double> StroopRow::font_ratio() const { return ratio(font, total); }
std::optional<double> StroopRow::written_ratio() const { return ratio(written, total); }
std::optional<double> StroopRow::background_ratio() const { return ratio(background, total); }
std::optional<double> StroopRow::none_ratio() const { return ratio(none, total); }

StroopRow& StroopRow::merge(const StroopRow& o) {
  total += o.total;
  font += o.font;
  written += o.written;
  background += o.background;
  none += o.none;
  return *this;
}

StroopTable& StroopTable::merge(const StroopTable& o) {
  for (std::size_t i = 0; i < kNumColorTerms; ++i) by_font[i].merge(o.by_font[i]);
  global.merge(o.global);
  return *this;
}

ChromaticityTable aggregate_chromaticity(std::span<const PredictionRecord> predictions,
                                         std::span<const StimulusRecord> records) {
  check_aligned(predictions, records);
  ChromaticityTable table;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.is_shape()) {
      throw InputError("probe_runner: chromaticity tables need shape records; " + r.id + " is not one");
    }
    auto& cell = table.at(chromaticity_of(r.shape().background), chromaticity_of(r.shape().object_color));
    ++cell.total;
    switch (categorize_outcome(predictions[i].predicted, r)) {
      case Outcome::BackgroundColor:
        ++cell.background;
        break;
      case Outcome::ObjectOrFontColor:
        ++cell.object;
        break;
      default:
        ++cell.other;
        break;
    }
  }
  return table;
}

StroopTable aggregate_stroop(std::span<const PredictionRecord> predictions,
                             std::span<const StimulusRecord> records) {
  check_aligned(predictions, records);
  StroopTable table;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.is_stroop()) {
      throw InputError("probe_runner: Stroop tables need Stroop records; " + r.id + " is not one");
    }
    StroopRow one;
    one.total = 1;
    switch (categorize_outcome(predictions[i].predicted, r)) {
      case Outcome::ObjectOrFontColor:
        one.font = 1;
        break;
      case Outcome::WrittenColor:
        one.written = 1;
        break;
      case Outcome::BackgroundColor:
        one.background = 1;
        break;
      default:
        one.none = 1;
        break;
    }
    table.by_font[index_of(r.stroop().font_color)].merge(one);
    table.global.merge(one);
  }
  return table;
}

std::string results_to_ndjson(const ProbeResults& results, const Palette& palette,
                              const Provenance& provenance) {
  if (results.predictions.size() != results.truths.size()) {
    throw InputError("probe_runner: results need one ground-truth record per prediction");
  }
  json header;
  header["format"] = kResultsFormat;
  header["version"] = 1;
  header["template_id"] = results.template_id;
  header["template"] = results.template_text;
  header["kind"] = std::string(to_string(results.kind));
  header["white_background"] = results.white_background;
  header["palette_hash"] = results.palette_hash;
  header["warnings"] = results.warnings;
  header["record_count"] = results.predictions.size();
  json vocab = json::array();
  for (const auto& t : palette.vocabulary()) vocab.push_back(t.name);
  header["labels"] = vocab;
  if (!provenance.empty()) {
    json p = json::object();
    for (const auto& [k, v] : provenance) p[k] = v;
    header["provenance"] = p;
  }

  std::string out = header.dump();
  out += '\n';
  for (std::size_t i = 0; i < results.predictions.size(); ++i) {
    const auto& p = results.predictions[i];
    const auto& r = results.truths[i];
    json j;
    j["id"] = p.record_id;
    j["template_id"] = p.template_id;
    j["scores"] = std::vector<double>(p.scores.begin(), p.scores.end());
    j["predicted"] = palette.name(p.predicted);
    j["outcome"] = std::string(to_string(p.outcome));
    json truth;
    if (r.is_shape()) {
      truth["kind"] = "shape";
      truth["background"] = palette.name(r.shape().background);
      truth["object_color"] = palette.name(r.shape().object_color);
    } else if (r.is_stroop()) {
      truth["kind"] = "stroop";
      truth["word"] = palette.name(r.stroop().word);
      truth["font_color"] = palette.name(r.stroop().font_color);
      truth["background"] = palette.name(r.stroop().background);
    } else {
      throw InputError("probe_runner: record " + r.id + " has no color ground truth");
    }
    j["truth"] = truth;
    out += j.dump();
    out += '\n';
  }
  return out;
}

ProbeResults parse_results(std::string_view text, const Palette& palette) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw FormatError("results: empty file");
  ProbeResults res;
  try {
    const auto header = json::parse(lines[0]);
    if (header.value("format", "") != kResultsFormat) {
      throw FormatError("results: header format is not \"chromaprobe-results\"");
    }
    res.template_id = header.value("template_id", "");
    res.template_text = header.value("template", "");
    res.kind = parse_dataset_kind(header.value("kind", "stroop"));
    res.white_background = header.value("white_background", false);
    res.palette_hash = header.value("palette_hash", "");
    res.warnings = header.value("warnings", std::vector<std::string>{});
    if (!res.palette_hash.empty() && res.palette_hash != palette.hash_hex()) {
      throw FormatError("results: palette hash " + res.palette_hash +
                        " does not match the active palette " + palette.hash_hex());
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("results: bad header: ") + e.what());
  }

  auto color = [&](const json& j, const char* key) {
    const auto name = j.at(key).get<std::string>();
    if (auto id = palette.find(name)) return *id;
    throw FormatError("results: unknown color '" + name + "'");
  };

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    try {
      const auto j = json::parse(lines[i]);
      PredictionRecord p;
      p.record_id = j.at("id").get<std::string>();
      p.template_id = j.at("template_id").get<std::string>();
      const auto scores = j.at("scores").get<std::vector<double>>();
      if (scores.size() != kNumColorTerms) throw FormatError("results: scores need 11 entries");
      std::copy(scores.begin(), scores.end(), p.scores.begin());
      p.predicted = color(j, "predicted");
      p.outcome = parse_outcome(j.at("outcome").get<std::string>());

      StimulusRecord r;
      r.id = p.record_id;
      const auto& truth = j.at("truth");
      const auto kind = truth.at("kind").get<std::string>();
      if (kind == "shape") {
        ShapeSceneSpec s;
        s.background = color(truth, "background");
        s.object_color = color(truth, "object_color");
        r.spec = s;
      } else if (kind == "stroop") {
        StroopSceneSpec s;
        s.word = color(truth, "word");
        s.font_color = color(truth, "font_color");
        s.background = color(truth, "background");
        r.spec = s;
      } else {
        throw FormatError("results: unknown truth kind '" + kind + "'");
      }
      res.predictions.push_back(std::move(p));
      res.truths.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw FormatError("results line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return res;
}

ProbeResults read_results(const std::filesystem::path& path, const Palette& palette) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("results: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_results(ss.str(), palette);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace chromaprobe
