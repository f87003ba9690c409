#include "chromaprobe/activation_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "chromaprobe/errors.hpp"
#include "chromaprobe/parallel.hpp"

namespace chromaprobe {

namespace {

double max_over(std::span<const double> row, std::span<const std::size_t> columns) {
  double m = 0.0;
  for (auto c : columns) m = std::max(m, row[c]);
  return m;
}

const std::optional<ColorId>& label_at(ColumnLabels labels, std::size_t image) {
  if (image >= labels.size()) {
    throw InputError("activation_lab: no label entry for image column " + std::to_string(image));
  }
  return labels[image];
}

// Index of the term with the largest score among those passing `eligible`;
// earlier terms win ties.
template <typename Score, typename Eligible>
std::optional<ColorId> best_term(Score score, Eligible eligible) {
  std::optional<ColorId> best;
  double best_score = -1.0;
  for (auto id : kAllColorIds) {
    if (!eligible(id)) continue;
    const double s = score(id);
    if (s > best_score) {
      best_score = s;
      best = id;
    }
  }
  return best;
}

}  // namespace

ActivationMatrix::ActivationMatrix(std::string layer, std::size_t neurons,
                                   std::vector<std::string> image_refs, std::vector<double> values)
    : layer_(std::move(layer)),
      neurons_(neurons),
      image_refs_(std::move(image_refs)),
      values_(std::move(values)) {
  if (values_.size() != neurons_ * image_refs_.size()) {
    throw InputError("activation_lab: layer " + layer_ + " has " + std::to_string(values_.size()) +
                     " values for " + std::to_string(neurons_) + " x " +
                     std::to_string(image_refs_.size()) + " grid");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw InputError("activation_lab: layer " + layer_ + " neuron " +
                       std::to_string(i / std::max<std::size_t>(1, image_refs_.size())) +
                       " has a negative or non-finite activation");
    }
  }
}

ActivationMatrix::ActivationMatrix(const ActivationDump& dump)
    : ActivationMatrix(dump.layer, dump.neurons, dump.image_refs,
                       std::vector<double>(dump.values.begin(), dump.values.end())) {}

TopKSet top_k(const ActivationMatrix& matrix, std::size_t neuron, std::size_t k,
              std::span<const std::size_t> columns) {
  if (k == 0) throw InputError("activation_lab: k must be >= 1");
  if (neuron >= matrix.neurons()) {
    throw InputError("activation_lab: neuron " + std::to_string(neuron) + " out of range");
  }
  const auto row = matrix.row(neuron);
  std::vector<std::size_t> idx;
  if (columns.empty()) {
    idx.resize(matrix.images());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
  } else {
    idx.assign(columns.begin(), columns.end());
    for (auto c : idx) {
      if (c >= matrix.images()) throw InputError("activation_lab: column index out of range");
    }
  }
  const std::size_t take = std::min(k, idx.size());
  auto before = [&](std::size_t a, std::size_t b) {
    return row[a] > row[b] || (row[a] == row[b] && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(), before);

  TopKSet out;
  out.neuron = neuron;
  out.truncated = k > idx.size();
  out.entries.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.entries.push_back({idx[i], row[idx[i]], std::nullopt});
  return out;
}

std::optional<double> color_selectivity_index(std::span<const double> color_acts,
                                              std::span<const double> gray_acts) {
  if (color_acts.size() != gray_acts.size()) {
    throw InputError("activation_lab: color and gray activation lists differ in length");
  }
  double color_sum = 0.0;
  double gray_sum = 0.0;
  for (std::size_t i = 0; i < color_acts.size(); ++i) {
    color_sum += color_acts[i];
    gray_sum += gray_acts[i];
  }
  if (color_sum == 0.0) return std::nullopt;
  return std::clamp(1.0 - gray_sum / color_sum, 0.0, 1.0);
}

std::optional<LabelFrequencies> color_label_selectivity(const TopKSet& topk, ColumnLabels labels) {
  double total = 0.0;
  LabelFrequencies sums{};
  for (const auto& e : topk.entries) {
    total += e.activation;
    if (const auto& l = label_at(labels, e.image)) sums[index_of(*l)] += e.activation;
  }
  if (total == 0.0) return std::nullopt;
  for (auto& s : sums) s /= total;
  return sums;
}

std::optional<LabelFrequencies> pooled_label_selectivity(const TopKSet& topk, ColumnLabels font,
                                                         ColumnLabels background) {
  double total = 0.0;
  LabelFrequencies sums{};
  for (const auto& e : topk.entries) {
    total += e.activation;
    if (const auto& l = label_at(font, e.image)) sums[index_of(*l)] += 0.5 * e.activation;
    if (const auto& l = label_at(background, e.image)) sums[index_of(*l)] += 0.5 * e.activation;
  }
  if (total == 0.0) return std::nullopt;
  for (auto& s : sums) s /= total;
  return sums;
}

RgbImage neuron_feature(const TopKSet& topk, std::span<const RgbImage> crops) {
  if (topk.entries.empty() || crops.empty()) throw InputError("activation_lab: no crops for neuron feature");
  if (crops.size() != topk.entries.size()) {
    throw InputError("activation_lab: " + std::to_string(crops.size()) + " crops for " +
                     std::to_string(topk.entries.size()) + " top entries");
  }
  const auto geometry = crops.front().geometry();
  double total = 0.0;
  for (std::size_t i = 0; i < crops.size(); ++i) {
    if (crops[i].geometry() != geometry) {
      throw InputError("activation_lab: crops must share one geometry");
    }
    total += topk.entries[i].activation;
  }
  if (total == 0.0) throw InputError("activation_lab: top activations sum to zero");

  std::vector<double> acc(crops.front().bytes().size(), 0.0);
  for (std::size_t i = 0; i < crops.size(); ++i) {
    const double w = topk.entries[i].activation / total;
    const auto px = crops[i].bytes();
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w * px[j];
  }
  RgbImage out(geometry.width, geometry.height);
  auto dst = out.bytes();
  for (std::size_t j = 0; j < acc.size(); ++j) {
    dst[j] = static_cast<std::uint8_t>(std::lround(std::clamp(acc[j], 0.0, 255.0)));
  }
  return out;
}

std::optional<double> dominant_hue(const RgbImage& feature, double min_saturation) {
  if (feature.empty()) return std::nullopt;
  double sat_sum = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (int y = 0; y < feature.height(); ++y) {
    for (int x = 0; x < feature.width(); ++x) {
      const auto c = feature.at(x, y);
      const auto h = hue_of(c);
      if (!h) continue;
      const double s = saturation_of(c);
      sat_sum += s;
      const double rad = *h * std::numbers::pi / 180.0;
      cx += s * std::cos(rad);
      cy += s * std::sin(rad);
    }
  }
  const double pixels = static_cast<double>(feature.width()) * feature.height();
  if (sat_sum / pixels < min_saturation) return std::nullopt;
  if (std::hypot(cx, cy) <= 1e-12 * sat_sum) return std::nullopt;
  double deg = std::atan2(cy, cx) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

HueHistogram hue_histogram(std::span<const double> hues, std::size_t bins) {
  if (bins == 0) throw InputError("activation_lab: histogram needs at least one bin");
  HueHistogram h;
  h.mass.assign(bins, 0.0);
  const double width = 360.0 / static_cast<double>(bins);
  for (double hue : hues) {
    double v = std::fmod(hue, 360.0);
    if (v < 0.0) v += 360.0;
    const auto bin = std::min(bins - 1, static_cast<std::size_t>(v / width));
    h.mass[bin] += 1.0;
  }
  h.samples = hues.size();
  if (h.samples > 0) {
    for (auto& m : h.mass) m /= static_cast<double>(h.samples);
  }
  return h;
}

HueHistogram hue_histogram(std::span<const NeuronProfile> profiles, std::size_t bins,
                           double alpha_threshold) {
  std::vector<double> hues;
  for (const auto& p : profiles) {
    if (p.color_selectivity && *p.color_selectivity > alpha_threshold && p.dominant_hue) {
      hues.push_back(*p.dominant_hue);
    }
  }
  return hue_histogram(hues, bins);
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("activation_lab: pearson needs equally sized inputs");
  if (a.size() < 2) return std::nullopt;
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::optional<double> pearson(const HueHistogram& a, const HueHistogram& b) {
  if (a.bins() != b.bins()) throw InputError("activation_lab: histograms differ in bin count");
  return pearson(a.mass, b.mass);
}

TypeCategory category_of(const NeuronType& type) {
  switch (type.kind) {
    case NeuronKind::Color:
      return type.term && chromaticity_of(*type.term) == Chromaticity::Achromatic
                 ? TypeCategory::ColorAchromatic
                 : TypeCategory::ColorChromatic;
    case NeuronKind::AnyWord:
      return TypeCategory::AnyWord;
    case NeuronKind::ColorWord:
      return TypeCategory::ColorWord;
    case NeuronKind::ColorMultimodal:
      return TypeCategory::ColorMultimodal;
    case NeuronKind::NotActivated:
      return TypeCategory::NotActivated;
    case NeuronKind::Unclassified:
      return TypeCategory::Unclassified;
  }
  return TypeCategory::Unclassified;
}

std::string_view to_string(TypeCategory c) {
  switch (c) {
    case TypeCategory::ColorChromatic:
      return "ColorChromatic";
    case TypeCategory::ColorAchromatic:
      return "ColorAchromatic";
    case TypeCategory::AnyWord:
      return "AnyWord";
    case TypeCategory::ColorWord:
      return "ColorWord";
    case TypeCategory::ColorMultimodal:
      return "ColorMultimodal";
    case TypeCategory::NotActivated:
      return "NotActivated";
    case TypeCategory::Unclassified:
      return "Unclassified";
  }
  return "?";
}

std::string to_string(const NeuronType& type, const Palette& palette) {
  switch (type.kind) {
    case NeuronKind::Color:
      return std::string("Color(") +
             (chromaticity_of(*type.term) == Chromaticity::Achromatic ? "achromatic" : "chromatic") +
             ", " + palette.name(*type.term) + ")";
    case NeuronKind::ColorWord:
      return "ColorWord(" + palette.name(*type.term) + ")";
    case NeuronKind::ColorMultimodal:
      return "ColorMultimodal(" + palette.name(*type.term) + ")";
    case NeuronKind::AnyWord:
      return "AnyWord";
    case NeuronKind::NotActivated:
      return "NotActivated";
    case NeuronKind::Unclassified:
      return "Unclassified";
  }
  return "?";
}

NeuronType classify_neuron(const ClassifierInputs& in, const ClassifierThresholds& th) {
  if (!(th.theta_high > 0.0 && th.theta_high <= 1.0)) {
    throw InputError("activation_lab: theta_high must lie in (0, 1]");
  }
  // "does not reach 50%": strictly below the active threshold.
  if (in.stroop_max <= 0.0 || in.stroop_max < th.theta_active * in.reference_max) {
    return {NeuronKind::NotActivated, std::nullopt};
  }

  std::string missing;
  if (!in.word) missing += "word";
  if (!in.font) missing += missing.empty() ? "font" : ", font";
  if (!in.background) missing += missing.empty() ? "background" : ", background";
  if (!missing.empty()) throw InputError("activation_lab: missing modality data: " + missing);

  const auto& fw = *in.word;
  const auto& ff = *in.font;
  const auto& fb = *in.background;
  const double theta = th.theta_high;
  auto f = [](const LabelFrequencies& m, ColorId c) { return m[index_of(c)]; };

  if (auto c = best_term(
          [&](ColorId id) { return std::min({f(fw, id), f(ff, id), f(fb, id)}); },
          [&](ColorId id) { return f(fw, id) >= theta && f(ff, id) >= theta && f(fb, id) >= theta; })) {
    return {NeuronKind::ColorMultimodal, c};
  }
  if (auto c = best_term([&](ColorId id) { return f(fw, id); },
                         [&](ColorId id) {
                           return f(fw, id) >= theta && f(ff, id) < theta && f(fb, id) < theta;
                         })) {
    return {NeuronKind::ColorWord, c};
  }
  if (auto c = best_term([&](ColorId id) { return std::max(f(ff, id), f(fb, id)); },
                         [&](ColorId id) { return f(ff, id) >= theta || f(fb, id) >= theta; })) {
    return {NeuronKind::Color, c};
  }
  if (in.any_word_max >= th.theta_active * in.reference_max) return {NeuronKind::AnyWord, std::nullopt};
  return {NeuronKind::Unclassified, std::nullopt};
}

double LayerDistribution::ratio(TypeCategory c) const {
  return total == 0 ? 0.0
                    : static_cast<double>(counts[static_cast<std::size_t>(c)]) / static_cast<double>(total);
}

std::vector<LayerDistribution> layer_type_distribution(std::span<const NeuronProfile> profiles) {
  std::vector<LayerDistribution> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& p : profiles) {
    auto [it, inserted] = index.emplace(p.layer, out.size());
    if (inserted) out.push_back(LayerDistribution{p.layer, {}, 0});
    auto& d = out[it->second];
    ++d.counts[static_cast<std::size_t>(category_of(p.type))];
    ++d.total;
  }
  return out;
}

AnalysisCorpus build_corpus(const ActivationMatrix& matrix, std::span<const std::string> stroop_ids,
                            std::span<const std::string> reference_ids,
                            std::span<const std::string> text_reference_ids,
                            std::span<const std::optional<ColorId>> stroop_word,
                            std::span<const std::optional<ColorId>> stroop_font,
                            std::span<const std::optional<ColorId>> stroop_background,
                            std::string_view gray_suffix) {
  if (stroop_word.size() != stroop_ids.size() || stroop_font.size() != stroop_ids.size() ||
      stroop_background.size() != stroop_ids.size()) {
    throw InputError("activation_lab: Stroop labels must align with Stroop ids");
  }
  std::unordered_map<std::string_view, std::size_t> column;
  for (std::size_t c = 0; c < matrix.images(); ++c) column.emplace(matrix.image_refs()[c], c);

  AnalysisCorpus corpus;
  const auto n = matrix.images();
  corpus.gray_column.assign(n, std::nullopt);
  corpus.word.assign(n, std::nullopt);
  corpus.font.assign(n, std::nullopt);
  corpus.background.assign(n, std::nullopt);

  for (std::size_t i = 0; i < stroop_ids.size(); ++i) {
    const auto it = column.find(stroop_ids[i]);
    if (it == column.end()) continue;
    corpus.stroop_columns.push_back(it->second);
    corpus.word[it->second] = stroop_word[i];
    corpus.font[it->second] = stroop_font[i];
    corpus.background[it->second] = stroop_background[i];
  }
  for (const auto& id : reference_ids) {
    const auto it = column.find(id);
    if (it == column.end()) continue;
    corpus.reference_columns.push_back(it->second);
    const auto gray = column.find(id + std::string(gray_suffix));
    if (gray != column.end()) corpus.gray_column[it->second] = gray->second;
  }
  for (const auto& id : text_reference_ids) {
    const auto it = column.find(id);
    if (it != column.end()) corpus.text_reference_columns.push_back(it->second);
  }
  return corpus;
}

std::vector<NeuronProfile> analyze_layer(const ActivationMatrix& matrix, const AnalysisCorpus& corpus,
                                         const AnalysisOptions& options) {
  if (options.top_k == 0) throw InputError("activation_lab: top_k must be >= 1");
  std::vector<NeuronProfile> profiles(matrix.neurons());
  parallel_for(matrix.neurons(), options.jobs, [&](std::size_t n) {
    NeuronProfile p;
    p.layer = matrix.layer();
    p.neuron = n;
    const auto row = matrix.row(n);
    p.stroop_max = max_over(row, corpus.stroop_columns);
    p.reference_max = max_over(row, corpus.reference_columns);
    p.any_word_max = corpus.text_reference_columns.empty()
                         ? p.stroop_max
                         : max_over(row, corpus.text_reference_columns);

    if (!corpus.stroop_columns.empty()) {
      const auto stroop_top = top_k(matrix, n, options.top_k, corpus.stroop_columns);
      p.f_word = color_label_selectivity(stroop_top, corpus.word);
      p.f_font = color_label_selectivity(stroop_top, corpus.font);
      p.f_background = color_label_selectivity(stroop_top, corpus.background);
      p.f_pooled = pooled_label_selectivity(stroop_top, corpus.font, corpus.background);
    }

    if (!corpus.reference_columns.empty()) {
      const auto ref_top = top_k(matrix, n, options.top_k, corpus.reference_columns);
      std::vector<double> color_acts;
      std::vector<double> gray_acts;
      bool complete = true;
      for (const auto& e : ref_top.entries) {
        const auto& gray = corpus.gray_column[e.image];
        if (!gray) {
          complete = false;
          break;
        }
        color_acts.push_back(e.activation);
        gray_acts.push_back(matrix.at(n, *gray));
      }
      if (complete) p.color_selectivity = color_selectivity_index(color_acts, gray_acts);

      if (options.features) {
        TopKSet kept;
        kept.neuron = n;
        std::vector<RgbImage> crops;
        for (const auto& e : ref_top.entries) {
          if (auto img = options.features(n, e)) {
            crops.push_back(resample(*img, options.feature_geometry));
            kept.entries.push_back(e);
          }
        }
        const double weight = std::accumulate(kept.entries.begin(), kept.entries.end(), 0.0,
                                              [](double s, const TopKEntry& e) { return s + e.activation; });
        if (!crops.empty() && weight > 0.0) p.dominant_hue = dominant_hue(neuron_feature(kept, crops));
      }
    }

    p.type = classify_neuron(
        {p.f_word, p.f_font, p.f_background, p.any_word_max, p.stroop_max, p.reference_max},
        options.thresholds);
    profiles[n] = std::move(p);
  });
  return profiles;
}

}  // namespace chromaprobe
