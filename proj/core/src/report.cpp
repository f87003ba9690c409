#include "chromaprobe/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "chromaprobe/errors.hpp"
#include "text_util.hpp"

namespace chromaprobe {

using nlohmann::json;

namespace {

constexpr std::string_view kProfilesFormat = "chromaprobe-profiles";

constexpr std::array<Chromaticity, 2> kRowOrder = {Chromaticity::Achromatic, Chromaticity::Chromatic};

constexpr std::array<std::string_view, kNumTypeCategories> kTypeColors = {
    "#e4572e", "#9a9a9a", "#29335c", "#f3a712", "#669bbc", "#d8d8d8", "#5c5c5c",
};

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string svg_provenance(const Provenance& provenance) {
  std::string out = "<!-- chromaprobe";
  for (const auto& [k, v] : provenance) {
    std::string value = v;
    std::replace(value.begin(), value.end(), '-', '_');  // "--" is illegal inside comments
    out += "\n     " + k + "=" + value;
  }
  out += " -->\n";
  return out;
}

// Data rows of a CSV with '#' comment lines and one header row, as a table
// keyed by column name.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw FormatError("report: CSV lacks column '" + std::string(name) + "'");
  }
};

CsvTable read_csv(std::string_view text) {
  CsvTable t;
  bool header = true;
  for (auto line : detail::split_lines(text)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    for (auto c : detail::split(line, ',')) cells.emplace_back(detail::trim(c));
    if (header) {
      t.columns = std::move(cells);
      header = false;
    } else {
      if (cells.size() != t.columns.size()) throw FormatError("report: ragged CSV row");
      t.rows.push_back(std::move(cells));
    }
  }
  if (header) throw FormatError("report: CSV has no header row");
  return t;
}

std::uint64_t parse_count(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw FormatError("report: bad count '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("report: bad count '" + s + "'");
  }
}

Chromaticity parse_chromaticity(const std::string& s) {
  if (s == "Chromatic") return Chromaticity::Chromatic;
  if (s == "Achromatic") return Chromaticity::Achromatic;
  throw FormatError("report: unknown chromaticity class '" + s + "'");
}

json freq_json(const std::optional<LabelFrequencies>& f) {
  if (!f) return nullptr;
  return std::vector<double>(f->begin(), f->end());
}

std::optional<LabelFrequencies> freq_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  const auto v = j.get<std::vector<double>>();
  if (v.size() != kNumColorTerms) throw FormatError("report: label frequencies need 11 entries");
  LabelFrequencies f{};
  std::copy(v.begin(), v.end(), f.begin());
  return f;
}

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string format_pct(const std::optional<double>& ratio) {
  return ratio ? fixed2(*ratio * 100.0) : std::string("n/a");
}

std::string csv_provenance(const Provenance& provenance) {
  std::string out = "# chromaprobe\n";
  for (const auto& [k, v] : provenance) out += "# " + k + "=" + v + "\n";
  return out;
}

std::string chromaticity_csv(const ChromaticityTable& table, const Provenance& provenance) {
  std::string out = csv_provenance(provenance);
  out += "background_class,object_class,total,background_count,object_count,other_count,"
         "background_pct,object_pct,other_pct\n";
  for (auto bg : kRowOrder) {
    for (auto obj : kRowOrder) {
      const auto& c = table.at(bg, obj);
      out += std::string(to_string(bg)) + "," + std::string(to_string(obj)) + "," +
             std::to_string(c.total) + "," + std::to_string(c.background) + "," +
             std::to_string(c.object) + "," + std::to_string(c.other) + "," +
             format_pct(c.background_ratio()) + "," + format_pct(c.object_ratio()) + "," +
             format_pct(c.other_ratio()) + "\n";
    }
  }
  return out;
}

std::string chromaticity_grid_csv(const ChromaticityTable& table, const Provenance& provenance) {
  std::string out = csv_provenance(provenance);
  out += "# cells: background-assigned % / object-assigned %\n";
  out += "input_background \\ input_object,Achromatic,Chromatic\n";
  for (auto bg : kRowOrder) {
    out += std::string(to_string(bg));
    for (auto obj : kRowOrder) {
      const auto& c = table.at(bg, obj);
      out += ",";
      out += c.total == 0 ? std::string("n/a")
                          : format_pct(c.background_ratio()) + "% / " + format_pct(c.object_ratio()) + "%";
    }
    out += "\n";
  }
  return out;
}

ChromaticityTable parse_chromaticity_csv(std::string_view text) {
  const auto csv = read_csv(text);
  ChromaticityTable table;
  for (const auto& row : csv.rows) {
    auto& c = table.at(parse_chromaticity(row[csv.col("background_class")]),
                       parse_chromaticity(row[csv.col("object_class")]));
    c.total = parse_count(row[csv.col("total")]);
    c.background = parse_count(row[csv.col("background_count")]);
    c.object = parse_count(row[csv.col("object_count")]);
    c.other = parse_count(row[csv.col("other_count")]);
  }
  return table;
}

std::string stroop_csv(const StroopTable& table, const Palette& palette, const Provenance& provenance) {
  std::string out = csv_provenance(provenance);
  out += "font_color,total,font_count,written_count,background_count,none_count,"
         "font_pct,written_pct,background_pct,none_pct\n";
  auto emit = [&](std::string_view name, const StroopRow& r) {
    out += std::string(name) + "," + std::to_string(r.total) + "," + std::to_string(r.font) + "," +
           std::to_string(r.written) + "," + std::to_string(r.background) + "," +
           std::to_string(r.none) + "," + format_pct(r.font_ratio()) + "," +
           format_pct(r.written_ratio()) + "," + format_pct(r.background_ratio()) + "," +
           format_pct(r.none_ratio()) + "\n";
  };
  for (auto id : kAllColorIds) emit(palette.name(id), table.by_font[index_of(id)]);
  emit("global", table.global);
  return out;
}

StroopTable parse_stroop_csv(std::string_view text, const Palette& palette) {
  const auto csv = read_csv(text);
  StroopTable table;
  for (const auto& row : csv.rows) {
    StroopRow r;
    r.total = parse_count(row[csv.col("total")]);
    r.font = parse_count(row[csv.col("font_count")]);
    r.written = parse_count(row[csv.col("written_count")]);
    r.background = parse_count(row[csv.col("background_count")]);
    r.none = parse_count(row[csv.col("none_count")]);
    const auto& name = row[csv.col("font_color")];
    if (name == "global") {
      table.global = r;
    } else if (auto id = palette.find(name)) {
      table.by_font[index_of(*id)] = r;
    } else {
      throw FormatError("report: unknown font color '" + name + "'");
    }
  }
  return table;
}

std::string prompts_csv(std::span<const PromptRow> rows, const Provenance& provenance) {
  std::string out = csv_provenance(provenance);
  out += "template_id,template,total,background_pct,font_pct,written_pct,none_pct,"
         "background_count,font_count,written_count,none_count\n";
  for (const auto& p : rows) {
    const auto& r = p.row;
    out += csv_field(p.template_id) + "," + csv_field(p.template_text) + "," + std::to_string(r.total) +
           "," + format_pct(r.background_ratio()) + "," + format_pct(r.font_ratio()) + "," +
           format_pct(r.written_ratio()) + "," + format_pct(r.none_ratio()) + "," +
           std::to_string(r.background) + "," + std::to_string(r.font) + "," +
           std::to_string(r.written) + "," + std::to_string(r.none) + "\n";
  }
  return out;
}

std::string layer_types_csv(std::span<const LayerDistribution> layers, const Provenance& provenance) {
  std::string out = csv_provenance(provenance);
  out += "layer,total";
  for (std::size_t c = 0; c < kNumTypeCategories; ++c) {
    out += "," + std::string(to_string(static_cast<TypeCategory>(c))) + "_count";
  }
  for (std::size_t c = 0; c < kNumTypeCategories; ++c) {
    out += "," + std::string(to_string(static_cast<TypeCategory>(c))) + "_pct";
  }
  out += "\n";
  for (const auto& l : layers) {
    out += csv_field(l.layer) + "," + std::to_string(l.total);
    for (auto n : l.counts) out += "," + std::to_string(n);
    for (std::size_t c = 0; c < kNumTypeCategories; ++c) {
      out += "," + (l.total == 0 ? std::string("n/a")
                                 : fixed2(100.0 * l.ratio(static_cast<TypeCategory>(c))));
    }
    out += "\n";
  }
  return out;
}

std::vector<LayerDistribution> parse_layer_types_csv(std::string_view text) {
  const auto csv = read_csv(text);
  std::vector<LayerDistribution> out;
  for (const auto& row : csv.rows) {
    LayerDistribution d;
    d.layer = row[csv.col("layer")];
    d.total = parse_count(row[csv.col("total")]);
    for (std::size_t c = 0; c < kNumTypeCategories; ++c) {
      d.counts[c] = parse_count(row[csv.col(std::string(to_string(static_cast<TypeCategory>(c))) + "_count")]);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::string hue_histogram_csv(const HueHistogram& h, const Provenance& provenance) {
  std::string out = csv_provenance(provenance);
  out += "# samples=" + std::to_string(h.samples) + "\n";
  out += "bin_start_deg,bin_end_deg,mass\n";
  for (std::size_t i = 0; i < h.bins(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.17g\n", i * h.bin_width(), (i + 1) * h.bin_width(),
                  h.mass[i]);
    out += buf;
  }
  return out;
}

HueHistogram parse_hue_histogram_csv(std::string_view text) {
  HueHistogram h;
  bool saw_header = false;
  for (auto line : detail::split_lines(text)) {
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = detail::split(line, ',');
    const auto last = std::string(detail::trim(cells.back()));
    try {
      std::size_t used = 0;
      const double v = std::stod(last, &used);
      if (used != last.size()) throw std::invalid_argument(last);
      h.mass.push_back(v);
    } catch (const std::logic_error&) {
      if (saw_header || !h.mass.empty()) throw FormatError("report: bad histogram value '" + last + "'");
      saw_header = true;
    }
  }
  if (h.mass.empty()) throw FormatError("report: histogram has no bins");
  h.samples = 1;
  return h;
}

std::string profiles_to_ndjson(std::span<const NeuronProfile> profiles, const Palette& palette,
                               const Provenance& provenance) {
  json header;
  header["format"] = kProfilesFormat;
  header["version"] = 1;
  json vocab = json::array();
  for (const auto& t : palette.vocabulary()) vocab.push_back(t.name);
  header["labels"] = vocab;
  header["palette_hash"] = palette.hash_hex();
  header["record_count"] = profiles.size();
  if (!provenance.empty()) {
    json p = json::object();
    for (const auto& [k, v] : provenance) p[k] = v;
    header["provenance"] = p;
  }
  std::string out = header.dump() + "\n";
  for (const auto& p : profiles) {
    json j;
    j["layer"] = p.layer;
    j["neuron"] = p.neuron;
    j["alpha"] = opt_json(p.color_selectivity);
    j["f_word"] = freq_json(p.f_word);
    j["f_font"] = freq_json(p.f_font);
    j["f_background"] = freq_json(p.f_background);
    j["f_pooled"] = freq_json(p.f_pooled);
    j["dominant_hue"] = opt_json(p.dominant_hue);
    j["type"] = to_string(p.type, palette);
    j["category"] = std::string(to_string(category_of(p.type)));
    j["term"] = p.type.term ? json(palette.name(*p.type.term)) : json(nullptr);
    j["stroop_max"] = p.stroop_max;
    j["reference_max"] = p.reference_max;
    j["any_word_max"] = p.any_word_max;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<NeuronProfile> parse_profiles(std::string_view text, const Palette& palette) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw FormatError("profiles: empty file");
  std::vector<NeuronProfile> out;
  try {
    const auto header = json::parse(lines[0]);
    if (header.value("format", "") != kProfilesFormat) {
      throw FormatError("profiles: header format is not \"chromaprobe-profiles\"");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (detail::trim(lines[i]).empty()) continue;
      const auto j = json::parse(lines[i]);
      NeuronProfile p;
      p.layer = j.at("layer").get<std::string>();
      p.neuron = j.at("neuron").get<std::size_t>();
      if (!j.at("alpha").is_null()) p.color_selectivity = j["alpha"].get<double>();
      p.f_word = freq_from(j.at("f_word"));
      p.f_font = freq_from(j.at("f_font"));
      p.f_background = freq_from(j.at("f_background"));
      p.f_pooled = freq_from(j.at("f_pooled"));
      if (!j.at("dominant_hue").is_null()) p.dominant_hue = j["dominant_hue"].get<double>();
      const auto category = j.at("category").get<std::string>();
      std::optional<ColorId> term;
      if (!j.at("term").is_null()) term = palette.lookup(j["term"].get<std::string>());
      if (category == "ColorChromatic" || category == "ColorAchromatic") {
        p.type = {NeuronKind::Color, term};
      } else if (category == "AnyWord") {
        p.type = {NeuronKind::AnyWord, std::nullopt};
      } else if (category == "ColorWord") {
        p.type = {NeuronKind::ColorWord, term};
      } else if (category == "ColorMultimodal") {
        p.type = {NeuronKind::ColorMultimodal, term};
      } else if (category == "NotActivated") {
        p.type = {NeuronKind::NotActivated, std::nullopt};
      } else if (category == "Unclassified") {
        p.type = {NeuronKind::Unclassified, std::nullopt};
      } else {
        throw FormatError("profiles: unknown category '" + category + "'");
      }
      if ((p.type.kind == NeuronKind::Color || p.type.kind == NeuronKind::ColorWord ||
           p.type.kind == NeuronKind::ColorMultimodal) &&
          !p.type.term) {
        throw FormatError("profiles: category " + category + " needs a term");
      }
      p.stroop_max = j.at("stroop_max").get<double>();
      p.reference_max = j.at("reference_max").get<double>();
      p.any_word_max = j.at("any_word_max").get<double>();
      out.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("profiles: ") + e.what());
  } catch (const InputError& e) {
    throw FormatError(std::string("profiles: ") + e.what());
  }
  return out;
}

std::string grouped_bars_svg(std::string_view title, std::span<const std::string> categories,
                             std::span<const BarSeries> series, const Provenance& provenance) {
  constexpr double kLeft = 50, kTop = 40, kPlotH = 220, kGroupW = 60, kBottom = 70;
  const double plot_w = std::max<double>(1, categories.size()) * kGroupW;
  const double width = kLeft + plot_w + 160;
  const double height = kTop + kPlotH + kBottom;
  const double bar_w = (kGroupW - 10) / std::max<double>(1, series.size());

  std::ostringstream s;
  s << svg_provenance(provenance);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(width) << "\" height=\""
    << fixed2(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"" << fixed2(kLeft) << "\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  for (int tick = 0; tick <= 100; tick += 25) {
    const double y = kTop + kPlotH * (1.0 - tick / 100.0);
    s << "<line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(y) << "\" x2=\"" << fixed2(kLeft + plot_w)
      << "\" y2=\"" << fixed2(y) << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << fixed2(kLeft - 6) << "\" y=\"" << fixed2(y + 4) << "\" text-anchor=\"end\">" << tick
      << "%</text>\n";
  }
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = kLeft + c * kGroupW + 5;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const double v = c < series[k].values.size() ? std::clamp(series[k].values[c], 0.0, 100.0) : 0.0;
      const double h = kPlotH * v / 100.0;
      s << "<rect x=\"" << fixed2(gx + k * bar_w) << "\" y=\"" << fixed2(kTop + kPlotH - h) << "\" width=\""
        << fixed2(bar_w) << "\" height=\"" << fixed2(h) << "\" fill=\""
        << kTypeColors[k % kTypeColors.size()] << "\" data-category=\"" << xml_escape(categories[c])
        << "\" data-series=\"" << xml_escape(series[k].name) << "\" data-pct=\"" << fixed2(v) << "\"/>\n";
    }
    s << "<text x=\"" << fixed2(gx + (kGroupW - 10) / 2) << "\" y=\"" << fixed2(kTop + kPlotH + 14)
      << "\" text-anchor=\"middle\">" << xml_escape(categories[c]) << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double y = kTop + 14.0 * k;
    s << "<rect x=\"" << fixed2(kLeft + plot_w + 12) << "\" y=\"" << fixed2(y) << "\" width=\"10\" height=\"10\" fill=\""
      << kTypeColors[k % kTypeColors.size()] << "\"/>\n";
    s << "<text x=\"" << fixed2(kLeft + plot_w + 26) << "\" y=\"" << fixed2(y + 9) << "\">"
      << xml_escape(series[k].name) << "</text>\n";
  }
  if (categories.empty()) {
    s << "<text x=\"" << fixed2(kLeft + 10) << "\" y=\"" << fixed2(kTop + kPlotH / 2) << "\">no data</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string layer_types_svg(std::span<const LayerDistribution> layers, const Provenance& provenance) {
  constexpr double kLeft = 50, kTop = 40, kPlotH = 240, kBarPitch = 50, kBarW = 34;
  const double plot_w = std::max<double>(1, layers.size()) * kBarPitch;
  const double width = kLeft + plot_w + 170;
  const double height = kTop + kPlotH + 60;

  std::ostringstream s;
  s << svg_provenance(provenance);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(width) << "\" height=\""
    << fixed2(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"" << fixed2(kLeft) << "\" y=\"20\" font-size=\"14\">Neuron types per layer</text>\n";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const double x = kLeft + i * kBarPitch + (kBarPitch - kBarW) / 2;
    double offset = 0.0;
    for (std::size_t c = 0; c < kNumTypeCategories; ++c) {
      const double pct = 100.0 * l.ratio(static_cast<TypeCategory>(c));
      const double h = kPlotH * pct / 100.0;
      s << "<rect x=\"" << fixed2(x) << "\" y=\"" << fixed2(kTop + kPlotH - offset - h) << "\" width=\""
        << fixed2(kBarW) << "\" height=\"" << fixed2(h) << "\" fill=\"" << kTypeColors[c]
        << "\" data-layer=\"" << xml_escape(l.layer) << "\" data-type=\""
        << to_string(static_cast<TypeCategory>(c)) << "\" data-pct=\"" << fixed2(pct) << "\"/>\n";
      offset += h;
    }
    s << "<text x=\"" << fixed2(x + kBarW / 2) << "\" y=\"" << fixed2(kTop + kPlotH + 14)
      << "\" text-anchor=\"middle\">" << xml_escape(l.layer) << "</text>\n";
  }
  for (std::size_t c = 0; c < kNumTypeCategories; ++c) {
    const double y = kTop + 14.0 * c;
    s << "<rect x=\"" << fixed2(kLeft + plot_w + 12) << "\" y=\"" << fixed2(y)
      << "\" width=\"10\" height=\"10\" fill=\"" << kTypeColors[c] << "\"/>\n";
    s << "<text x=\"" << fixed2(kLeft + plot_w + 26) << "\" y=\"" << fixed2(y + 9) << "\">"
      << to_string(static_cast<TypeCategory>(c)) << "</text>\n";
  }
  if (layers.empty()) {
    s << "<text x=\"" << fixed2(kLeft + 10) << "\" y=\"" << fixed2(kTop + kPlotH / 2) << "\">no data</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string stroop_svg(const StroopTable& table, const Palette& palette, const Provenance& provenance) {
  std::vector<std::string> categories;
  std::array<BarSeries, 4> series{{{"font (correct)", {}}, {"written", {}}, {"background", {}}, {"none", {}}}};
  auto add = [&](std::string name, const StroopRow& r) {
    if (r.total == 0) return;
    categories.push_back(std::move(name));
    series[0].values.push_back(100.0 * *r.font_ratio());
    series[1].values.push_back(100.0 * *r.written_ratio());
    series[2].values.push_back(100.0 * *r.background_ratio());
    series[3].values.push_back(100.0 * *r.none_ratio());
  };
  for (auto id : kAllColorIds) add(palette.name(id), table.by_font[index_of(id)]);
  add("global", table.global);
  return grouped_bars_svg("Stroop answers by font color", categories, series, provenance);
}

std::string chromaticity_svg(const ChromaticityTable& table, const Provenance& provenance) {
  std::vector<std::string> categories;
  std::array<BarSeries, 3> series{{{"background", {}}, {"object", {}}, {"other", {}}}};
  for (auto bg : kRowOrder) {
    for (auto obj : kRowOrder) {
      const auto& c = table.at(bg, obj);
      if (c.total == 0) continue;
      categories.push_back(std::string(bg == Chromaticity::Achromatic ? "A" : "C") + "bg/" +
                           (obj == Chromaticity::Achromatic ? "A" : "C") + "obj");
      series[0].values.push_back(100.0 * *c.background_ratio());
      series[1].values.push_back(100.0 * *c.object_ratio());
      series[2].values.push_back(100.0 * *c.other_ratio());
    }
  }
  return grouped_bars_svg("Color assignment by chromaticity", categories, series, provenance);
}

std::string hue_histogram_svg(const HueHistogram& histogram, const HueHistogram* reference,
                              const Provenance& provenance) {
  std::vector<std::string> categories;
  std::vector<BarSeries> series{{"color-selective neurons", {}}};
  if (reference) series.push_back({"reference", {}});
  if (!histogram.empty()) {
    for (std::size_t i = 0; i < histogram.bins(); ++i) {
      char label[16];
      std::snprintf(label, sizeof label, "%.0f", i * histogram.bin_width());
      categories.emplace_back(label);
      series[0].values.push_back(100.0 * histogram.mass[i]);
      if (reference) series[1].values.push_back(i < reference->bins() ? 100.0 * reference->mass[i] : 0.0);
    }
  }
  return grouped_bars_svg("Hue selectivity distribution", categories, series, provenance);
}

std::string selectivity_svg(std::span<const NeuronProfile> profiles, const Provenance& provenance) {
  constexpr std::size_t kBins = 10;
  std::vector<std::string> layers;
  std::vector<std::array<std::uint64_t, kBins>> counts;
  std::vector<std::uint64_t> totals;
  for (const auto& p : profiles) {
    auto it = std::find(layers.begin(), layers.end(), p.layer);
    std::size_t li = static_cast<std::size_t>(it - layers.begin());
    if (it == layers.end()) {
      layers.push_back(p.layer);
      counts.push_back({});
      totals.push_back(0);
    }
    if (!p.color_selectivity) continue;
    const auto bin = std::min(kBins - 1, static_cast<std::size_t>(*p.color_selectivity * kBins));
    ++counts[li][bin];
    ++totals[li];
  }
  std::vector<std::string> categories;
  for (std::size_t b = 0; b < kBins; ++b) {
    categories.push_back(fixed2(static_cast<double>(b) / kBins).substr(0, 3));
  }
  std::vector<BarSeries> series;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    BarSeries s{layers[l], {}};
    for (std::size_t b = 0; b < kBins; ++b) {
      s.values.push_back(totals[l] == 0 ? 0.0 : 100.0 * counts[l][b] / totals[l]);
    }
    series.push_back(std::move(s));
  }
  return grouped_bars_svg("Color selectivity index per layer", categories, series, provenance);
}

}  // namespace chromaprobe
