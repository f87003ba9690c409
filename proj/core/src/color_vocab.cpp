#include "chromaprobe/color_vocab.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chromaprobe/errors.hpp"
#include "chromaprobe/hashing.hpp"
#include "text_util.hpp"

namespace chromaprobe {

namespace {

struct StandardEntry {
  std::string_view name;
  Rgb rgb;
  Chromaticity chromaticity;
};

constexpr std::array<StandardEntry, kNumColorTerms> kStandard = {{
    {"black", {0, 0, 0}, Chromaticity::Achromatic},
    {"blue", {0, 0, 255}, Chromaticity::Chromatic},
    {"brown", {139, 69, 19}, Chromaticity::Chromatic},
    {"gray", {128, 128, 128}, Chromaticity::Achromatic},
    {"green", {0, 128, 0}, Chromaticity::Chromatic},
    {"orange", {255, 165, 0}, Chromaticity::Chromatic},
    {"pink", {255, 192, 203}, Chromaticity::Chromatic},
    {"purple", {128, 0, 128}, Chromaticity::Chromatic},
    {"red", {255, 0, 0}, Chromaticity::Chromatic},
    {"white", {255, 255, 255}, Chromaticity::Achromatic},
    {"yellow", {255, 255, 0}, Chromaticity::Chromatic},
}};

std::array<ColorTerm, kNumColorTerms> standard_terms() {
  std::array<ColorTerm, kNumColorTerms> out;
  for (std::size_t i = 0; i < kNumColorTerms; ++i) {
    out[i] = ColorTerm{kAllColorIds[i], std::string(kStandard[i].name), kStandard[i].rgb,
                       kStandard[i].chromaticity};
  }
  return out;
}

int parse_channel(std::string_view text, std::size_t line_no) {
  text = detail::trim(text);
  int value = -1;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0 || value > 255) {
    throw InputError("color_vocab: palette line " + std::to_string(line_no) +
                     ": channel '" + std::string(text) + "' is not an integer in [0,255]");
  }
  return value;
}

bool valid_spelling(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-';
  });
}

}  // namespace

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string_view canonical_name(ColorId id) { return kStandard[index_of(id)].name; }

Chromaticity chromaticity_of(ColorId id) { return kStandard[index_of(id)].chromaticity; }

std::string_view to_string(Chromaticity c) {
  return c == Chromaticity::Chromatic ? "Chromatic" : "Achromatic";
}

Palette::Palette(std::array<ColorTerm, kNumColorTerms> terms) : terms_(std::move(terms)) {
  validate();
}

const Palette& Palette::standard() {
  static const Palette palette(standard_terms());
  return palette;
}

void Palette::validate() const {
  for (std::size_t i = 0; i < kNumColorTerms; ++i) {
    const auto& t = terms_[i];
    if (t.chromaticity == Chromaticity::Achromatic && !(t.rgb.r == t.rgb.g && t.rgb.g == t.rgb.b)) {
      throw InputError("color_vocab: achromatic term '" + t.name + "' must have r = g = b");
    }
    for (std::size_t j = i + 1; j < kNumColorTerms; ++j) {
      if (terms_[j].name == t.name) {
        throw InputError("color_vocab: duplicate term name '" + t.name + "'");
      }
      if (terms_[j].rgb == t.rgb) {
        throw InputError("color_vocab: terms '" + t.name + "' and '" + terms_[j].name +
                         "' share an RGB value");
      }
    }
  }
}

Palette Palette::parse(std::string_view text) {
  auto terms = standard_terms();
  std::size_t line_no = 0;
  for (auto raw : detail::split_lines(text)) {
    ++line_no;
    auto line = detail::trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find_first_of("=:");
    if (eq == std::string_view::npos) {
      throw InputError("color_vocab: palette line " + std::to_string(line_no) +
                       ": expected 'term = R,G,B'");
    }
    const auto key = detail::trim(line.substr(0, eq));
    auto value = detail::trim(line.substr(eq + 1));

    std::optional<ColorId> id;
    for (auto candidate : kAllColorIds) {
      if (canonical_name(candidate) == key || terms[index_of(candidate)].name == key) id = candidate;
    }
    if (!id) {
      throw InputError("color_vocab: palette line " + std::to_string(line_no) +
                       ": unknown term '" + std::string(key) + "'");
    }

    std::string_view spelling;
    if (const auto as = value.find(" as "); as != std::string_view::npos) {
      spelling = detail::trim(value.substr(as + 4));
      value = detail::trim(value.substr(0, as));
      if (!valid_spelling(spelling)) {
        throw InputError("color_vocab: palette line " + std::to_string(line_no) +
                         ": spelling must be letters or '-'");
      }
    }

    const auto parts = detail::split(value, ',');
    if (parts.size() != 3) {
      throw InputError("color_vocab: palette line " + std::to_string(line_no) +
                       ": expected three comma-separated channels");
    }
    auto& term = terms[index_of(*id)];
    term.rgb = Rgb{static_cast<std::uint8_t>(parse_channel(parts[0], line_no)),
                   static_cast<std::uint8_t>(parse_channel(parts[1], line_no)),
                   static_cast<std::uint8_t>(parse_channel(parts[2], line_no))};
    if (!spelling.empty()) term.name = std::string(spelling);
  }
  return Palette(std::move(terms));
}

Palette Palette::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("color_vocab: cannot open palette file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<ColorId> Palette::find(std::string_view name) const {
  for (const auto& t : terms_) {
    if (t.name == name) return t.id;
  }
  for (auto id : kAllColorIds) {
    if (canonical_name(id) == name) return id;
  }
  return std::nullopt;
}

ColorId Palette::lookup(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw InputError("color_vocab: unknown color term '" + std::string(name) + "'");
}

std::uint64_t Palette::hash() const {
  std::string canonical;
  for (const auto& t : terms_) {
    canonical += t.name;
    canonical += '=';
    canonical += std::to_string(t.rgb.r) + ',' + std::to_string(t.rgb.g) + ',' +
                 std::to_string(t.rgb.b);
    canonical += '\n';
  }
  return fnv1a(canonical);
}

std::string Palette::hash_hex() const { return to_hex(hash()); }

std::optional<double> hue_of(Rgb rgb) {
  const int r = rgb.r, g = rgb.g, b = rgb.b;
  const int hi = std::max({r, g, b});
  const int lo = std::min({r, g, b});
  const int delta = hi - lo;
  if (delta == 0) return std::nullopt;

  // Sector base plus a fractional offset; branch priority r > g > b.
  double sector;
  double frac;
  if (hi == r) {
    sector = 0.0;
    frac = static_cast<double>(g - b) / delta;
  } else if (hi == g) {
    sector = 120.0;
    frac = static_cast<double>(b - r) / delta;
  } else {
    sector = 240.0;
    frac = static_cast<double>(r - g) / delta;
  }
  double h = sector + 60.0 * frac;
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return h;
}

std::optional<double> hue_of(int r, int g, int b) {
  for (int c : {r, g, b}) {
    if (c < 0 || c > 255) {
      throw InputError("color_vocab: RGB component " + std::to_string(c) + " outside [0,255]");
    }
  }
  return hue_of(Rgb{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                    static_cast<std::uint8_t>(b)});
}

double saturation_of(Rgb rgb) {
  const int hi = std::max({rgb.r, rgb.g, rgb.b});
  const int lo = std::min({rgb.r, rgb.g, rgb.b});
  return hi == 0 ? 0.0 : static_cast<double>(hi - lo) / hi;
}

}  // namespace chromaprobe
