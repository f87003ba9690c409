#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace chromaprobe {

inline constexpr std::size_t kNumColorTerms = 11;

/// Basic color terms in alphabetical order of their canonical names. The
/// numeric value is the global tie-break rank used by every argmax.
enum class ColorId : std::uint8_t {
  Black,
  Blue,
  Brown,
  Gray,
  Green,
  Orange,
  Pink,
  Purple,
  Red,
  White,
  Yellow,
};

enum class Chromaticity : std::uint8_t { Chromatic, Achromatic };

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr bool operator==(const Rgb&, const Rgb&) = default;
};

struct ColorTerm {
  ColorId id;
  std::string name;  // spelling used in prompts, manifests and reports
  Rgb rgb;
  Chromaticity chromaticity;
};

/// Per-term array indexed by ColorId.
template <typename T>
using PerColor = std::array<T, kNumColorTerms>;

constexpr std::size_t index_of(ColorId id) { return static_cast<std::size_t>(id); }

inline constexpr std::array<ColorId, kNumColorTerms> kAllColorIds = {
    ColorId::Black, ColorId::Blue,  ColorId::Brown,  ColorId::Gray,
    ColorId::Green, ColorId::Orange, ColorId::Pink,  ColorId::Purple,
    ColorId::Red,   ColorId::White, ColorId::Yellow,
};

std::string_view canonical_name(ColorId id);
Chromaticity chromaticity_of(ColorId id);
std::string_view to_string(Chromaticity c);

/// The 11-term vocabulary with its reference colors. Immutable once built.
///
/// Names and RGB values may be overridden from a palette file, but the set
/// of terms, their order and their chromaticity classes are fixed.
class Palette {
 public:
  /// Named-color convention (black, white, gray 128, green 0,128,0, ...).
  static const Palette& standard();

  /// Parse a palette override. One `term = R,G,B` entry per line; an
  /// optional `as <spelling>` suffix renames the term (e.g. `gray = 128,128,128 as grey`).
  /// `#` starts a comment. Terms not mentioned keep their standard values.
  static Palette parse(std::string_view text);
  static Palette load(const std::filesystem::path& path);

  std::span<const ColorTerm> vocabulary() const { return terms_; }
  const ColorTerm& term(ColorId id) const { return terms_[index_of(id)]; }
  const std::string& name(ColorId id) const { return term(id).name; }
  Rgb rgb(ColorId id) const { return term(id).rgb; }

  /// Accepts the palette spelling or the canonical name.
  std::optional<ColorId> find(std::string_view name) const;
  ColorId lookup(std::string_view name) const;  // throws InputError

  /// FNV-1a over the canonical serialization; written into artifact headers.
  std::uint64_t hash() const;
  std::string hash_hex() const;

 private:
  explicit Palette(std::array<ColorTerm, kNumColorTerms> terms);
  void validate() const;

  std::array<ColorTerm, kNumColorTerms> terms_;
};

/// HSV hue in degrees [0, 360); empty for zero-saturation input.
std::optional<double> hue_of(Rgb rgb);

/// Checked variant for untyped integers; throws InputError outside [0, 255].
std::optional<double> hue_of(int r, int g, int b);

/// HSV saturation in [0, 1].
double saturation_of(Rgb rgb);

}  // namespace chromaprobe
