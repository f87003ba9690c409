#pragma once

#include <string_view>

namespace chromaprobe::detail {

/// A bundled glyph source covering A-Z. Geometry is in design units: each
/// glyph occupies `cols` x `rows`, and consecutive glyphs are separated by
/// `gap` units. Characters outside A-Z (case-insensitive) render blank.
struct Font {
  std::string_view name;
  double cols;
  double rows;
  double gap;
  bool (*covers)(char c, double x, double y);
};

int font_count();
const Font& font(int id);

/// Width of a single line of `n` glyphs, in design units.
inline double text_width_units(const Font& f, std::size_t n) {
  return n == 0 ? 0.0 : static_cast<double>(n) * f.cols + static_cast<double>(n - 1) * f.gap;
}

}  // namespace chromaprobe::detail
