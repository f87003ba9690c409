#include "glyphs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace chromaprobe::detail {

namespace {

int letter_index(char c) {
  if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return (c >= 'A' && c <= 'Z') ? c - 'A' : -1;
}

// 5x7 matrix font; one string of '1'/'0' per row, top to bottom.
constexpr std::array<std::array<std::string_view, 7>, 26> kMatrix5x7 = {{
    {"01110", "10001", "10001", "11111", "10001", "10001", "10001"},  // A
    {"11110", "10001", "10001", "11110", "10001", "10001", "11110"},  // B
    {"01110", "10001", "10000", "10000", "10000", "10001", "01110"},  // C
    {"11100", "10010", "10001", "10001", "10001", "10010", "11100"},  // D
    {"11111", "10000", "10000", "11110", "10000", "10000", "11111"},  // E
    {"11111", "10000", "10000", "11110", "10000", "10000", "10000"},  // F
    {"01110", "10001", "10000", "10111", "10001", "10001", "01111"},  // G
    {"10001", "10001", "10001", "11111", "10001", "10001", "10001"},  // H
    {"01110", "00100", "00100", "00100", "00100", "00100", "01110"},  // I
    {"00111", "00010", "00010", "00010", "00010", "10010", "01100"},  // J
    {"10001", "10010", "10100", "11000", "10100", "10010", "10001"},  // K
    {"10000", "10000", "10000", "10000", "10000", "10000", "11111"},  // L
    {"10001", "11011", "10101", "10101", "10001", "10001", "10001"},  // M
    {"10001", "10001", "11001", "10101", "10011", "10001", "10001"},  // N
    {"01110", "10001", "10001", "10001", "10001", "10001", "01110"},  // O
    {"11110", "10001", "10001", "11110", "10000", "10000", "10000"},  // P
    {"01110", "10001", "10001", "10001", "10101", "10010", "01101"},  // Q
    {"11110", "10001", "10001", "11110", "10100", "10010", "10001"},  // R
    {"01111", "10000", "10000", "01110", "00001", "00001", "11110"},  // S
    {"11111", "00100", "00100", "00100", "00100", "00100", "00100"},  // T
    {"10001", "10001", "10001", "10001", "10001", "10001", "01110"},  // U
    {"10001", "10001", "10001", "10001", "10001", "01010", "00100"},  // V
    {"10001", "10001", "10001", "10101", "10101", "10101", "01010"},  // W
    {"10001", "10001", "01010", "00100", "01010", "10001", "10001"},  // X
    {"10001", "10001", "10001", "01010", "00100", "00100", "00100"},  // Y
    {"11111", "00001", "00010", "00100", "01000", "10000", "11111"},  // Z
}};

// Compact 3x5 block font.
constexpr std::array<std::array<std::string_view, 5>, 26> kBlock3x5 = {{
    {"010", "101", "111", "101", "101"},  // A
    {"110", "101", "110", "101", "110"},  // B
    {"011", "100", "100", "100", "011"},  // C
    {"110", "101", "101", "101", "110"},  // D
    {"111", "100", "110", "100", "111"},  // E
    {"111", "100", "110", "100", "100"},  // F
    {"011", "100", "101", "101", "011"},  // G
    {"101", "101", "111", "101", "101"},  // H
    {"111", "010", "010", "010", "111"},  // I
    {"001", "001", "001", "101", "010"},  // J
    {"101", "101", "110", "101", "101"},  // K
    {"100", "100", "100", "100", "111"},  // L
    {"101", "111", "111", "101", "101"},  // M
    {"110", "101", "101", "101", "101"},  // N
    {"010", "101", "101", "101", "010"},  // O
    {"110", "101", "110", "100", "100"},  // P
    {"010", "101", "101", "110", "011"},  // Q
    {"110", "101", "110", "101", "101"},  // R
    {"011", "100", "010", "001", "110"},  // S
    {"111", "010", "010", "010", "010"},  // T
    {"101", "101", "101", "101", "111"},  // U
    {"101", "101", "101", "101", "010"},  // V
    {"101", "101", "111", "111", "101"},  // W
    {"101", "101", "010", "101", "101"},  // X
    {"101", "101", "010", "010", "010"},  // Y
    {"111", "001", "010", "100", "111"},  // Z
}};

template <std::size_t Rows, std::size_t Glyphs>
bool bitmap_covers(const std::array<std::array<std::string_view, Rows>, Glyphs>& table, char c,
                   double x, double y) {
  const int g = letter_index(c);
  if (g < 0 || x < 0.0 || y < 0.0) return false;
  const auto row = static_cast<std::size_t>(y);
  const auto col = static_cast<std::size_t>(x);
  if (row >= Rows) return false;
  const auto& line = table[static_cast<std::size_t>(g)][row];
  return col < line.size() && line[col] == '1';
}

bool matrix_covers(char c, double x, double y) { return bitmap_covers(kMatrix5x7, c, x, y); }
bool block_covers(char c, double x, double y) { return bitmap_covers(kBlock3x5, c, x, y); }

// Stroke font: polylines on a 4 x 6 grid, stroked with half-width 0.5 and
// offset by 0.5 so the ink stays inside a 5 x 7 design box.
struct Stroke {
  std::array<std::array<signed char, 2>, 12> pts;
  int n;
};

using StrokeGlyph = std::array<Stroke, 3>;

constexpr Stroke S(std::initializer_list<std::array<signed char, 2>> pts) {
  Stroke s{};
  s.n = 0;
  for (auto p : pts) s.pts[static_cast<std::size_t>(s.n++)] = p;
  return s;
}

constexpr Stroke kNone{};

const std::array<StrokeGlyph, 26>& stroke_table() {
  static const std::array<StrokeGlyph, 26> table = {{
      {S({{0, 6}, {0, 2}, {2, 0}, {4, 2}, {4, 6}}), S({{0, 3}, {4, 3}}), kNone},  // A
      {S({{0, 0}, {0, 6}, {3, 6}, {4, 5}, {4, 4}, {3, 3}, {0, 3}}),
       S({{0, 0}, {3, 0}, {4, 1}, {4, 2}, {3, 3}}), kNone},  // B
      {S({{4, 0}, {1, 0}, {0, 1}, {0, 5}, {1, 6}, {4, 6}}), kNone, kNone},  // C
      {S({{0, 0}, {0, 6}, {2, 6}, {4, 4}, {4, 2}, {2, 0}, {0, 0}}), kNone, kNone},  // D
      {S({{4, 0}, {0, 0}, {0, 6}, {4, 6}}), S({{0, 3}, {3, 3}}), kNone},  // E
      {S({{4, 0}, {0, 0}, {0, 6}}), S({{0, 3}, {3, 3}}), kNone},  // F
      {S({{4, 1}, {3, 0}, {1, 0}, {0, 1}, {0, 5}, {1, 6}, {3, 6}, {4, 5}, {4, 3}, {2, 3}}),
       kNone, kNone},  // G
      {S({{0, 0}, {0, 6}}), S({{4, 0}, {4, 6}}), S({{0, 3}, {4, 3}})},  // H
      {S({{1, 0}, {3, 0}}), S({{2, 0}, {2, 6}}), S({{1, 6}, {3, 6}})},  // I
      {S({{4, 0}, {4, 5}, {3, 6}, {1, 6}, {0, 5}}), kNone, kNone},  // J
      {S({{0, 0}, {0, 6}}), S({{4, 0}, {0, 3}, {4, 6}}), kNone},  // K
      {S({{0, 0}, {0, 6}, {4, 6}}), kNone, kNone},  // L
      {S({{0, 6}, {0, 0}, {2, 3}, {4, 0}, {4, 6}}), kNone, kNone},  // M
      {S({{0, 6}, {0, 0}, {4, 6}, {4, 0}}), kNone, kNone},  // N
      {S({{1, 0}, {3, 0}, {4, 1}, {4, 5}, {3, 6}, {1, 6}, {0, 5}, {0, 1}, {1, 0}}), kNone,
       kNone},  // O
      {S({{0, 6}, {0, 0}, {3, 0}, {4, 1}, {4, 2}, {3, 3}, {0, 3}}), kNone, kNone},  // P
      {S({{1, 0}, {3, 0}, {4, 1}, {4, 5}, {3, 6}, {1, 6}, {0, 5}, {0, 1}, {1, 0}}),
       S({{2, 4}, {4, 6}}), kNone},  // Q
      {S({{0, 6}, {0, 0}, {3, 0}, {4, 1}, {4, 2}, {3, 3}, {0, 3}}), S({{2, 3}, {4, 6}}),
       kNone},  // R
      {S({{4, 1}, {3, 0}, {1, 0}, {0, 1}, {0, 2}, {1, 3}, {3, 3}, {4, 4}, {4, 5}, {3, 6}, {1, 6},
          {0, 5}}),
       kNone, kNone},  // S
      {S({{0, 0}, {4, 0}}), S({{2, 0}, {2, 6}}), kNone},  // T
      {S({{0, 0}, {0, 5}, {1, 6}, {3, 6}, {4, 5}, {4, 0}}), kNone, kNone},  // U
      {S({{0, 0}, {2, 6}, {4, 0}}), kNone, kNone},  // V
      {S({{0, 0}, {1, 6}, {2, 3}, {3, 6}, {4, 0}}), kNone, kNone},  // W
      {S({{0, 0}, {4, 6}}), S({{4, 0}, {0, 6}}), kNone},  // X
      {S({{0, 0}, {2, 3}, {4, 0}}), S({{2, 3}, {2, 6}}), kNone},  // Y
      {S({{0, 0}, {4, 0}, {0, 6}, {4, 6}}), kNone, kNone},  // Z
  }};
  return table;
}

double segment_distance_sq(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len_sq = dx * dx + dy * dy;
  double t = len_sq > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len_sq : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = ax + t * dx - px;
  const double ey = ay + t * dy - py;
  return ex * ex + ey * ey;
}

bool stroke_covers(char c, double x, double y) {
  const int g = letter_index(c);
  if (g < 0) return false;
  constexpr double kHalfWidth = 0.5;
  const double px = x - 0.5;
  const double py = y - 0.5;
  for (const auto& stroke : stroke_table()[static_cast<std::size_t>(g)]) {
    for (int i = 0; i + 1 < stroke.n; ++i) {
      const auto& a = stroke.pts[static_cast<std::size_t>(i)];
      const auto& b = stroke.pts[static_cast<std::size_t>(i + 1)];
      if (segment_distance_sq(px, py, a[0], a[1], b[0], b[1]) <= kHalfWidth * kHalfWidth) {
        return true;
      }
    }
  }
  return false;
}

const std::array<Font, 3> kFonts = {{
    {"matrix-5x7", 5.0, 7.0, 1.0, matrix_covers},
    {"block-3x5", 3.0, 5.0, 1.0, block_covers},
    {"stroke-4x6", 5.0, 7.0, 1.0, stroke_covers},
}};

}  // namespace

int font_count() { return static_cast<int>(kFonts.size()); }

const Font& font(int id) {
  if (id < 0 || id >= font_count()) throw std::out_of_range("glyphs: font id out of range");
  return kFonts[static_cast<std::size_t>(id)];
}

}  // namespace chromaprobe::detail
