#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chromaprobe/color_vocab.hpp"
#include "chromaprobe/image.hpp"

namespace chromaprobe {

inline constexpr std::string_view kGeneratorVersion = "chromaprobe-stimulus/1";

enum class ShapeKind : std::uint8_t {
  Triangle,
  Square,
  Circle,
  Rectangle,
  Ellipse,
  Pentagon,
  Hexagon,
  Star,
};

inline constexpr std::array<ShapeKind, 8> kAllShapes = {
    ShapeKind::Triangle, ShapeKind::Square,   ShapeKind::Circle,  ShapeKind::Rectangle,
    ShapeKind::Ellipse,  ShapeKind::Pentagon, ShapeKind::Hexagon, ShapeKind::Star,
};

std::string_view to_string(ShapeKind kind);
ShapeKind parse_shape(std::string_view name);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// One shape on a uniform background. `scale` is the diameter of the
/// shape's bounding circle as a fraction of the shorter canvas side.
struct ShapeSceneSpec {
  ShapeKind shape = ShapeKind::Square;
  ColorId background = ColorId::White;
  ColorId object_color = ColorId::Red;
  double rotation_deg = 0.0;
  Point center{0.5, 0.5};
  double scale = 0.5;
  std::uint64_t seed = 0;
};

/// A color word written in one line of uppercase glyphs.
struct StroopSceneSpec {
  ColorId word = ColorId::Red;
  ColorId font_color = ColorId::Green;
  ColorId background = ColorId::Blue;
  int font_id = 0;
  int font_size = 32;  // cap height in pixels
  Point position{0.5, 0.5};  // center of the text box
  std::uint64_t seed = 0;
};

using SceneSpec = std::variant<ShapeSceneSpec, StroopSceneSpec>;

enum class DatasetKind : std::uint8_t { Shapes, Stroop, External };

std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view name);

/// Records of an externally supplied probe corpus (e.g. natural images)
/// carry no scene spec, only whether the image is known to contain text.
struct ExternalImage {
  bool has_text = false;
};

struct StimulusRecord {
  std::string id;
  std::variant<ShapeSceneSpec, StroopSceneSpec, ExternalImage> spec;
  std::string path;  // relative to the manifest directory

  bool is_shape() const { return std::holds_alternative<ShapeSceneSpec>(spec); }
  bool is_stroop() const { return std::holds_alternative<StroopSceneSpec>(spec); }
  const ShapeSceneSpec& shape() const { return std::get<ShapeSceneSpec>(spec); }
  const StroopSceneSpec& stroop() const { return std::get<StroopSceneSpec>(spec); }
  bool has_text() const;
};

struct DatasetManifest {
  DatasetKind kind = DatasetKind::Shapes;
  std::uint64_t master_seed = 0;
  std::uint32_t samples_per_combo = 0;
  bool white_background = false;
  bool grayscale = false;  // records point at grayscale variants
  Geometry geometry;
  std::string palette_hash;
  std::string generator_version{kGeneratorVersion};
  std::vector<StimulusRecord> records;
};

/// Sampling ranges for scene parameters.
struct SceneRanges {
  double rotation_min = 0.0;
  double rotation_max = 360.0;
  double scale_min = 0.15;
  double scale_max = 0.6;
  int font_size_min = 18;
  int font_size_max = 64;

  void validate() const;
};

struct GeneratorOptions {
  Geometry geometry;
  SceneRanges ranges;
  bool white_background_only = false;  // Stroop only
};

/// Number of bundled glyph sources.
int font_count();
std::string_view font_name(int font_id);

DatasetManifest enumerate_shape_dataset(std::uint32_t samples_per_combo, std::uint64_t master_seed,
                                        const Palette& palette = Palette::standard(),
                                        const GeneratorOptions& options = {});

DatasetManifest enumerate_stroop_dataset(std::uint32_t samples_per_combo, std::uint64_t master_seed,
                                         const Palette& palette = Palette::standard(),
                                         const GeneratorOptions& options = {});

/// Closed-form record counts.
std::uint64_t shape_dataset_size(std::uint32_t samples_per_combo);
std::uint64_t stroop_dataset_size(std::uint32_t samples_per_combo, bool white_background_only);

/// Checks the color-exclusion constraints; returns a description of the first violation.
std::optional<std::string> exclusion_violation(const StimulusRecord& record);

/// Pixel-space box of the text of a Stroop spec: (x0, y0, x1, y1).
std::array<double, 4> text_box(const StroopSceneSpec& spec, const Palette& palette, Geometry geometry);

RgbImage render_scene(const SceneSpec& spec, Geometry geometry = {},
                      const Palette& palette = Palette::standard());

/// Companion corpus whose records are the grayscale variants of `source`:
/// ids gain a ":gray" suffix and images live under "gray/".
DatasetManifest grayscale_manifest(const DatasetManifest& source);

inline constexpr std::string_view kGraySuffix = ":gray";

/// Renders a manifest record, applying the grayscale conversion for
/// grayscale manifests. External records cannot be rendered.
RgbImage render_record(const DatasetManifest& manifest, const StimulusRecord& record,
                       const Palette& palette = Palette::standard());

}  // namespace chromaprobe
