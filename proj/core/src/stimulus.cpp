#include "chromaprobe/stimulus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <unordered_set>

#include "chromaprobe/errors.hpp"
#include "chromaprobe/hashing.hpp"
#include "glyphs.hpp"

namespace chromaprobe {

namespace {

constexpr std::array<std::string_view, 8> kShapeNames = {
    "triangle", "square", "circle", "rectangle", "ellipse", "pentagon", "hexagon", "star",
};

constexpr int kSupersample = 4;  // per axis
constexpr double kTextMargin = 2.0;  // pixels kept clear around a text box

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

std::string content_path(std::string_view prefix, const std::string& canonical) {
  const auto hex = to_hex(fnv1a(canonical));
  return std::string(prefix) + "/" + hex.substr(0, 2) + "/" + hex + ".png";
}

// Shape outline: either a polygon or an ellipse, in pixel coordinates.
struct ShapeGeometry {
  std::vector<Point> polygon;  // empty for ellipses
  Point center;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double angle_rad = 0.0;

  bool contains(double x, double y) const {
    if (polygon.empty()) {
      const double dx = x - center.x;
      const double dy = y - center.y;
      const double c = std::cos(angle_rad);
      const double s = std::sin(angle_rad);
      const double u = (dx * c + dy * s) / semi_major;
      const double v = (-dx * s + dy * c) / semi_minor;
      return u * u + v * v <= 1.0;
    }
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const auto& a = polygon[i];
      const auto& b = polygon[j];
      if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) {
        inside = !inside;
      }
    }
    return inside;
  }

  std::array<double, 4> bounds() const {
    if (polygon.empty()) {
      const double c = std::cos(angle_rad);
      const double s = std::sin(angle_rad);
      const double a = semi_major;
      const double b = semi_minor;
      const double ex = std::sqrt(a * a * c * c + b * b * s * s);
      const double ey = std::sqrt(a * a * s * s + b * b * c * c);
      return {center.x - ex, center.y - ey, center.x + ex, center.y + ey};
    }
    std::array<double, 4> box{polygon[0].x, polygon[0].y, polygon[0].x, polygon[0].y};
    for (const auto& p : polygon) {
      box[0] = std::min(box[0], p.x);
      box[1] = std::min(box[1], p.y);
      box[2] = std::max(box[2], p.x);
      box[3] = std::max(box[3], p.y);
    }
    return box;
  }
};

std::vector<Point> regular_polygon(Point c, double radius, int n, double angle, double phase_deg) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = angle + (phase_deg + 360.0 * i / n) * std::numbers::pi / 180.0;
    pts.push_back({c.x + radius * std::cos(t), c.y + radius * std::sin(t)});
  }
  return pts;
}

ShapeGeometry shape_geometry(const ShapeSceneSpec& spec, Geometry geometry) {
  const double side = std::min(geometry.width, geometry.height);
  const double radius = spec.scale * side / 2.0;
  const Point c{spec.center.x * geometry.width, spec.center.y * geometry.height};
  const double angle = spec.rotation_deg * std::numbers::pi / 180.0;

  ShapeGeometry g;
  g.center = c;
  g.angle_rad = angle;
  switch (spec.shape) {
    case ShapeKind::Triangle:
      g.polygon = regular_polygon(c, radius, 3, angle, -90.0);
      break;
    case ShapeKind::Square:
      g.polygon = regular_polygon(c, radius, 4, angle, 45.0);
      break;
    case ShapeKind::Pentagon:
      g.polygon = regular_polygon(c, radius, 5, angle, -90.0);
      break;
    case ShapeKind::Hexagon:
      g.polygon = regular_polygon(c, radius, 6, angle, 0.0);
      break;
    case ShapeKind::Rectangle: {
      // 2:1 rectangle inscribed in the bounding circle.
      const double hw = 2.0 * radius / std::sqrt(5.0);
      const double hh = radius / std::sqrt(5.0);
      const double co = std::cos(angle);
      const double si = std::sin(angle);
      for (auto [lx, ly] : {std::pair{-hw, -hh}, {hw, -hh}, {hw, hh}, {-hw, hh}}) {
        g.polygon.push_back({c.x + lx * co - ly * si, c.y + lx * si + ly * co});
      }
      break;
    }
    case ShapeKind::Star: {
      constexpr double kInnerRatio = 0.381966011250105;  // regular pentagram
      for (int i = 0; i < 10; ++i) {
        const double r = (i % 2 == 0) ? radius : radius * kInnerRatio;
        const double t = angle + (-90.0 + 36.0 * i) * std::numbers::pi / 180.0;
        g.polygon.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
      }
      break;
    }
    case ShapeKind::Circle:
      g.semi_major = g.semi_minor = radius;
      break;
    case ShapeKind::Ellipse:
      g.semi_major = radius;
      g.semi_minor = 0.6 * radius;
      break;
  }
  return g;
}

std::uint8_t blend(std::uint8_t bg, std::uint8_t fg, int k, int n) {
  return static_cast<std::uint8_t>((bg * (n - k) + fg * k + n / 2) / n);
}

Rgb blend(Rgb bg, Rgb fg, int k, int n) {
  if (k == 0) return bg;
  if (k == n) return fg;
  return {blend(bg.r, fg.r, k, n), blend(bg.g, fg.g, k, n), blend(bg.b, fg.b, k, n)};
}

// Fills the pixels of `box` by supersampled coverage of `inside`.
template <typename Inside>
void fill_coverage(RgbImage& image, std::array<double, 4> box, Rgb bg, Rgb fg, Inside inside) {
  const int x0 = std::max(0, static_cast<int>(std::floor(box[0])));
  const int y0 = std::max(0, static_cast<int>(std::floor(box[1])));
  const int x1 = std::min(image.width(), static_cast<int>(std::ceil(box[2])));
  const int y1 = std::min(image.height(), static_cast<int>(std::ceil(box[3])));
  constexpr int n = kSupersample * kSupersample;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      int k = 0;
      for (int sy = 0; sy < kSupersample; ++sy) {
        const double py = y + (sy + 0.5) / kSupersample;
        for (int sx = 0; sx < kSupersample; ++sx) {
          const double px = x + (sx + 0.5) / kSupersample;
          if (inside(px, py)) ++k;
        }
      }
      if (k > 0) image.set(x, y, blend(bg, fg, k, n));
    }
  }
}

bool box_inside(const std::array<double, 4>& box, Geometry g) {
  return box[0] >= 0.0 && box[1] >= 0.0 && box[2] <= g.width && box[3] <= g.height;
}

RgbImage render_shape(const ShapeSceneSpec& spec, Geometry geometry, const Palette& palette) {
  if (spec.object_color == spec.background) {
    throw RenderError("stimulus_gen: object_color must differ from background");
  }
  if (!(spec.scale > 0.0)) throw RenderError("stimulus_gen: scale must be positive");
  const auto g = shape_geometry(spec, geometry);
  const auto box = g.bounds();
  if (!box_inside(box, geometry)) {
    throw RenderError("stimulus_gen: containment violated, shape extends outside the canvas");
  }
  const Rgb bg = palette.rgb(spec.background);
  RgbImage image(geometry.width, geometry.height, bg);
  fill_coverage(image, box, bg, palette.rgb(spec.object_color),
                [&](double x, double y) { return g.contains(x, y); });
  return image;
}

RgbImage render_stroop(const StroopSceneSpec& spec, Geometry geometry, const Palette& palette) {
  if (spec.font_color == spec.word) throw RenderError("stimulus_gen: font_color must differ from word");
  if (spec.background == spec.word) throw RenderError("stimulus_gen: background must differ from word");
  if (spec.background == spec.font_color) {
    throw RenderError("stimulus_gen: background must differ from font_color");
  }
  if (spec.font_id < 0 || spec.font_id >= detail::font_count()) {
    throw RenderError("stimulus_gen: font_id out of range");
  }
  if (spec.font_size <= 0) throw RenderError("stimulus_gen: font_size must be positive");
  const auto box = text_box(spec, palette, geometry);
  if (!box_inside(box, geometry)) {
    throw RenderError("stimulus_gen: containment violated, text extends outside the canvas");
  }
  const auto& f = detail::font(spec.font_id);
  const auto text = upper(palette.name(spec.word));
  const double unit = spec.font_size / f.rows;
  const double pitch = f.cols + f.gap;

  const Rgb bg = palette.rgb(spec.background);
  RgbImage image(geometry.width, geometry.height, bg);
  fill_coverage(image, box, bg, palette.rgb(spec.font_color), [&](double x, double y) {
    const double dx = (x - box[0]) / unit;
    const double dy = (y - box[1]) / unit;
    if (dx < 0.0 || dy < 0.0 || dy >= f.rows) return false;
    const auto gi = static_cast<std::size_t>(dx / pitch);
    if (gi >= text.size()) return false;
    const double lx = dx - static_cast<double>(gi) * pitch;
    return lx < f.cols && f.covers(text[gi], lx, dy);
  });
  return image;
}

std::string shape_canonical(const ShapeSceneSpec& s, const std::string& palette_hash, Geometry g) {
  return std::string("shape|") + std::string(to_string(s.shape)) + "|" +
         std::string(canonical_name(s.background)) + "|" +
         std::string(canonical_name(s.object_color)) + "|" + fmt_double(s.rotation_deg) + "|" +
         fmt_double(s.center.x) + "|" + fmt_double(s.center.y) + "|" + fmt_double(s.scale) + "|" +
         std::to_string(s.seed) + "|" + palette_hash + "|" + std::to_string(g.width) + "x" +
         std::to_string(g.height);
}

std::string stroop_canonical(const StroopSceneSpec& s, const std::string& palette_hash, Geometry g) {
  return std::string("stroop|") + std::string(canonical_name(s.word)) + "|" +
         std::string(canonical_name(s.font_color)) + "|" +
         std::string(canonical_name(s.background)) + "|" + std::to_string(s.font_id) + "|" +
         std::to_string(s.font_size) + "|" + fmt_double(s.position.x) + "|" +
         fmt_double(s.position.y) + "|" + std::to_string(s.seed) + "|" + palette_hash + "|" +
         std::to_string(g.width) + "x" + std::to_string(g.height);
}

void check_unique_paths(const DatasetManifest& m) {
  std::unordered_set<std::string> seen;
  for (const auto& r : m.records) {
    if (!seen.insert(r.path).second) {
      throw InputError("stimulus_gen: content path collision for record " + r.id);
    }
  }
}

}  // namespace

std::string_view to_string(ShapeKind kind) { return kShapeNames[static_cast<std::size_t>(kind)]; }

ShapeKind parse_shape(std::string_view name) {
  for (std::size_t i = 0; i < kShapeNames.size(); ++i) {
    if (kShapeNames[i] == name) return kAllShapes[i];
  }
  throw InputError("stimulus_gen: unknown shape '" + std::string(name) + "'");
}

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Shapes:
      return "shapes";
    case DatasetKind::Stroop:
      return "stroop";
    case DatasetKind::External:
      return "external";
  }
  return "?";
}

DatasetKind parse_dataset_kind(std::string_view name) {
  if (name == "shapes") return DatasetKind::Shapes;
  if (name == "stroop") return DatasetKind::Stroop;
  if (name == "external") return DatasetKind::External;
  throw FormatError("stimulus_gen: unknown dataset kind '" + std::string(name) + "'");
}

bool StimulusRecord::has_text() const {
  if (is_stroop()) return true;
  if (const auto* ext = std::get_if<ExternalImage>(&spec)) return ext->has_text;
  return false;
}

void SceneRanges::validate() const {
  if (!(rotation_min <= rotation_max)) throw InputError("stimulus_gen: rotation range is empty");
  if (!(scale_min > 0.0 && scale_min <= scale_max && scale_max <= 1.0)) {
    throw InputError("stimulus_gen: scale range must satisfy 0 < min <= max <= 1");
  }
  if (!(font_size_min > 0 && font_size_min <= font_size_max)) {
    throw InputError("stimulus_gen: font size range is empty");
  }
}

int font_count() { return detail::font_count(); }
std::string_view font_name(int font_id) { return detail::font(font_id).name; }

std::uint64_t shape_dataset_size(std::uint32_t samples_per_combo) {
  return 8ULL * 11ULL * 10ULL * samples_per_combo;
}

std::uint64_t stroop_dataset_size(std::uint32_t samples_per_combo, bool white_background_only) {
  return (white_background_only ? 10ULL * 9ULL : 11ULL * 10ULL * 9ULL) * samples_per_combo;
}

DatasetManifest enumerate_shape_dataset(std::uint32_t samples_per_combo, std::uint64_t master_seed,
                                        const Palette& palette, const GeneratorOptions& options) {
  if (samples_per_combo == 0) throw InputError("stimulus_gen: samples_per_combo must be >= 1");
  options.ranges.validate();
  const auto& ranges = options.ranges;
  const Geometry geom = options.geometry;
  const double side = std::min(geom.width, geom.height);

  DatasetManifest m;
  m.kind = DatasetKind::Shapes;
  m.master_seed = master_seed;
  m.samples_per_combo = samples_per_combo;
  m.geometry = geom;
  m.palette_hash = palette.hash_hex();
  m.records.reserve(shape_dataset_size(samples_per_combo));

  std::uint64_t combo = 0;
  for (auto shape : kAllShapes) {
    for (auto bg : kAllColorIds) {
      for (auto obj : kAllColorIds) {
        if (obj == bg) continue;
        for (std::uint32_t sample = 0; sample < samples_per_combo; ++sample) {
          ShapeSceneSpec spec;
          spec.shape = shape;
          spec.background = bg;
          spec.object_color = obj;
          spec.seed = record_seed(master_seed, combo, sample);
          SplitMixStream rng(spec.seed);
          spec.rotation_deg = rng.uniform(ranges.rotation_min, ranges.rotation_max);
          spec.scale = rng.uniform(ranges.scale_min, ranges.scale_max);
          // One pixel of slack keeps the bounding circle strictly inside.
          const double radius = spec.scale * side / 2.0 + 1.0;
          spec.center.x = rng.uniform(radius / geom.width, 1.0 - radius / geom.width);
          spec.center.y = rng.uniform(radius / geom.height, 1.0 - radius / geom.height);

          StimulusRecord rec;
          rec.id = "shape-" + std::string(to_string(shape)) + "-" +
                   std::string(canonical_name(bg)) + "-" + std::string(canonical_name(obj)) + "-" +
                   std::to_string(sample);
          rec.path = content_path("images", shape_canonical(spec, m.palette_hash, geom));
          rec.spec = spec;
          m.records.push_back(std::move(rec));
        }
        ++combo;
      }
    }
  }
  check_unique_paths(m);
  return m;
}

DatasetManifest enumerate_stroop_dataset(std::uint32_t samples_per_combo, std::uint64_t master_seed,
                                         const Palette& palette, const GeneratorOptions& options) {
  if (samples_per_combo == 0) throw InputError("stimulus_gen: samples_per_combo must be >= 1");
  options.ranges.validate();
  const auto& ranges = options.ranges;
  const Geometry geom = options.geometry;

  DatasetManifest m;
  m.kind = DatasetKind::Stroop;
  m.master_seed = master_seed;
  m.samples_per_combo = samples_per_combo;
  m.white_background = options.white_background_only;
  m.geometry = geom;
  m.palette_hash = palette.hash_hex();
  m.records.reserve(stroop_dataset_size(samples_per_combo, options.white_background_only));

  std::uint64_t combo = 0;  // index within the full 11 x 10 x 9 enumeration
  for (auto word : kAllColorIds) {
    for (auto font : kAllColorIds) {
      if (font == word) continue;
      for (auto bg : kAllColorIds) {
        if (bg == word || bg == font) continue;
        const bool selected = !options.white_background_only || bg == ColorId::White;
        for (std::uint32_t sample = 0; selected && sample < samples_per_combo; ++sample) {
          StroopSceneSpec spec;
          spec.word = word;
          spec.font_color = font;
          spec.background = bg;
          spec.seed = record_seed(master_seed, combo, sample);
          SplitMixStream rng(spec.seed);
          spec.font_id = static_cast<int>(rng.uniform_int(0, detail::font_count() - 1));

          const auto& f = detail::font(spec.font_id);
          const auto letters = palette.name(word).size();
          const double width_units = detail::text_width_units(f, letters);
          const double fit_w = (geom.width - 2.0 * kTextMargin) * f.rows / width_units;
          const double fit_h = geom.height - 2.0 * kTextMargin;
          const int size_hi = std::min<int>(ranges.font_size_max,
                                            static_cast<int>(std::floor(std::min(fit_w, fit_h))));
          if (size_hi < ranges.font_size_min) {
            throw InputError("stimulus_gen: word '" + palette.name(word) +
                             "' cannot fit the canvas at the minimum font size");
          }
          spec.font_size = static_cast<int>(rng.uniform_int(ranges.font_size_min, size_hi));

          const double half_w = width_units * spec.font_size / f.rows / 2.0 + kTextMargin;
          const double half_h = spec.font_size / 2.0 + kTextMargin;
          spec.position.x = rng.uniform(half_w / geom.width, 1.0 - half_w / geom.width);
          spec.position.y = rng.uniform(half_h / geom.height, 1.0 - half_h / geom.height);

          StimulusRecord rec;
          rec.id = "stroop-" + std::string(canonical_name(word)) + "-" +
                   std::string(canonical_name(font)) + "-" + std::string(canonical_name(bg)) +
                   "-" + std::to_string(sample);
          rec.path = content_path("images", stroop_canonical(spec, m.palette_hash, geom));
          rec.spec = spec;
          m.records.push_back(std::move(rec));
        }
        ++combo;
      }
    }
  }
  check_unique_paths(m);
  return m;
}

std::optional<std::string> exclusion_violation(const StimulusRecord& r) {
  if (r.is_shape()) {
    const auto& s = r.shape();
    if (s.object_color == s.background) return "object_color equals background";
  } else if (r.is_stroop()) {
    const auto& s = r.stroop();
    if (s.font_color == s.word) return "font_color equals word";
    if (s.background == s.word) return "background equals word";
    if (s.background == s.font_color) return "background equals font_color";
  }
  return std::nullopt;
}

std::array<double, 4> text_box(const StroopSceneSpec& spec, const Palette& palette, Geometry geometry) {
  const auto& f = detail::font(spec.font_id);
  const double width = detail::text_width_units(f, palette.name(spec.word).size()) *
                       spec.font_size / f.rows;
  const double height = spec.font_size;
  const double cx = spec.position.x * geometry.width;
  const double cy = spec.position.y * geometry.height;
  return {cx - width / 2.0, cy - height / 2.0, cx + width / 2.0, cy + height / 2.0};
}

RgbImage render_scene(const SceneSpec& spec, Geometry geometry, const Palette& palette) {
  return std::visit(
      [&](const auto& s) -> RgbImage {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ShapeSceneSpec>) {
          return render_shape(s, geometry, palette);
        } else {
          return render_stroop(s, geometry, palette);
        }
      },
      spec);
}

DatasetManifest grayscale_manifest(const DatasetManifest& source) {
  if (source.grayscale) return source;
  DatasetManifest m = source;
  m.grayscale = true;
  for (auto& r : m.records) {
    r.id += kGraySuffix;
    if (r.path.rfind("images/", 0) == 0) {
      r.path = "gray/" + r.path.substr(7);
    } else {
      r.path = "gray/" + r.path;
    }
  }
  return m;
}

RgbImage render_record(const DatasetManifest& manifest, const StimulusRecord& record,
                       const Palette& palette) {
  RgbImage image;
  if (record.is_shape()) {
    image = render_scene(record.shape(), manifest.geometry, palette);
  } else if (record.is_stroop()) {
    image = render_scene(record.stroop(), manifest.geometry, palette);
  } else {
    throw RenderError("stimulus_gen: external record " + record.id + " has no scene to render");
  }
  return manifest.grayscale ? grayscale_variant(image) : image;
}

}  // namespace chromaprobe
