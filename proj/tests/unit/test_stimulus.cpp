#include <doctest.h>

#include <chromaprobe/errors.hpp>
#include <chromaprobe/stimulus.hpp>

#include <map>
#include <set>

#include "oracles.hpp"

using namespace chromaprobe;

namespace {

std::size_t count_with_background(const DatasetManifest& m, ColorId bg) {
  std::size_t n = 0;
  for (const auto& r : m.records) n += r.is_shape() && r.shape().background == bg;
  return n;
}

}  // namespace

TEST_CASE("corpus sizes follow the closed forms") {
  for (std::uint32_t s : {1u, 2u, 5u}) {
    const auto shapes = enumerate_shape_dataset(s, 3);
    const auto stroop = enumerate_stroop_dataset(s, 3);
    GeneratorOptions white;
    white.white_background_only = true;
    const auto stroop_white = enumerate_stroop_dataset(s, 3, Palette::standard(), white);
    CHECK(shapes.records.size() == 8u * 11 * 10 * s);
    CHECK(stroop.records.size() == 11u * 10 * 9 * s);
    CHECK(stroop_white.records.size() == 10u * 9 * s);
    CHECK(shape_dataset_size(s) == shapes.records.size());
    CHECK(stroop_dataset_size(s, false) == stroop.records.size());
    CHECK(stroop_dataset_size(s, true) == stroop_white.records.size());
  }
  CHECK(shape_dataset_size(1) == 880);
  CHECK(stroop_dataset_size(1, false) == 990);
  CHECK(stroop_dataset_size(1, true) == 90);
  // Full-scale corpora.
  CHECK(shape_dataset_size(500) == 440000);
  CHECK(stroop_dataset_size(500, false) == 495000);
  CHECK_THROWS_AS(enumerate_shape_dataset(0, 1), InputError);
  CHECK_THROWS_AS(enumerate_stroop_dataset(0, 1), InputError);
}

TEST_CASE("every record respects the color exclusions") {
  const auto shapes = enumerate_shape_dataset(2, 99);
  const auto stroop = enumerate_stroop_dataset(2, 99);
  std::set<std::string> ids;
  for (const auto& r : shapes.records) {
    CHECK_FALSE(exclusion_violation(r).has_value());
    CHECK(r.shape().object_color != r.shape().background);
    CHECK(ids.insert(r.id).second);
  }
  for (const auto& r : stroop.records) {
    CHECK_FALSE(exclusion_violation(r).has_value());
    const auto& s = r.stroop();
    CHECK(s.word != s.font_color);
    CHECK(s.word != s.background);
    CHECK(s.font_color != s.background);
    CHECK(ids.insert(r.id).second);
  }
  // Each background appears with each of the 10 other object colors, for every shape.
  for (auto bg : kAllColorIds) CHECK(count_with_background(shapes, bg) == 8u * 10 * 2);

  StimulusRecord bad{"x", StroopSceneSpec{ColorId::Red, ColorId::Red, ColorId::Blue}, "p"};
  CHECK(exclusion_violation(bad) == std::optional<std::string>("font_color equals word"));
}

TEST_CASE("scene parameters stay in range and records differ") {
  const auto shapes = enumerate_shape_dataset(2, 4);
  std::set<std::string> paths;
  for (const auto& r : shapes.records) {
    const auto& s = r.shape();
    CHECK(s.rotation_deg >= 0.0);
    CHECK(s.rotation_deg <= 360.0);
    CHECK(s.scale >= 0.15);
    CHECK(s.scale <= 0.6);
    CHECK(paths.insert(r.path).second);
  }
  const auto stroop = enumerate_stroop_dataset(1, 4);
  std::set<int> fonts;
  for (const auto& r : stroop.records) {
    const auto& s = r.stroop();
    CHECK(s.font_size >= 18);
    CHECK(s.font_size <= 64);
    fonts.insert(s.font_id);
    const auto box = text_box(s, Palette::standard(), stroop.geometry);
    CHECK(box[0] >= 0.0);
    CHECK(box[1] >= 0.0);
    CHECK(box[2] <= 224.0);
    CHECK(box[3] <= 224.0);
  }
  CHECK(fonts.size() == static_cast<std::size_t>(font_count()));
  CHECK(font_count() >= 3);
}

TEST_CASE("enumeration is deterministic and seed-sensitive") {
  const auto a = enumerate_stroop_dataset(1, 7);
  const auto b = enumerate_stroop_dataset(1, 7);
  const auto c = enumerate_stroop_dataset(1, 8);
  REQUIRE(a.records.size() == b.records.size());
  bool any_diff = false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].path == b.records[i].path);
    any_diff |= a.records[i].path != c.records[i].path;
  }
  CHECK(any_diff);
}

TEST_CASE("subsetting never changes the other records") {
  GeneratorOptions white;
  white.white_background_only = true;
  const auto full = enumerate_stroop_dataset(2, 21);
  const auto subset = enumerate_stroop_dataset(2, 21, Palette::standard(), white);
  std::map<std::string, std::string> by_id;
  for (const auto& r : full.records) by_id[r.id] = r.path;
  for (const auto& r : subset.records) {
    CHECK(r.stroop().background == ColorId::White);
    REQUIRE(by_id.count(r.id) == 1);
    CHECK(by_id[r.id] == r.path);
  }
}

TEST_CASE("centered square") {
  ShapeSceneSpec s;
  s.shape = ShapeKind::Square;
  s.scale = 0.5;
  s.center = {0.5, 0.5};
  s.rotation_deg = 0.0;
  s.background = ColorId::White;
  s.object_color = ColorId::Red;
  const auto img = render_scene(s);
  CHECK(img.width() == 224);
  CHECK(img.height() == 224);
  CHECK(img.at(112, 112) == Rgb{255, 0, 0});
  CHECK(img.at(0, 0) == Rgb{255, 255, 255});
  CHECK(img.at(223, 223) == Rgb{255, 255, 255});
  CHECK(render_scene(s) == img);
}

TEST_CASE("every shape renders inside the canvas with two-color blends only") {
  for (auto kind : kAllShapes) {
    ShapeSceneSpec s;
    s.shape = kind;
    s.scale = 0.6;
    s.rotation_deg = 33.0;
    s.background = ColorId::Black;
    s.object_color = ColorId::Yellow;
    const auto img = render_scene(s);
    std::size_t object = 0;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const auto c = img.at(x, y);
        CHECK(c.r == c.g);  // black..yellow blends keep r == g and b == 0
        CHECK(c.b == 0);
        object += c == Rgb{255, 255, 0};
      }
    }
    CHECK_MESSAGE(object > 1000, to_string(kind));
    CHECK(img.at(112, 112) == Rgb{255, 255, 0});
    CHECK(img.at(0, 0) == Rgb{0, 0, 0});
  }
}

TEST_CASE("Stroop scene contains only font and background colors") {
  for (int font = 0; font < font_count(); ++font) {
    StroopSceneSpec s;
    s.word = ColorId::Red;
    s.font_color = ColorId::Green;
    s.background = ColorId::Blue;
    s.font_id = font;
    s.font_size = 40;
    const auto img = render_scene(s);
    std::size_t green = 0, blue = 0;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const auto c = img.at(x, y);
        // Pixels lie on the segment between (0,128,0) and (0,0,255).
        CHECK(c.r == 0);
        CHECK(std::abs(c.g / 128.0 + c.b / 255.0 - 1.0) < 2.0 / 128.0);
        CHECK(c != Rgb{255, 0, 0});
        green += c == Rgb{0, 128, 0};
        blue += c == Rgb{0, 0, 255};
      }
    }
    CHECK_MESSAGE(green > 100, font_name(font));
    CHECK(blue > 30000);
  }
}

TEST_CASE("render rejects impossible scenes") {
  ShapeSceneSpec s;
  s.object_color = ColorId::Red;
  s.background = ColorId::Red;
  CHECK_THROWS_AS(render_scene(s), RenderError);
  s.background = ColorId::Blue;
  s.center = {0.02, 0.5};
  CHECK_THROWS_AS(render_scene(s), RenderError);

  StroopSceneSpec t;
  t.word = ColorId::Red;
  t.font_color = ColorId::Red;
  try {
    render_scene(t);
    FAIL("expected RenderError");
  } catch (const RenderError& e) {
    CHECK(std::string(e.what()).find("font_color") != std::string::npos);
  }
  t.font_color = ColorId::Green;
  t.font_size = 200;
  CHECK_THROWS_AS(render_scene(t), RenderError);
  t.font_size = 30;
  t.font_id = font_count();
  CHECK_THROWS_AS(render_scene(t), RenderError);
}

TEST_CASE("grayscale companion corpus") {
  const auto m = enumerate_stroop_dataset(1, 3);
  const auto g = grayscale_manifest(m);
  REQUIRE(g.records.size() == m.records.size());
  CHECK(g.grayscale);
  CHECK(g.records[0].id == m.records[0].id + ":gray");
  CHECK(g.records[0].path.rfind("gray/", 0) == 0);
  const auto color = render_record(m, m.records[5]);
  const auto gray = render_record(g, g.records[5]);
  CHECK(gray == grayscale_variant(color));
  CHECK(grayscale_manifest(g).records[0].id == g.records[0].id);
}

TEST_CASE("range validation") {
  SceneRanges r;
  r.scale_min = 0.7;
  r.scale_max = 0.6;
  CHECK_THROWS_AS(r.validate(), InputError);
  GeneratorOptions o;
  o.ranges.font_size_min = 70;
  CHECK_THROWS_AS(enumerate_stroop_dataset(1, 1, Palette::standard(), o), InputError);
  CHECK(parse_shape("star") == ShapeKind::Star);
  CHECK_THROWS_AS(parse_shape("blob"), InputError);
}
