#include <doctest.h>

#include <chromaprobe/activation_lab.hpp>
#include <chromaprobe/errors.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace chromaprobe;

namespace {

ActivationMatrix matrix_of(std::size_t neurons, std::size_t images, std::vector<double> values) {
  std::vector<std::string> refs;
  for (std::size_t i = 0; i < images; ++i) refs.push_back("img" + std::to_string(i));
  return ActivationMatrix("L", neurons, std::move(refs), std::move(values));
}

TopKSet topk_of(std::vector<std::pair<std::size_t, double>> entries) {
  TopKSet t;
  for (auto [i, a] : entries) t.entries.push_back({i, a, std::nullopt});
  return t;
}

LabelFrequencies only(ColorId c) {
  LabelFrequencies f{};
  f[index_of(c)] = 1.0;
  return f;
}

NeuronProfile profile(std::string layer, NeuronType type) {
  NeuronProfile p;
  p.layer = std::move(layer);
  p.type = type;
  return p;
}

}  // namespace

TEST_CASE("top_k examples") {
  const auto m = matrix_of(1, 3, {0.2, 0.9, 0.1});
  const auto one = top_k(m, 0, 1);
  REQUIRE(one.entries.size() == 1);
  CHECK(one.entries[0].image == 1);
  CHECK_FALSE(one.truncated);

  const auto all = top_k(m, 0, 3);
  REQUIRE(all.entries.size() == 3);
  CHECK(all.entries[0].image == 1);
  CHECK(all.entries[1].image == 0);
  CHECK(all.entries[2].image == 2);

  const auto more = top_k(m, 0, 5);
  CHECK(more.truncated);
  CHECK(more.entries.size() == 3);

  const std::vector<std::size_t> cols{0, 2};
  const auto restricted = top_k(m, 0, 1, cols);
  CHECK(restricted.entries[0].image == 0);

  CHECK_THROWS_AS(top_k(m, 1, 1), InputError);
  CHECK_THROWS_AS(top_k(m, 0, 0), InputError);
}

TEST_CASE("top_k equals the full-sort prefix") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t neurons = 1 + trial % 64;
    const std::size_t images = 50 + 25 * trial;
    std::vector<double> values(neurons * images);
    // Coarse values in half the trials to force ties.
    for (auto& v : values) v = trial % 2 ? coarse(rng) / 7.0 : u(rng);
    const auto m = matrix_of(neurons, images, values);
    for (std::size_t n = 0; n < neurons; n += 7) {
      const std::vector<double> row(values.begin() + n * images, values.begin() + (n + 1) * images);
      std::vector<std::size_t> cols(images);
      for (std::size_t i = 0; i < images; ++i) cols[i] = i;
      for (std::size_t k : {std::size_t{1}, std::size_t{20}, images}) {
        const auto want = oracle::top_columns(row, cols, k);
        const auto got = top_k(m, n, k);
        REQUIRE(got.entries.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
          CHECK(got.entries[i].image == want[i]);
          CHECK(got.entries[i].activation == row[want[i]]);
        }
      }
    }
  }
}

TEST_CASE("color selectivity index") {
  const std::vector<double> color{4.0, 6.0};
  const std::vector<double> gray{1.0, 3.0};
  CHECK(*color_selectivity_index(color, gray) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(*color_selectivity_index(color, color) == 0.0);
  const std::vector<double> zero{0.0, 0.0};
  CHECK(*color_selectivity_index(color, zero) == 1.0);
  CHECK_FALSE(color_selectivity_index(zero, gray).has_value());
  const std::vector<double> louder{8.0, 9.0};
  CHECK(*color_selectivity_index(color, louder) == 0.0);
  const std::vector<double> short_gray{1.0};
  CHECK_THROWS_AS(color_selectivity_index(color, short_gray), InputError);
}

TEST_CASE("color-label selectivity examples") {
  std::vector<std::optional<ColorId>> labels{ColorId::Blue, ColorId::Red, std::nullopt};
  const auto f = color_label_selectivity(topk_of({{0, 3.0}, {1, 1.0}}), labels);
  REQUIRE(f.has_value());
  CHECK((*f)[index_of(ColorId::Blue)] == 0.75);
  CHECK((*f)[index_of(ColorId::Red)] == 0.25);

  std::vector<std::optional<ColorId>> blue(3, ColorId::Blue);
  const auto all_blue = color_label_selectivity(topk_of({{0, 0.5}, {1, 0.2}, {2, 0.1}}), blue);
  for (auto id : kAllColorIds) CHECK((*all_blue)[index_of(id)] == (id == ColorId::Blue ? 1.0 : 0.0));

  // Unlabeled images still count in the denominator.
  const auto partial = color_label_selectivity(topk_of({{0, 1.0}, {2, 1.0}}), labels);
  CHECK((*partial)[index_of(ColorId::Blue)] == 0.5);

  CHECK_FALSE(color_label_selectivity(topk_of({{0, 0.0}}), labels).has_value());
  CHECK_THROWS_AS(color_label_selectivity(topk_of({{5, 1.0}}), labels), InputError);

  std::vector<std::optional<ColorId>> font{ColorId::Blue, ColorId::Red};
  std::vector<std::optional<ColorId>> bg{ColorId::Green, ColorId::Blue};
  const auto pooled = pooled_label_selectivity(topk_of({{0, 3.0}, {1, 1.0}}), font, bg);
  CHECK((*pooled)[index_of(ColorId::Blue)] == doctest::Approx(0.5));
  CHECK((*pooled)[index_of(ColorId::Green)] == doctest::Approx(0.375));
  CHECK((*pooled)[index_of(ColorId::Red)] == doctest::Approx(0.125));
}

TEST_CASE("neuron features") {
  const RgbImage red(4, 4, {255, 0, 0});
  const RgbImage blue(4, 4, {0, 0, 255});
  const std::vector<RgbImage> crops{red, blue};
  const auto f = neuron_feature(topk_of({{0, 3.0}, {1, 1.0}}), crops);
  CHECK(f.at(2, 2) == Rgb{191, 0, 64});

  const std::vector<RgbImage> single{blue};
  CHECK(neuron_feature(topk_of({{0, 0.3}}), single) == blue);
  const std::vector<RgbImage> same{red, red};
  CHECK(neuron_feature(topk_of({{0, 0.9}, {1, 0.01}}), same) == red);

  CHECK_THROWS_AS(neuron_feature(TopKSet{}, {}), InputError);
  const std::vector<RgbImage> mixed{red, RgbImage(2, 2)};
  CHECK_THROWS_AS(neuron_feature(topk_of({{0, 1.0}, {1, 1.0}}), mixed), InputError);
}

TEST_CASE("dominant hue") {
  CHECK(*dominant_hue(RgbImage(8, 8, {255, 0, 0})) == doctest::Approx(0.0));
  CHECK_FALSE(dominant_hue(RgbImage(8, 8, {90, 90, 90})).has_value());

  RgbImage half(8, 8, {255, 0, 0});
  for (int y = 0; y < 8; ++y) {
    for (int x = 4; x < 8; ++x) half.set(x, y, {255, 0, 255});
  }
  CHECK(*dominant_hue(half) == doctest::Approx(330.0));

  // A faint tint stays below the default saturation cutoff.
  CHECK_FALSE(dominant_hue(RgbImage(8, 8, {200, 190, 190})).has_value());
}

TEST_CASE("hue histograms") {
  std::vector<double> fives(20, 5.0);
  const auto h = hue_histogram(fives, 36);
  CHECK(h.mass[0] == 1.0);
  CHECK(h.samples == 20);

  const std::vector<double> twelve{0, 9.99, 10, 45, 90, 135, 180, 225, 270, 315, 359.9, 720.5};
  const auto g = hue_histogram(twelve, 36);
  std::vector<double> want(36, 0.0);
  for (double v : twelve) want[static_cast<std::size_t>(std::fmod(v, 360.0) / 10.0)] += 1.0 / 12.0;
  for (std::size_t i = 0; i < 36; ++i) CHECK(g.mass[i] == doctest::Approx(want[i]));

  std::vector<double> uniform;
  for (int i = 0; i < 3600; ++i) uniform.push_back(i * 0.1);
  const auto u = hue_histogram(uniform, 36);
  double total = 0;
  for (double m : u.mass) {
    CHECK(m == doctest::Approx(1.0 / 36));
    total += m;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  CHECK(hue_histogram(std::vector<double>{}, 36).empty());
  CHECK_THROWS_AS(hue_histogram(fives, 0), InputError);

  std::vector<NeuronProfile> ps(3);
  ps[0].color_selectivity = 0.5;
  ps[0].dominant_hue = 100.0;
  ps[1].color_selectivity = 0.05;
  ps[1].dominant_hue = 200.0;
  ps[2].color_selectivity = 0.9;
  const auto hp = hue_histogram(ps, 36, 0.1);
  CHECK(hp.samples == 1);
  CHECK(hp.mass[10] == 1.0);
}

TEST_CASE("pearson") {
  const std::vector<double> a{0.1, 0.4, 0.2, 0.3};
  CHECK(*pearson(a, a) == 1.0);
  std::vector<double> b;
  for (double x : a) b.push_back(5.0 - 2.0 * x);
  CHECK(std::abs(*pearson(a, b) + 1.0) <= 1e-12);
  const std::vector<double> flat{1, 1, 1, 1};
  CHECK_FALSE(pearson(a, flat).has_value());
  CHECK_THROWS_AS(pearson(a, std::vector<double>{1.0}), InputError);

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(36), y(36);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    CHECK(std::abs(*pearson(x, y) - oracle::pearson(x, y)) < 1e-12);
  }
}

TEST_CASE("classifier decision list") {
  ClassifierInputs in;
  in.reference_max = 10.0;
  in.stroop_max = 4.0;
  in.word = only(ColorId::Green);
  in.font = only(ColorId::Green);
  in.background = only(ColorId::Green);
  CHECK(classify_neuron(in).kind == NeuronKind::NotActivated);

  in.stroop_max = 5.0;  // exactly half reaches the threshold
  const auto mm = classify_neuron(in);
  CHECK(mm.kind == NeuronKind::ColorMultimodal);
  CHECK(mm.term == ColorId::Green);

  in.font = only(ColorId::Red);
  in.background = only(ColorId::Blue);
  CHECK(classify_neuron(in) == NeuronType{NeuronKind::ColorWord, ColorId::Green});

  in.word = LabelFrequencies{};
  in.background = only(ColorId::Gray);
  in.font = LabelFrequencies{};
  const auto c = classify_neuron(in);
  CHECK(c == NeuronType{NeuronKind::Color, ColorId::Gray});
  CHECK(category_of(c) == TypeCategory::ColorAchromatic);
  CHECK(to_string(c) == "Color(achromatic, gray)");

  in.background = LabelFrequencies{};
  in.any_word_max = 6.0;
  CHECK(classify_neuron(in).kind == NeuronKind::AnyWord);
  in.any_word_max = 4.9;
  CHECK(classify_neuron(in).kind == NeuronKind::Unclassified);

  in.stroop_max = 0.0;
  in.reference_max = 0.0;
  CHECK(classify_neuron(in).kind == NeuronKind::NotActivated);

  in.stroop_max = 9.0;
  in.font.reset();
  in.background.reset();
  try {
    classify_neuron(in);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("font, background") != std::string::npos);
  }
  in.font = LabelFrequencies{};
  in.background = LabelFrequencies{};
  CHECK_THROWS_AS(classify_neuron(in, {0.0, 0.5}), InputError);
}

TEST_CASE("layer distributions") {
  std::vector<NeuronProfile> ps;
  for (int i = 0; i < 4; ++i) ps.push_back(profile("only", {NeuronKind::NotActivated, std::nullopt}));
  auto d = layer_type_distribution(ps);
  REQUIRE(d.size() == 1);
  CHECK(d[0].ratio(TypeCategory::NotActivated) == 1.0);

  // Three layers, counted by hand.
  ps = {profile("conv1", {NeuronKind::Color, ColorId::Red}),
        profile("conv1", {NeuronKind::Color, ColorId::White}),
        profile("conv1", {NeuronKind::NotActivated, std::nullopt}),
        profile("conv2", {NeuronKind::AnyWord, std::nullopt}),
        profile("conv2", {NeuronKind::ColorWord, ColorId::Blue}),
        profile("conv3", {NeuronKind::ColorMultimodal, ColorId::Green}),
        profile("conv3", {NeuronKind::Unclassified, std::nullopt}),
        profile("conv3", {NeuronKind::ColorWord, ColorId::Red}),
        profile("conv3", {NeuronKind::ColorWord, ColorId::Pink})};
  d = layer_type_distribution(ps);
  REQUIRE(d.size() == 3);
  CHECK(d[0].layer == "conv1");
  CHECK(d[0].total == 3);
  CHECK(d[0].counts[static_cast<std::size_t>(TypeCategory::ColorChromatic)] == 1);
  CHECK(d[0].counts[static_cast<std::size_t>(TypeCategory::ColorAchromatic)] == 1);
  CHECK(d[1].counts[static_cast<std::size_t>(TypeCategory::AnyWord)] == 1);
  CHECK(d[2].counts[static_cast<std::size_t>(TypeCategory::ColorWord)] == 2);
  CHECK(d[2].ratio(TypeCategory::ColorMultimodal) == 0.25);
  for (const auto& l : d) {
    std::uint64_t s = 0;
    for (auto n : l.counts) s += n;
    CHECK(s == l.total);
  }
}

TEST_CASE("activation matrices reject bad values") {
  CHECK_THROWS_AS(matrix_of(2, 2, {1, 2, 3}), InputError);
  CHECK_THROWS_AS(matrix_of(1, 2, {1, -0.5}), InputError);
  CHECK_THROWS_AS(matrix_of(1, 1, {std::nan("")}), InputError);
}

TEST_CASE("analyze_layer on a constructed 50-image fixture") {
  // 50 Stroop columns and their 50 gray twins, plus 10 reference columns.
  const std::size_t stroop_n = 50;
  std::vector<std::string> refs;
  std::vector<std::string> stroop_ids;
  std::vector<std::optional<ColorId>> word, font, bg;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> c(0, 10);
  for (std::size_t i = 0; i < stroop_n; ++i) {
    stroop_ids.push_back("s" + std::to_string(i));
    refs.push_back(stroop_ids.back());
    const auto w = static_cast<ColorId>(c(rng));
    auto f = static_cast<ColorId>(c(rng));
    while (f == w) f = static_cast<ColorId>(c(rng));
    auto b = static_cast<ColorId>(c(rng));
    while (b == w || b == f) b = static_cast<ColorId>(c(rng));
    word.push_back(w);
    font.push_back(f);
    bg.push_back(b);
  }
  std::vector<std::string> reference_ids;
  for (int i = 0; i < 10; ++i) {
    reference_ids.push_back("r" + std::to_string(i));
    refs.push_back(reference_ids.back());
    refs.push_back(reference_ids.back() + ":gray");
  }
  const std::size_t images = refs.size();
  const std::size_t neurons = 12;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> values(neurons * images);
  for (auto& v : values) v = u(rng);
  // Neuron 0 fires only for the word "red"; neuron 1 is silent on Stroop images.
  for (std::size_t i = 0; i < stroop_n; ++i) {
    values[0 * images + i] = word[i] == ColorId::Red ? 5.0 : 0.01;
    values[1 * images + i] = 0.0;
  }
  const ActivationMatrix m("L", neurons, refs, values);
  const std::vector<std::string> text_ids{"r0", "r1"};
  const auto corpus = build_corpus(m, stroop_ids, reference_ids, text_ids, word, font, bg, ":gray");
  CHECK(corpus.stroop_columns.size() == stroop_n);
  CHECK(corpus.reference_columns.size() == 10);
  CHECK(corpus.text_reference_columns.size() == 2);

  AnalysisOptions opt;
  opt.top_k = 10;
  for (unsigned jobs : {1u, 4u}) {
    opt.jobs = jobs;
    const auto ps = analyze_layer(m, corpus, opt);
    REQUIRE(ps.size() == neurons);
    for (std::size_t n = 0; n < neurons; ++n) {
      const std::vector<double> row(values.begin() + n * images, values.begin() + (n + 1) * images);
      std::vector<int> wl(images, -1), fl(images, -1), bl(images, -1);
      for (std::size_t i = 0; i < stroop_n; ++i) {
        wl[i] = static_cast<int>(index_of(*word[i]));
        fl[i] = static_cast<int>(index_of(*font[i]));
        bl[i] = static_cast<int>(index_of(*bg[i]));
      }
      std::vector<std::size_t> cols(corpus.stroop_columns.begin(), corpus.stroop_columns.end());
      const auto top = oracle::top_columns(row, cols, 10);
      oracle::Profile op;
      const auto fw = oracle::eq1(row, top, wl);
      const auto ff = oracle::eq1(row, top, fl);
      const auto fb = oracle::eq1(row, top, bl);
      double smax = 0, rmax = 0, amax = 0;
      for (auto col : corpus.stroop_columns) smax = std::max(smax, row[col]);
      for (auto col : corpus.reference_columns) rmax = std::max(rmax, row[col]);
      for (auto col : corpus.text_reference_columns) amax = std::max(amax, row[col]);
      CHECK(ps[n].stroop_max == smax);
      CHECK(ps[n].reference_max == rmax);
      CHECK(ps[n].any_word_max == amax);
      if (!fw) {
        CHECK_FALSE(ps[n].f_word.has_value());
        continue;
      }
      op.word = *fw;
      op.font = *ff;
      op.background = *fb;
      op.stroop_max = smax;
      op.reference_max = rmax;
      op.any_word_max = amax;
      for (int k = 0; k < 11; ++k) CHECK(std::abs((*ps[n].f_word)[k] - op.word[k]) < 1e-12);
      const auto v = oracle::classify(op, 0.5, 0.5);
      CHECK(static_cast<int>(ps[n].type.kind) == v.kind);
      CHECK(ps[n].color_selectivity.has_value());
    }
    CHECK(ps[0].type == NeuronType{NeuronKind::ColorWord, ColorId::Red});
    CHECK(ps[1].type.kind == NeuronKind::NotActivated);
  }
}
