#include <doctest.h>

#include <chromaprobe/errors.hpp>
#include <chromaprobe/exchange.hpp>

#include <json.hpp>

#include "oracles.hpp"

using namespace chromaprobe;

TEST_CASE("embedding tables round trip") {
  oracle::TempDir dir("emb");
  EmbeddingTable t;
  t.dim = 3;
  t.keys = {"a", "The text says red"};
  t.values = {1.0f, 0.5f, -0.25f, 0.0f, 3.5f, 1e-7f};
  t.meta["model"] = "RN50";
  write_embeddings(dir / "x", t);
  CHECK(std::filesystem::exists(dir / "x.emb"));
  CHECK(std::filesystem::exists(dir / "x.keys"));

  const auto bytes = oracle::slurp(dir / "x.emb");
  const auto nl = bytes.find('\n');
  const auto header = nlohmann::json::parse(bytes.substr(0, nl));
  CHECK(header["format"] == "chromaprobe-embeddings");
  CHECK(header["encoding"] == "f32 little-endian row-major");
  CHECK(header["count"] == 2);
  CHECK(header["dim"] == 3);
  CHECK(header["model"] == "RN50");
  CHECK(bytes.size() - nl - 1 == 6 * 4);
  // 1.0f little-endian.
  CHECK(static_cast<unsigned char>(bytes[nl + 1 + 3]) == 0x3f);
  CHECK(static_cast<unsigned char>(bytes[nl + 1 + 2]) == 0x80);

  const auto back = read_embeddings(dir / "x");
  CHECK(back.dim == 3);
  CHECK(back.keys == t.keys);
  CHECK(back.values == t.values);
  CHECK(back.meta.at("model") == "RN50");
}

TEST_CASE("activation dumps round trip and join by layer") {
  oracle::TempDir dir("act");
  ActivationDump a;
  a.layer = "layer4";
  a.neurons = 2;
  a.image_refs = {"i0", "i1"};
  a.values = {1, 2, 3, 4};
  ActivationDump b = a;
  b.image_refs = {"i2"};
  b.values = {5, 6};
  ActivationDump c;
  c.layer = "layer1";
  c.neurons = 1;
  c.image_refs = {"i0"};
  c.values = {7};
  write_activation_dump(dir / "a-part1", a);
  write_activation_dump(dir / "a-part2", b);
  write_activation_dump(dir / "c", c);

  const auto one = read_activation_dump(dir / "a-part1");
  CHECK(one.values == a.values);
  CHECK(one.image_refs == a.image_refs);

  const auto all = load_activation_dir(dir.path());
  REQUIRE(all.size() == 2);
  CHECK(all[0].layer == "layer1");
  CHECK(all[1].layer == "layer4");
  CHECK(all[1].image_refs == std::vector<std::string>{"i0", "i1", "i2"});
  // Row-major neurons x images after the column join.
  CHECK(all[1].values == std::vector<float>{1, 2, 5, 3, 4, 6});
}

TEST_CASE("exchange files reject malformed input") {
  oracle::TempDir dir("bad");
  EmbeddingTable t;
  t.dim = 2;
  t.keys = {"a"};
  t.values = {1, 2, 3};
  CHECK_THROWS_AS(write_embeddings(dir / "x", t), InputError);
  CHECK_THROWS_AS(read_embeddings(dir / "missing"), InputError);

  t.values = {1, 2};
  write_embeddings(dir / "x", t);
  auto bytes = oracle::slurp(dir / "x.emb");
  std::ofstream(dir / "x.emb", std::ios::binary) << bytes.substr(0, bytes.size() - 1);
  CHECK_THROWS_AS(read_embeddings(dir / "x"), FormatError);
  std::ofstream(dir / "x.emb", std::ios::binary) << "{\"format\":\"nope\"}\n";
  CHECK_THROWS_AS(read_embeddings(dir / "x"), FormatError);
  std::ofstream(dir / "x.emb", std::ios::binary) << bytes;
  std::ofstream(dir / "x.keys") << "a\nb\n";
  CHECK_THROWS_AS(read_embeddings(dir / "x"), FormatError);
}

TEST_CASE("crop index") {
  oracle::TempDir dir("crops");
  std::filesystem::create_directories(dir / "layer4");
  std::ofstream(dir / "layer4/3.ndjson")
      << "{\"rank\":0,\"image\":\"r1\",\"activation\":2.5,\"box\":[1,2,30,40],\"path\":\"layer4/3/0.png\"}\n"
      << "{\"rank\":1,\"image\":\"r2\",\"activation\":1.0,\"box\":[0,0,10,10],\"path\":\"layer4/3/1.png\"}\n";
  const auto crops = read_crop_index(dir.path(), "layer4", 3);
  REQUIRE(crops.size() == 2);
  CHECK(crops[0].image == "r1");
  CHECK(crops[0].activation == 2.5);
  CHECK(crops[0].box == std::array<int, 4>{1, 2, 30, 40});
  CHECK(crops[0].path == dir / "layer4/3/0.png");
  CHECK(read_crop_index(dir.path(), "layer4", 4).empty());
  std::ofstream(dir / "layer4/5.ndjson") << "{\"rank\":0,\"image\":\"r1\",\"box\":[1,2]}\n";
  CHECK_THROWS_AS(read_crop_index(dir.path(), "layer4", 5), FormatError);
}
