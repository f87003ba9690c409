#include "chromaprobe/exchange.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <span>
#include <sstream>

#include <json.hpp>

#include "chromaprobe/errors.hpp"
#include "text_util.hpp"

namespace chromaprobe {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kEmbeddingFormat = "chromaprobe-embeddings";
constexpr std::string_view kActivationFormat = "chromaprobe-activations";

fs::path with_ext(const fs::path& stem, std::string_view ext) {
  return fs::path(stem.string() + std::string(ext));
}

void atomic_write(const fs::path& path, const std::string& bytes) {
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("exchange: cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("exchange: write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("exchange: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void append_f32le(std::string& out, std::span<const float> values) {
  const auto start = out.size();
  out.resize(start + values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) {
      out[start + i * 4 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
}

std::vector<float> decode_f32le(std::string_view bytes, std::size_t count, const fs::path& path) {
  if (bytes.size() != count * 4) {
    throw FormatError("exchange: " + path.string() + ": expected " + std::to_string(count * 4) +
                      " payload bytes, found " + std::to_string(bytes.size()));
  }
  std::vector<float> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + static_cast<std::size_t>(b)]))
              << (8 * b);
    }
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

std::string lines_file(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (l.find('\n') != std::string::npos) {
      throw InputError("exchange: keys must not contain newlines");
    }
    out += l;
    out += '\n';
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  const auto text = slurp(path);
  std::vector<std::string> out;
  for (auto line : detail::split_lines(text)) out.emplace_back(line);
  return out;
}

// Splits "<json header>\n<payload>".
std::pair<json, std::string_view> split_header(const std::string& bytes, const fs::path& path,
                                               std::string_view format) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw FormatError("exchange: " + path.string() + ": missing header line");
  json header;
  try {
    header = json::parse(std::string_view(bytes).substr(0, nl));
  } catch (const json::exception& e) {
    throw FormatError("exchange: " + path.string() + ": bad header: " + e.what());
  }
  if (!header.is_object() || header.value("format", "") != format) {
    throw FormatError("exchange: " + path.string() + ": header format is not \"" +
                      std::string(format) + "\"");
  }
  if (header.value("encoding", "") != kF32Encoding) {
    throw FormatError("exchange: " + path.string() + ": unsupported encoding");
  }
  return {header, std::string_view(bytes).substr(nl + 1)};
}

std::map<std::string, std::string> extra_fields(const json& header,
                                                std::initializer_list<std::string_view> known) {
  std::map<std::string, std::string> meta;
  for (auto it = header.begin(); it != header.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) != known.end()) continue;
    meta[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
  }
  return meta;
}

std::size_t count_field(const json& header, const char* key, const fs::path& path) {
  if (!header.contains(key) || !header[key].is_number_unsigned()) {
    throw FormatError("exchange: " + path.string() + ": header field '" + key +
                      "' must be a non-negative integer");
  }
  return header[key].get<std::size_t>();
}

}  // namespace

void write_embeddings(const fs::path& stem, const EmbeddingTable& table) {
  if (table.values.size() != table.keys.size() * table.dim) {
    throw InputError("exchange: embedding table shape does not match its values");
  }
  json header(table.meta);
  header["format"] = kEmbeddingFormat;
  header["version"] = 1;
  header["count"] = table.keys.size();
  header["dim"] = table.dim;
  header["encoding"] = kF32Encoding;
  std::string bytes = header.dump();
  bytes += '\n';
  append_f32le(bytes, table.values);
  atomic_write(with_ext(stem, ".keys"), lines_file(table.keys));
  atomic_write(with_ext(stem, ".emb"), bytes);
}

EmbeddingTable read_embeddings(const fs::path& stem) {
  const auto path = with_ext(stem, ".emb");
  const auto bytes = slurp(path);
  auto [header, payload] = split_header(bytes, path, kEmbeddingFormat);
  EmbeddingTable t;
  const auto count = count_field(header, "count", path);
  t.dim = count_field(header, "dim", path);
  t.values = decode_f32le(payload, count * t.dim, path);
  t.keys = read_lines(with_ext(stem, ".keys"));
  if (t.keys.size() != count) {
    throw FormatError("exchange: " + with_ext(stem, ".keys").string() + " lists " +
                      std::to_string(t.keys.size()) + " keys but header declares " +
                      std::to_string(count));
  }
  t.meta = extra_fields(header, {"format", "version", "count", "dim", "encoding"});
  return t;
}

void write_activation_dump(const fs::path& stem, const ActivationDump& dump) {
  if (dump.values.size() != dump.neurons * dump.images()) {
    throw InputError("exchange: activation dump shape does not match its values");
  }
  json header(dump.meta);
  header["format"] = kActivationFormat;
  header["version"] = 1;
  header["layer"] = dump.layer;
  header["neurons"] = dump.neurons;
  header["images"] = dump.images();
  header["encoding"] = kF32Encoding;
  std::string bytes = header.dump();
  bytes += '\n';
  append_f32le(bytes, dump.values);
  atomic_write(with_ext(stem, ".images"), lines_file(dump.image_refs));
  atomic_write(with_ext(stem, ".act"), bytes);
}

ActivationDump read_activation_dump(const fs::path& stem) {
  const auto path = with_ext(stem, ".act");
  const auto bytes = slurp(path);
  auto [header, payload] = split_header(bytes, path, kActivationFormat);
  ActivationDump d;
  if (!header.contains("layer") || !header["layer"].is_string()) {
    throw FormatError("exchange: " + path.string() + ": header lacks a layer name");
  }
  d.layer = header["layer"].get<std::string>();
  d.neurons = count_field(header, "neurons", path);
  const auto images = count_field(header, "images", path);
  d.values = decode_f32le(payload, d.neurons * images, path);
  d.image_refs = read_lines(with_ext(stem, ".images"));
  if (d.image_refs.size() != images) {
    throw FormatError("exchange: " + with_ext(stem, ".images").string() + " lists " +
                      std::to_string(d.image_refs.size()) + " images but header declares " +
                      std::to_string(images));
  }
  d.meta = extra_fields(header, {"format", "version", "layer", "neurons", "images", "encoding"});
  return d;
}

std::vector<ActivationDump> load_activation_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("exchange: " + dir.string() + " is not a directory");
  std::vector<fs::path> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".act") {
      auto stem = entry.path();
      stem.replace_extension();
      stems.push_back(stem);
    }
  }
  std::sort(stems.begin(), stems.end());

  std::map<std::string, ActivationDump> by_layer;
  for (const auto& stem : stems) {
    auto d = read_activation_dump(stem);
    auto it = by_layer.find(d.layer);
    if (it == by_layer.end()) {
      by_layer.emplace(d.layer, std::move(d));
      continue;
    }
    auto& acc = it->second;
    if (acc.neurons != d.neurons) {
      throw FormatError("exchange: layer " + d.layer + " has inconsistent neuron counts across dumps");
    }
    const auto old_images = acc.images();
    const auto new_images = old_images + d.images();
    std::vector<float> merged(acc.neurons * new_images);
    for (std::size_t n = 0; n < acc.neurons; ++n) {
      std::copy_n(acc.values.begin() + static_cast<std::ptrdiff_t>(n * old_images), old_images,
                  merged.begin() + static_cast<std::ptrdiff_t>(n * new_images));
      std::copy_n(d.values.begin() + static_cast<std::ptrdiff_t>(n * d.images()), d.images(),
                  merged.begin() + static_cast<std::ptrdiff_t>(n * new_images + old_images));
    }
    acc.values = std::move(merged);
    acc.image_refs.insert(acc.image_refs.end(), d.image_refs.begin(), d.image_refs.end());
    for (auto& [k, v] : d.meta) acc.meta.try_emplace(k, v);
  }

  std::vector<ActivationDump> out;
  for (auto& [_, d] : by_layer) out.push_back(std::move(d));
  return out;
}

std::vector<CropEntry> read_crop_index(const fs::path& dir, const std::string& layer,
                                       std::size_t neuron) {
  const auto index = dir / layer / (std::to_string(neuron) + ".ndjson");
  if (!fs::exists(index)) return {};
  const auto text = slurp(index);
  std::vector<CropEntry> out;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      CropEntry e;
      e.rank = j.at("rank").get<std::size_t>();
      e.image = j.at("image").get<std::string>();
      e.activation = j.at("activation").get<double>();
      const auto box = j.at("box").get<std::vector<int>>();
      if (box.size() != 4) throw FormatError("box needs four integers");
      std::copy(box.begin(), box.end(), e.box.begin());
      e.path = dir / j.at("path").get<std::string>();
      out.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw FormatError("exchange: " + index.string() + " line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  std::sort(out.begin(), out.end(), [](const CropEntry& a, const CropEntry& b) { return a.rank < b.rank; });
  return out;
}

}  // namespace chromaprobe
