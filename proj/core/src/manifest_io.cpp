#include "chromaprobe/manifest_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chromaprobe/errors.hpp"
#include "text_util.hpp"

namespace chromaprobe {

using nlohmann::json;

namespace {

constexpr std::string_view kFormat = "chromaprobe-manifest";

json record_json(const StimulusRecord& r, const Palette& palette) {
  json j;
  j["id"] = r.id;
  if (r.is_shape()) {
    const auto& s = r.shape();
    j["kind"] = "shape";
    j["shape"] = std::string(to_string(s.shape));
    j["background"] = palette.name(s.background);
    j["object_color"] = palette.name(s.object_color);
    j["rotation"] = s.rotation_deg;
    j["center"] = {s.center.x, s.center.y};
    j["scale"] = s.scale;
    j["seed"] = s.seed;
  } else if (r.is_stroop()) {
    const auto& s = r.stroop();
    j["kind"] = "stroop";
    j["word"] = palette.name(s.word);
    j["font_color"] = palette.name(s.font_color);
    j["background"] = palette.name(s.background);
    j["font_id"] = s.font_id;
    j["font_size"] = s.font_size;
    j["position"] = {s.position.x, s.position.y};
    j["seed"] = s.seed;
  } else {
    j["kind"] = "external";
    j["has_text"] = std::get<ExternalImage>(r.spec).has_text;
  }
  j["path"] = r.path;
  return j;
}

template <typename T>
T field(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) {
    throw FormatError("manifest line " + std::to_string(line) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError("manifest line " + std::to_string(line) + ": field '" + key +
                      "' has the wrong type");
  }
}

Point point_field(const json& j, const char* key, std::size_t line) {
  const auto v = field<std::vector<double>>(j, key, line);
  if (v.size() != 2) {
    throw FormatError("manifest line " + std::to_string(line) + ": '" + key + "' needs two numbers");
  }
  return {v[0], v[1]};
}

StimulusRecord parse_record(const json& j, const Palette& palette, std::size_t line) {
  StimulusRecord r;
  r.id = field<std::string>(j, "id", line);
  r.path = field<std::string>(j, "path", line);
  const auto kind = field<std::string>(j, "kind", line);
  auto color = [&](const char* key) {
    const auto name = field<std::string>(j, key, line);
    if (auto id = palette.find(name)) return *id;
    throw FormatError("manifest line " + std::to_string(line) + ": unknown color '" + name + "'");
  };
  if (kind == "shape") {
    ShapeSceneSpec s;
    try {
      s.shape = parse_shape(field<std::string>(j, "shape", line));
    } catch (const InputError& e) {
      throw FormatError("manifest line " + std::to_string(line) + ": " + e.what());
    }
    s.background = color("background");
    s.object_color = color("object_color");
    s.rotation_deg = field<double>(j, "rotation", line);
    s.center = point_field(j, "center", line);
    s.scale = field<double>(j, "scale", line);
    s.seed = field<std::uint64_t>(j, "seed", line);
    r.spec = s;
  } else if (kind == "stroop") {
    StroopSceneSpec s;
    s.word = color("word");
    s.font_color = color("font_color");
    s.background = color("background");
    s.font_id = field<int>(j, "font_id", line);
    s.font_size = field<int>(j, "font_size", line);
    s.position = point_field(j, "position", line);
    s.seed = field<std::uint64_t>(j, "seed", line);
    r.spec = s;
  } else if (kind == "external") {
    r.spec = ExternalImage{j.value("has_text", false)};
  } else {
    throw FormatError("manifest line " + std::to_string(line) + ": unknown record kind '" + kind + "'");
  }
  if (auto bad = exclusion_violation(r)) {
    throw FormatError("manifest line " + std::to_string(line) + ": record " + r.id + ": " + *bad);
  }
  return r;
}

}  // namespace

std::string manifest_to_ndjson(const DatasetManifest& m, const Palette& palette,
                               const Provenance& provenance) {
  json header;
  header["format"] = kFormat;
  header["version"] = 1;
  header["kind"] = std::string(to_string(m.kind));
  header["master_seed"] = m.master_seed;
  header["samples_per_combo"] = m.samples_per_combo;
  header["white_background"] = m.white_background;
  header["grayscale"] = m.grayscale;
  header["geometry"] = {{"width", m.geometry.width}, {"height", m.geometry.height}};
  header["palette_hash"] = m.palette_hash;
  header["generator_version"] = m.generator_version;
  header["record_count"] = m.records.size();
  if (!provenance.empty()) {
    json p = json::object();
    for (const auto& [k, v] : provenance) p[k] = v;
    header["provenance"] = p;
  }

  std::string out = header.dump();
  out += '\n';
  for (const auto& r : m.records) {
    out += record_json(r, palette).dump();
    out += '\n';
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest,
                    const Palette& palette, const Provenance& provenance) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("manifest: cannot write " + path.string());
  out << manifest_to_ndjson(manifest, palette, provenance);
  if (!out) throw InputError("manifest: write to " + path.string() + " failed");
}

DatasetManifest parse_manifest(std::string_view text, const Palette& palette) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw FormatError("manifest: empty file");

  json header;
  try {
    header = json::parse(lines[0]);
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: header is not a JSON object: ") + e.what());
  }
  if (!header.is_object() || header.value("format", "") != kFormat) {
    throw FormatError("manifest: header lacks format \"chromaprobe-manifest\"");
  }

  DatasetManifest m;
  m.kind = parse_dataset_kind(field<std::string>(header, "kind", 1));
  m.master_seed = header.value("master_seed", std::uint64_t{0});
  m.samples_per_combo = header.value("samples_per_combo", std::uint32_t{0});
  m.white_background = header.value("white_background", false);
  m.grayscale = header.value("grayscale", false);
  if (header.contains("geometry")) {
    m.geometry.width = header["geometry"].value("width", 224);
    m.geometry.height = header["geometry"].value("height", 224);
  }
  m.palette_hash = header.value("palette_hash", "");
  m.generator_version = header.value("generator_version", "");
  if (!m.palette_hash.empty() && m.palette_hash != palette.hash_hex()) {
    throw FormatError("manifest: palette hash " + m.palette_hash +
                      " does not match the active palette " + palette.hash_hex());
  }

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw FormatError("manifest line " + std::to_string(i + 1) + ": " + e.what());
    }
    m.records.push_back(parse_record(j, palette, i + 1));
  }
  if (header.contains("record_count") &&
      header["record_count"].get<std::size_t>() != m.records.size()) {
    throw FormatError("manifest: header declares " +
                      std::to_string(header["record_count"].get<std::size_t>()) +
                      " records but file has " + std::to_string(m.records.size()));
  }
  return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path, const Palette& palette) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("manifest: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_manifest(ss.str(), palette);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace chromaprobe
