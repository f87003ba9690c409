#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chromaprobe/stimulus.hpp"

namespace chromaprobe {

/// Key/value pairs echoed into artifact headers (config hash, seeds, ...).
using Provenance = std::vector<std::pair<std::string, std::string>>;

/// Newline-delimited manifest: one header object, then one object per record.
std::string manifest_to_ndjson(const DatasetManifest& manifest, const Palette& palette,
                               const Provenance& provenance = {});

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest,
                    const Palette& palette, const Provenance& provenance = {});

/// Parses a manifest; color names resolve through `palette`, whose hash must
/// match the header's palette hash when one is present.
DatasetManifest parse_manifest(std::string_view text, const Palette& palette);
DatasetManifest read_manifest(const std::filesystem::path& path, const Palette& palette);

}  // namespace chromaprobe
