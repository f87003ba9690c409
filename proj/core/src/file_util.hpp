#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "chromaprobe/errors.hpp"

namespace chromaprobe::detail {

inline std::string read_file(const std::filesystem::path& path, std::string_view module) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(std::string(module) + ": cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Temp file in the same directory, then rename.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content,
                              std::string_view module) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(std::string(module) + ": cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError(std::string(module) + ": short write to " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace chromaprobe::detail
