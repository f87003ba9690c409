#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chromaprobe/color_vocab.hpp"

namespace chromaprobe {

struct Geometry {
  int width = 224;
  int height = 224;

  friend constexpr bool operator==(const Geometry&, const Geometry&) = default;
};

/// Interleaved 8-bit RGB raster, row-major.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  Geometry geometry() const { return {width_, height_}; }
  bool empty() const { return pixels_.empty(); }

  Rgb at(int x, int y) const {
    const auto i = offset(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const auto i = offset(x, y);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  std::span<const std::uint8_t> bytes() const { return pixels_; }
  std::span<std::uint8_t> bytes() { return pixels_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Rec. 601 luma Y = 0.299R + 0.587G + 0.114B, rounded, replicated to RGB.
RgbImage grayscale_variant(const RgbImage& image);

/// Bilinear resample to the requested geometry. Same-size input is returned unchanged.
RgbImage resample(const RgbImage& image, Geometry target);

/// Writes an 8-bit RGB PNG. Text chunks are stored in the given order; the
/// encoder settings are fixed so identical input yields identical bytes.
void write_png(const std::filesystem::path& path, const RgbImage& image,
               std::span<const std::pair<std::string, std::string>> text = {});

/// Reads any PNG libpng understands, converted to 8-bit RGB.
RgbImage read_png(const std::filesystem::path& path);

}  // namespace chromaprobe
