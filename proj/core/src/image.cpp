#include "chromaprobe/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "chromaprobe/errors.hpp"

namespace chromaprobe {

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw InputError("image: geometry must be positive");
  pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

RgbImage grayscale_variant(const RgbImage& image) {
  RgbImage out = image;
  auto px = out.bytes();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    const double y = 0.299 * px[i] + 0.587 * px[i + 1] + 0.114 * px[i + 2];
    const auto v = static_cast<std::uint8_t>(std::lround(std::min(255.0, y)));
    px[i] = px[i + 1] = px[i + 2] = v;
  }
  return out;
}

RgbImage resample(const RgbImage& image, Geometry target) {
  if (image.geometry() == target) return image;
  if (image.empty()) throw InputError("image: cannot resample an empty image");
  RgbImage out(target.width, target.height);
  const double sx = static_cast<double>(image.width()) / target.width;
  const double sy = static_cast<double>(image.height()) / target.height;
  for (int y = 0; y < target.height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, image.height() - 1);
    const double ty = fy - y0;
    for (int x = 0; x < target.width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, image.width() - 1);
      const double tx = fx - x0;
      auto mix = [&](auto channel) {
        const double top = channel(image.at(x0, y0)) * (1 - tx) + channel(image.at(x1, y0)) * tx;
        const double bot = channel(image.at(x0, y1)) * (1 - tx) + channel(image.at(x1, y1)) * tx;
        return static_cast<std::uint8_t>(std::lround(top * (1 - ty) + bot * ty));
      };
      out.set(x, y, Rgb{mix([](Rgb c) { return c.r; }), mix([](Rgb c) { return c.g; }),
                        mix([](Rgb c) { return c.b; })});
    }
  }
  return out;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

}  // namespace

namespace {

// Kept free of objects with destructors: a libpng error longjmps out of it.
bool encode_png(png_structp png, png_infop info, std::FILE* file, png_text* chunks, int chunk_count,
                png_bytep* rows, png_uint_32 width, png_uint_32 height) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (chunk_count > 0) png_set_text(png, info, chunks, chunk_count);
  png_set_rows(png, info, rows);
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  return true;
}

}  // namespace

void write_png(const std::filesystem::path& path, const RgbImage& image,
               std::span<const std::pair<std::string, std::string>> text) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw InputError("image: cannot open " + path.string() + " for writing");

  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("image: libpng initialisation failed");
  }

  std::vector<png_text> chunks(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = const_cast<char*>(text[i].first.c_str());
    chunks[i].text = const_cast<char*>(text[i].second.c_str());
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
  auto* base = const_cast<std::uint8_t*>(image.bytes().data());
  const auto stride = static_cast<std::size_t>(image.width()) * 3;
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = base + y * stride;

  const bool ok = encode_png(png, info, file.get(), chunks.data(), static_cast<int>(chunks.size()),
                             rows.data(), static_cast<png_uint_32>(image.width()),
                             static_cast<png_uint_32>(image.height()));
  png_destroy_write_struct(&png, &info);
  if (!ok) throw FormatError("image: writing " + path.string() + " failed: " + error);
}

namespace {

bool decode_png(png_structp png, png_infop info, std::FILE* file) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_read_png(png, info,
               PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_PACKING | PNG_TRANSFORM_EXPAND |
                   PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_GRAY_TO_RGB,
               nullptr);
  return true;
}

}  // namespace

RgbImage read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw InputError("image: cannot open " + path.string());

  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("image: libpng initialisation failed");
  }
  if (!decode_png(png, info, file.get())) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("image: reading " + path.string() + " failed: " + error);
  }
  const auto width = static_cast<int>(png_get_image_width(png, info));
  const auto height = static_cast<int>(png_get_image_height(png, info));
  const auto channels = png_get_channels(png, info);
  png_bytepp rows = png_get_rows(png, info);
  RgbImage out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const png_bytep p = rows[y] + static_cast<std::size_t>(x) * channels;
      out.set(x, y, Rgb{p[0], p[1], p[2]});
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace chromaprobe
