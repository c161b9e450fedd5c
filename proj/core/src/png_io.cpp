#include "pseg/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "pseg/errors.hpp"

namespace pseg {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_fail(png_structp, png_const_charp msg) { throw DataError(std::string("PNG error: ") + msg); }
void png_warn(png_structp, png_const_charp) {}

void write_rows(const std::string& path, int w, int h, int depth, int color_type,
                const std::vector<std::vector<png_byte>>& rows) {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DataError("cannot write '" + path + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png_create_info_struct(png);
  try {
    png_init_io(png, f.get());
    png_set_IHDR(png, info, w, h, depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (const auto& r : rows) png_write_row(png, r.data());
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

struct Decoded {
  int width = 0, height = 0, channels = 0;
  std::vector<double> values;  // in [0, 1], interleaved
};

Decoded decode(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DataError("cannot open '" + path + "'");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8)) throw DataError("'" + path + "' is not a PNG");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png_create_info_struct(png);
  Decoded d;
  try {
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_strip_alpha(png);
    if (depth == 16) png_set_swap(png);  // host little-endian rows
    png_read_update_info(png, info);
    d.width = static_cast<int>(png_get_image_width(png, info));
    d.height = static_cast<int>(png_get_image_height(png, info));
    d.channels = png_get_channels(png, info);
    depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<png_byte> row(rowbytes);
    d.values.reserve(static_cast<std::size_t>(d.width) * d.height * d.channels);
    const double scale = depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
    for (int y = 0; y < d.height; ++y) {
      png_read_row(png, row.data(), nullptr);
      for (int i = 0; i < d.width * d.channels; ++i) {
        const unsigned v = depth == 16 ? static_cast<unsigned>(row[2 * i] | (row[2 * i + 1] << 8)) : row[i];
        d.values.push_back(v * scale);
      }
    }
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return d;
}

}  // namespace

void write_png_gray(const std::string& path, const GrayImage& img, int bit_depth) {
  detail::require(bit_depth == 8 || bit_depth == 16, "write_png_gray: bit depth must be 8 or 16");
  detail::require(img.width > 0 && img.height > 0, "write_png_gray: empty image");
  const int maxv = bit_depth == 16 ? 65535 : 255;
  std::vector<std::vector<png_byte>> rows(img.height);
  for (int y = 0; y < img.height; ++y) {
    auto& r = rows[y];
    r.resize(static_cast<std::size_t>(img.width) * (bit_depth / 8));
    for (int x = 0; x < img.width; ++x) {
      const long v = std::lround(std::clamp(img.at(x, y), 0.0, 255.0) / 255.0 * maxv);
      if (bit_depth == 16) {
        r[2 * x] = static_cast<png_byte>(v >> 8);
        r[2 * x + 1] = static_cast<png_byte>(v & 0xff);
      } else {
        r[x] = static_cast<png_byte>(v);
      }
    }
  }
  write_rows(path, img.width, img.height, bit_depth, PNG_COLOR_TYPE_GRAY, rows);
}

void write_png_rgb(const std::string& path, const RgbImage& img) {
  detail::require(img.width > 0 && img.height > 0, "write_png_rgb: empty image");
  std::vector<std::vector<png_byte>> rows(img.height);
  for (int y = 0; y < img.height; ++y) {
    auto& r = rows[y];
    r.resize(static_cast<std::size_t>(img.width) * 3);
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c)
        r[3 * x + c] = static_cast<png_byte>(std::lround(std::clamp(img.at(x, y)[c], 0.0, 1.0) * 255.0));
  }
  write_rows(path, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

GrayImage read_png_gray(const std::string& path) {
  const Decoded d = decode(path);
  GrayImage g(d.width, d.height);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    if (d.channels >= 3) {
      const double* p = &d.values[i * d.channels];
      g.pixels[i] = 255.0 * (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
    } else {
      g.pixels[i] = 255.0 * d.values[i * d.channels];
    }
  }
  return g;
}

RgbImage read_png_rgb(const std::string& path) {
  const Decoded d = decode(path);
  RgbImage out(d.width, d.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i)
    for (int c = 0; c < 3; ++c) out.pixels[i][c] = d.values[i * d.channels + (d.channels >= 3 ? c : 0)];
  return out;
}

}  // namespace pseg
