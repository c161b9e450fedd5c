#pragma once

#include <string>

#include "pseg/image.hpp"

namespace pseg {

/// Gray levels 0..255 are clamped and scaled to the full range of the bit depth.
void write_png_gray(const std::string& path, const GrayImage& img, int bit_depth = 16);
/// Channels in [0, 1], 8-bit output.
void write_png_rgb(const std::string& path, const RgbImage& img);

/// Reads any PNG; gray images come back in gray levels 0..255 (16-bit
/// precision kept), color images as channels in [0, 1]. Alpha is dropped.
GrayImage read_png_gray(const std::string& path);
RgbImage read_png_rgb(const std::string& path);

}  // namespace pseg
