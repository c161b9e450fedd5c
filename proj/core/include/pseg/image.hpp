#pragma once

#include <array>
#include <vector>

namespace pseg {

/// Single-channel image in gray levels (nominally 0..255), row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

using Rgb = std::array<double, 3>;

/// Color image with channels in [0, 1], row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {0, 0, 0}) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct ContrastStats {
  double mean = 0.0;
  double rms = 0.0;  // standard deviation around the mean
};

ContrastStats contrast(const GrayImage& img);

/// Separable Gaussian blur with edge replication.
std::vector<double> gaussian_blur(const std::vector<double>& img, int w, int h, double sigma_px);

/// Luma conversion of an RGB image to gray levels 0..255.
GrayImage to_gray(const RgbImage& img);

}  // namespace pseg
