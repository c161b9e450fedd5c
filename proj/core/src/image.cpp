#include "pseg/image.hpp"

#include <algorithm>
#include <cmath>

#include "pseg/errors.hpp"

namespace pseg {

ContrastStats contrast(const GrayImage& img) {
  detail::require(!img.pixels.empty(), "contrast: empty image");
  double mean = 0.0;
  for (double v : img.pixels) mean += v;
  mean /= img.pixels.size();
  double ss = 0.0;
  for (double v : img.pixels) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / img.pixels.size())};
}

std::vector<double> gaussian_blur(const std::vector<double>& img, int w, int h, double sigma_px) {
  detail::require(static_cast<long>(img.size()) == static_cast<long>(w) * h, "gaussian_blur: size mismatch");
  if (sigma_px <= 0.0) return img;
  const int radius = static_cast<int>(std::ceil(4.0 * sigma_px));
  std::vector<double> taps(2 * radius + 1);
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * i * i / (sigma_px * sigma_px));
    norm += taps[i + radius];
  }
  for (double& t : taps) t /= norm;

  std::vector<double> tmp(img.size(), 0.0);
  std::vector<double> out(img.size(), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) s += taps[i + radius] * img[y * w + std::clamp(x + i, 0, w - 1)];
      tmp[y * w + x] = s;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) s += taps[i + radius] * tmp[std::clamp(y + i, 0, h - 1) * w + x];
      out[y * w + x] = s;
    }
  return out;
}

GrayImage to_gray(const RgbImage& img) {
  GrayImage g(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const auto& p = img.pixels[i];
    g.pixels[i] = 255.0 * (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
  }
  return g;
}

}  // namespace pseg
