#include "pseg/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pseg/errors.hpp"
#include "pseg/fft.hpp"
#include "pseg/synthesis.hpp"

namespace pseg {

FeatureMaps rgb_features(const RgbImage& image, const GridSpec& grid) {
  detail::require(image.width == grid.image_px() && image.height == grid.image_px(),
                  "rgb_features: image size " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                      " does not match the grid (" + std::to_string(grid.image_px()) + " px)");
  FeatureMaps f(grid.n(), 3);
  const int cp = grid.cell_px();
  for (int c = 0; c < grid.cells(); ++c) {
    const PixelRegion r = grid.region(c);
    for (int y = r.y0; y < r.y0 + r.size; ++y)
      for (int x = r.x0; x < r.x0 + r.size; ++x)
        for (int ch = 0; ch < 3; ++ch) f(c, ch) += image.at(x, y)[ch];
    for (int ch = 0; ch < 3; ++ch) f(c, ch) /= static_cast<double>(cp) * cp;
  }
  return f;
}

FeatureMaps wavelet_energy_features(const GrayImage& image, const GridSpec& grid, const WaveletOptions& opt) {
  detail::require(image.width == image.height, "wavelet_energy_features needs a square image");
  detail::require(image.width == grid.image_px(), "wavelet_energy_features: image size does not match the grid");
  detail::require(opt.n_orient >= 2 && opt.n_scales >= 1, "wavelet_energy_features: bad band counts");
  const int px = image.width;
  const double sigma_theta = opt.sigma_theta_deg > 0.0 ? opt.sigma_theta_deg : 180.0 / opt.n_orient;

  std::vector<double> modes(opt.n_scales);
  const double lo = opt.min_cycles_per_image_frac * px, hi = opt.max_cycles_per_image_frac * px;
  for (int s = 0; s < opt.n_scales; ++s)
    modes[s] = opt.n_scales == 1 ? std::sqrt(lo * hi) : lo * std::pow(hi / lo, static_cast<double>(s) / (opt.n_scales - 1));

  const fft::Spectrum img_hat = fft::forward(image.pixels, px, px);
  std::vector<double> radius(img_hat.size()), angle(img_hat.size());
  for (int ky = 0; ky < px; ++ky)
    for (int kx = 0; kx < px; ++kx) {
      const double fx = fft::frequency(kx, px), fy = fft::frequency(ky, px);
      radius[ky * px + kx] = std::hypot(fx, fy);
      angle[ky * px + kx] = std::atan2(fy, fx);
    }

  FeatureMaps f(grid.n(), opt.n_orient);
  fft::Spectrum filtered(img_hat.size());
  std::vector<double> energy(img_hat.size());
  const double norm = 1.0 / (static_cast<double>(opt.n_scales) * grid.cell_px() * grid.cell_px());
  for (int m = 0; m < opt.n_orient; ++m) {
    std::fill(energy.begin(), energy.end(), 0.0);
    for (int s = 0; s < opt.n_scales; ++s) {
      const TextureKernel kern =
          make_texture_kernel(m * 180.0 / opt.n_orient, sigma_theta, modes[s] / px, opt.bandwidth_oct);
      for (std::size_t i = 0; i < img_hat.size(); ++i)
        filtered[i] = radius[i] > 0.0 ? img_hat[i] * fourier_texture_kernel(radius[i], angle[i], kern)
                                      : std::complex<double>(0.0, 0.0);
      const auto resp = fft::inverse_real(filtered, px, px);
      for (std::size_t i = 0; i < resp.size(); ++i) energy[i] += resp[i] * resp[i];
    }
    for (int y = 0; y < px; ++y)
      for (int x = 0; x < px; ++x) f(grid.cell_of_pixel(x, y), m) += energy[y * px + x] * norm;
  }
  return f;
}

std::vector<double> power_spectrum(const GrayImage& image) {
  detail::require(image.width > 0 && image.height > 0, "power_spectrum: empty image");
  const ContrastStats st = contrast(image);
  std::vector<double> centered(image.pixels);
  for (double& v : centered) v -= st.mean;
  const fft::Spectrum s = fft::forward(centered, image.height, image.width);
  std::vector<double> p(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) p[i] = std::norm(s[i]);
  p[0] = 0.0;
  return p;
}

std::vector<double> orientation_histogram(const GrayImage& image, int bins) {
  detail::require(bins >= 2, "orientation_histogram needs at least 2 bins");
  const auto p = power_spectrum(image);
  std::vector<double> h(bins, 0.0);
  const double width = 180.0 / bins;
  for (int ky = 0; ky < image.height; ++ky)
    for (int kx = 0; kx < image.width; ++kx) {
      const double fx = fft::frequency(kx, image.width), fy = fft::frequency(ky, image.height);
      if (fx == 0.0 && fy == 0.0) continue;
      double deg = std::atan2(fy, fx) * 180.0 / std::numbers::pi;
      deg = std::fmod(deg + 360.0, 180.0);
      const int b = static_cast<int>(std::floor(deg / width + 0.5)) % bins;
      h[b] += p[static_cast<std::size_t>(ky) * image.width + kx];
    }
  return h;
}

std::vector<double> radial_power_profile(const GrayImage& image) {
  detail::require(image.width == image.height, "radial_power_profile needs a square image");
  const int px = image.width;
  const auto p = power_spectrum(image);
  const int rmax = px / 2;
  std::vector<double> sum(rmax + 1, 0.0);
  std::vector<int> count(rmax + 1, 0);
  for (int ky = 0; ky < px; ++ky)
    for (int kx = 0; kx < px; ++kx) {
      const double r = std::hypot(fft::frequency(kx, px), fft::frequency(ky, px)) * px;
      const int b = static_cast<int>(std::floor(r + 0.5));
      if (b > rmax) continue;
      sum[b] += p[static_cast<std::size_t>(ky) * px + kx];
      ++count[b];
    }
  for (int b = 0; b <= rmax; ++b) sum[b] = count[b] ? sum[b] / count[b] : 0.0;
  return sum;
}

double radial_spectral_mode(const GrayImage& image) {
  const auto prof = radial_power_profile(image);
  const int rmax = static_cast<int>(prof.size()) - 1;
  int best = 1;
  for (int r = 1; r <= rmax; ++r)
    if (prof[r] > prof[best]) best = r;
  // Least-squares parabola of log power against log radius over the
  // contiguous band above 5% of the peak. Single annuli are noisy
  // (periodogram values are exponentially distributed), the fit is not.
  const double floor = 0.05 * prof[best];
  int lo = best, hi = best;
  while (lo > 1 && prof[lo - 1] >= floor) --lo;
  while (hi < rmax && prof[hi + 1] >= floor) ++hi;
  if (hi - lo < 2) return static_cast<double>(best) / image.width;
  double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
  for (int r = lo; r <= hi; ++r) {
    const double x = std::log(static_cast<double>(r)), y = std::log(prof[r]);
    double xp = 1.0;
    for (int e = 0; e < 5; ++e, xp *= x) {
      s[e] += xp;
      if (e < 3) t[e] += xp * y;
    }
  }
  // Normal equations for y = c0 + c1 x + c2 x^2, solved by Cramer's rule.
  auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  };
  const double det = det3(s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
  const double c1 = det3(s[0], t[0], s[2], s[1], t[1], s[3], s[2], t[2], s[4]) / det;
  const double c2 = det3(s[0], s[1], t[0], s[1], s[2], t[1], s[2], s[3], t[2]) / det;
  double mode = best;
  if (c2 < 0.0) mode = std::exp(std::clamp(-c1 / (2.0 * c2), std::log(lo), std::log(hi)));
  return mode / image.width;
}

double orientation_spread_deg(const std::vector<double>& histogram) {
  detail::require(histogram.size() >= 2, "orientation_spread_deg needs at least 2 bins");
  // Orientations are axial: double the angles, take the circular SD, halve.
  double c = 0.0, s = 0.0, total = 0.0;
  const double width = std::numbers::pi / histogram.size();
  for (std::size_t b = 0; b < histogram.size(); ++b) {
    const double a = 2.0 * b * width;
    c += histogram[b] * std::cos(a);
    s += histogram[b] * std::sin(a);
    total += histogram[b];
  }
  detail::require(total > 0.0, "orientation_spread_deg: empty histogram");
  const double r = std::hypot(c, s) / total;
  return 0.5 * std::sqrt(-2.0 * std::log(std::max(r, 1e-300))) * 180.0 / std::numbers::pi;
}

}  // namespace pseg
