#pragma once

#include <vector>

#include "pseg/grid.hpp"
#include "pseg/image.hpp"
#include "pseg/parametric.hpp"

namespace pseg {

/// Per-cell mean RGB (channels already in [0, 1]).
FeatureMaps rgb_features(const RgbImage& image, const GridSpec& grid);

struct WaveletOptions {
  int n_orient = 36;
  int n_scales = 4;
  double min_cycles_per_image_frac = 1.0 / 32;  // lowest radial mode, as a fraction of image_px
  double max_cycles_per_image_frac = 1.0 / 4;   // highest radial mode
  double bandwidth_oct = 2.0;
  double sigma_theta_deg = 0.0;  // 0 -> 180 / n_orient
};

/// Band m covers orientation m * 180 / n_orient degrees (frequency-domain
/// angle atan2(fy, fx)). Each band filters the image with the log-normal
/// texture kernel at every scale; the squared responses are averaged over
/// scales and over each cell's pixels.
FeatureMaps wavelet_energy_features(const GrayImage& image, const GridSpec& grid, const WaveletOptions& opt = {});

/// Power spectrum (DC removed) of an image, row-major with DFT bin order.
std::vector<double> power_spectrum(const GrayImage& image);

/// Spectral energy in `bins` orientation bins over [0, 180) degrees; bin b
/// is centered on b * 180 / bins.
std::vector<double> orientation_histogram(const GrayImage& image, int bins);

/// Mean power per integer-radius annulus (index r covers radii in
/// [r - 0.5, r + 0.5) cycles per image), up to the Nyquist radius.
std::vector<double> radial_power_profile(const GrayImage& image);

/// Peak of the radial power profile in cycles per pixel: vertex of a
/// least-squares parabola of log power on log radius, fitted over the band
/// around the maximum annulus where power exceeds 5% of that maximum.
double radial_spectral_mode(const GrayImage& image);

/// Circular standard deviation (degrees) of an orientation histogram on [0, 180).
double orientation_spread_deg(const std::vector<double>& histogram);

}  // namespace pseg
