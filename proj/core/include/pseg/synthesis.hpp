#pragma once

#include <cstdint>
#include <vector>

#include "pseg/image.hpp"
#include "pseg/probmaps.hpp"

namespace pseg {

/// Parameters of the ground-truth map generator.
struct MapGenParams {
  int k = 3;
  int n = 20;
  double sigma_amp = 1.0;  // field amplitude; large -> near one-hot maps
  double xi = 2.0;         // correlation length in cells; large -> large segments
  std::uint64_t seed = 0;

  void validate() const;
};

/// G_i = sigma^2 exp(-|i|^2 / (2 xi^2)) on the centered n x n lattice,
/// returned row-major in lattice order (element (x, y) has offset
/// (x - n/2, y - n/2)).
std::vector<double> gaussian_smoothing_kernel(double sigma_amp, double xi, int n);

/// Softmax over K independent white-noise fields, each circularly convolved
/// with gaussian_smoothing_kernel in the frequency domain.
ProbMaps generate_probmaps(const MapGenParams& params);

/// Hard version of generated maps (argmax, one-hot).
ProbMaps deterministic_maps(const ProbMaps& p);

enum class FrequencyUnits {
  CyclesPerImage,   // `mode` counts cycles across the image width
  CyclesPerDegree,  // `mode` in cycles/deg, converted with the viewing geometry
};

/// Oriented log-normal texture parameters.
struct TextureParams {
  std::vector<double> theta0_deg{-5.0, 5.0};  // orientation per segment
  double sigma_theta_deg = 5.0;                // orientation bandwidth
  double mode = 16.0;                          // m_r, radial mode
  double bandwidth_oct = 2.0;                  // B_r
  FrequencyUnits units = FrequencyUnits::CyclesPerImage;
  double px_per_cm = 37.8;           // 96 dpi display
  double viewing_distance_cm = 57.0;  // ~1 cm per degree
  double rms_contrast = 35.0;         // gray levels
  double mean_gray = 128.0;
  double map_blur_px = 2.5;           // std-dev of the map smoothing
  std::uint64_t seed = 0;

  void validate() const;
  /// Pixels per degree of visual angle for the physical units.
  double px_per_degree() const;
  /// Radial mode m_r in cycles per pixel for an image of `image_px` pixels.
  double mode_cycles_per_px(int image_px) const;
};

enum class UncertaintyPreset { Low, High };

/// Stimulus presets: theta0 -5/+5 deg, m_r 2.45 c/deg, B_r 2 oct, RMS 35,
/// orientation bandwidth 5 deg (Low) or 7.5 deg (High).
TextureParams texture_preset(UncertaintyPreset preset);

/// sigma_r = sqrt(exp(ln2/8 * B_r^2) - 1).
double lognormal_sigma_r(double bandwidth_oct);

/// Evaluated form of the Fourier-domain texture kernel.
struct TextureKernel {
  double theta0 = 0.0;       // radians
  double sigma_theta = 0.0;  // radians
  double r0 = 0.0;           // cycles per pixel, peak radius
  double sigma_r = 0.0;
};

/// r0 = m (1 + sigma_r^2) with m in cycles per pixel.
TextureKernel make_texture_kernel(double theta0_deg, double sigma_theta_deg, double mode_cpp, double bandwidth_oct);

/// kappa(r, theta) = exp(cos(2(theta - theta0)) / (4 sigma_theta^2))^(1/2)
///                 * exp(-log(r / r0)^2 / (2 log(1 + sigma_r^2)))^(1/2),
/// with the orientation factor divided by its maximum so that it peaks at 1.
/// Throws ContractError for r <= 0.
double fourier_texture_kernel(double r, double theta, const TextureKernel& kernel);
double orientation_factor(double theta, const TextureKernel& kernel);
double radial_factor(double r, const TextureKernel& kernel);

/// Nearest-neighbor upsampling of one segment map to image resolution.
std::vector<double> upsample_map(const ProbMaps& p, int seg, int image_px);

/// Two-segment oriented texture: white noise filtered by a kernel whose
/// orientation follows p[0] theta0[0] + p[1] theta0[1] per pixel (maps
/// upsampled and blurred by map_blur_px first), scaled to the target mean
/// gray and RMS contrast. Requires K == 2.
GrayImage synthesize_texture(const ProbMaps& maps, const TextureParams& params, int image_px);

/// Per pixel: draw a segment from the cell's probabilities, then
/// palette[label] + N(0, noise_sd^2) per channel, clamped to [0, 1].
RgbImage synthesize_rgb_clusters(const ProbMaps& maps, const std::vector<Rgb>& palette, double noise_sd,
                                 std::uint64_t seed, int cell_px);

}  // namespace pseg
