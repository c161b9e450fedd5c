#include "pseg/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pseg/errors.hpp"
#include "pseg/fft.hpp"
#include "pseg/rng.hpp"

namespace pseg {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

void MapGenParams::validate() const {
  detail::require(k >= 2, "map generation needs K >= 2");
  detail::require(n >= 1, "map generation needs n >= 1");
  detail::require(sigma_amp > 0.0, "sigma_amp must be > 0");
  detail::require(xi > 0.0, "xi must be > 0");
}

std::vector<double> gaussian_smoothing_kernel(double sigma_amp, double xi, int n) {
  detail::require(sigma_amp > 0.0 && xi > 0.0 && n >= 1, "gaussian_smoothing_kernel: bad arguments");
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  const int half = n / 2;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double dx = x - half;
      const double dy = y - half;
      g[y * n + x] = sigma_amp * sigma_amp * std::exp(-(dx * dx + dy * dy) / (2.0 * xi * xi));
    }
  return g;
}

ProbMaps generate_probmaps(const MapGenParams& params) {
  params.validate();
  const int n = params.n;
  const int k = params.k;
  const auto lattice = gaussian_smoothing_kernel(params.sigma_amp, params.xi, n);
  // Move the lattice origin to index (0, 0) for circular convolution.
  std::vector<double> kernel(lattice.size());
  const int half = n / 2;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const int wx = ((x - half) % n + n) % n;
      const int wy = ((y - half) % n + n) % n;
      kernel[wy * n + wx] = lattice[y * n + x];
    }
  const fft::Spectrum kernel_hat = fft::forward(kernel, n, n);

  Rng rng(params.seed);
  MapTensor fields(k, n);
  std::vector<double> noise(static_cast<std::size_t>(n) * n);
  for (int s = 0; s < k; ++s) {
    for (double& v : noise) v = rng.normal();
    fft::Spectrum spec = fft::forward(noise, n, n);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= kernel_hat[i];
    const auto f = fft::inverse_real(spec, n, n);
    for (int c = 0; c < n * n; ++c) fields(s, c) = f[c];
  }

  MapTensor p(k, n);
  for (int c = 0; c < n * n; ++c) {
    const auto f = fields.cell(c);
    const double fmax = *std::max_element(f.begin(), f.end());
    double sum = 0.0;
    for (int s = 0; s < k; ++s) sum += (p(s, c) = std::exp(f[s] - fmax));
    for (int s = 0; s < k; ++s) p(s, c) /= sum;
  }
  return ProbMaps(std::move(p));
}

ProbMaps deterministic_maps(const ProbMaps& p) {
  const SegMap seg = argmax_segmap(p);
  return ProbMaps::one_hot(p.k(), p.n(), seg.labels);
}

void TextureParams::validate() const {
  detail::require(!theta0_deg.empty(), "texture needs at least one orientation");
  detail::require(sigma_theta_deg > 0.0, "sigma_theta must be > 0");
  detail::require(mode > 0.0, "radial mode must be > 0");
  detail::require(bandwidth_oct > 0.0, "bandwidth must be > 0");
  detail::require(rms_contrast > 0.0, "RMS contrast must be > 0");
  if (units == FrequencyUnits::CyclesPerDegree)
    detail::require(px_per_cm > 0.0 && viewing_distance_cm > 0.0, "viewing geometry must be positive");
}

double TextureParams::px_per_degree() const {
  return px_per_cm * viewing_distance_cm * std::tan(kDeg);
}

double TextureParams::mode_cycles_per_px(int image_px) const {
  return units == FrequencyUnits::CyclesPerImage ? mode / image_px : mode / px_per_degree();
}

TextureParams texture_preset(UncertaintyPreset preset) {
  TextureParams p;
  p.theta0_deg = {-5.0, 5.0};
  p.sigma_theta_deg = preset == UncertaintyPreset::Low ? 5.0 : 7.5;
  p.mode = 2.45;
  p.bandwidth_oct = 2.0;
  p.units = FrequencyUnits::CyclesPerDegree;
  p.rms_contrast = 35.0;
  return p;
}

double lognormal_sigma_r(double bandwidth_oct) {
  return std::sqrt(std::exp(std::numbers::ln2 / 8.0 * bandwidth_oct * bandwidth_oct) - 1.0);
}

TextureKernel make_texture_kernel(double theta0_deg, double sigma_theta_deg, double mode_cpp, double bandwidth_oct) {
  detail::require(sigma_theta_deg > 0.0 && mode_cpp > 0.0 && bandwidth_oct > 0.0,
                  "make_texture_kernel: parameters must be positive");
  TextureKernel k;
  k.theta0 = theta0_deg * kDeg;
  k.sigma_theta = sigma_theta_deg * kDeg;
  k.sigma_r = lognormal_sigma_r(bandwidth_oct);
  k.r0 = mode_cpp * (1.0 + k.sigma_r * k.sigma_r);
  return k;
}

double orientation_factor(double theta, const TextureKernel& kernel) {
  const double s2 = kernel.sigma_theta * kernel.sigma_theta;
  return std::exp((std::cos(2.0 * (theta - kernel.theta0)) - 1.0) / (8.0 * s2));
}

double radial_factor(double r, const TextureKernel& kernel) {
  if (!(r > 0.0)) throw ContractError("texture kernel radius must be > 0");
  const double l = std::log(r / kernel.r0);
  return std::exp(-l * l / (4.0 * std::log1p(kernel.sigma_r * kernel.sigma_r)));
}

double fourier_texture_kernel(double r, double theta, const TextureKernel& kernel) {
  return radial_factor(r, kernel) * orientation_factor(theta, kernel);
}

std::vector<double> upsample_map(const ProbMaps& p, int seg, int image_px) {
  detail::require(image_px % p.n() == 0, "upsample_map: image size must be a multiple of the grid size");
  const int s = image_px / p.n();
  std::vector<double> out(static_cast<std::size_t>(image_px) * image_px);
  for (int y = 0; y < image_px; ++y)
    for (int x = 0; x < image_px; ++x) out[y * image_px + x] = p(seg, (y / s) * p.n() + x / s);
  return out;
}

GrayImage synthesize_texture(const ProbMaps& maps, const TextureParams& params, int image_px) {
  params.validate();
  if (maps.k() != 2) throw ContractError("texture synthesis needs K = 2 maps, got K = " + std::to_string(maps.k()));
  detail::require(params.theta0_deg.size() == 2, "texture synthesis needs one orientation per segment");
  const int px = image_px;

  const auto weight0 = gaussian_blur(upsample_map(maps, 0, px), px, px, params.map_blur_px);
  std::vector<double> theta_px(weight0.size());
  for (std::size_t i = 0; i < theta_px.size(); ++i)
    theta_px[i] = weight0[i] * params.theta0_deg[0] + (1.0 - weight0[i]) * params.theta0_deg[1];
  const auto [tmin, tmax] = std::minmax_element(theta_px.begin(), theta_px.end());
  const int lo = static_cast<int>(std::floor(*tmin));
  const int hi = std::max(lo, static_cast<int>(std::ceil(*tmax)));

  Rng rng(params.seed);
  std::vector<double> noise(static_cast<std::size_t>(px) * px);
  for (double& v : noise) v = rng.normal();
  const fft::Spectrum noise_hat = fft::forward(noise, px, px);
  const double mode_cpp = params.mode_cycles_per_px(px);

  // Orientation bank at 1 degree steps; each pixel linearly blends the two
  // bank responses that bracket its local orientation.
  std::vector<double> out(noise.size(), 0.0);
  fft::Spectrum filtered(noise_hat.size());
  for (int b = lo; b <= hi; ++b) {
    const TextureKernel kern = make_texture_kernel(b, params.sigma_theta_deg, mode_cpp, params.bandwidth_oct);
    for (int ky = 0; ky < px; ++ky)
      for (int kx = 0; kx < px; ++kx) {
        const double fx = fft::frequency(kx, px);
        const double fy = fft::frequency(ky, px);
        const double r = std::hypot(fx, fy);
        const std::size_t i = static_cast<std::size_t>(ky) * px + kx;
        filtered[i] = (r > 0.0 && r <= 0.5) ? noise_hat[i] * fourier_texture_kernel(r, std::atan2(fy, fx), kern)
                                            : std::complex<double>(0.0, 0.0);
      }
    const auto response = fft::inverse_real(filtered, px, px);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double w = std::max(0.0, 1.0 - std::abs(theta_px[i] - b));
      if (w > 0.0) out[i] += w * response[i];
    }
  }

  GrayImage img(px, px);
  img.pixels = std::move(out);
  const ContrastStats st = contrast(img);
  const double scale = st.rms > 0.0 ? params.rms_contrast / st.rms : 0.0;
  for (double& v : img.pixels) v = std::clamp(params.mean_gray + scale * (v - st.mean), 0.0, 255.0);
  return img;
}

RgbImage synthesize_rgb_clusters(const ProbMaps& maps, const std::vector<Rgb>& palette, double noise_sd,
                                 std::uint64_t seed, int cell_px) {
  detail::require(static_cast<int>(palette.size()) == maps.k(), "palette size must equal K");
  detail::require(noise_sd >= 0.0, "noise_sd must be >= 0");
  detail::require(cell_px >= 1, "cell_px must be >= 1");
  const int n = maps.n();
  const int px = n * cell_px;
  RgbImage img(px, px);
  Rng rng(seed);
  for (int y = 0; y < px; ++y)
    for (int x = 0; x < px; ++x) {
      const auto p = maps.cell((y / cell_px) * n + x / cell_px);
      const double u = rng.uniform();
      int label = maps.k() - 1;
      double acc = 0.0;
      for (int s = 0; s < maps.k(); ++s) {
        acc += p[s];
        if (u < acc) {
          label = s;
          break;
        }
      }
      Rgb& out = img.at(x, y);
      for (int ch = 0; ch < 3; ++ch)
        out[ch] = std::clamp(palette[label][ch] + (noise_sd > 0.0 ? noise_sd * rng.normal() : 0.0), 0.0, 1.0);
    }
  return img;
}

}  // namespace pseg
