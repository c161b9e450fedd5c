// Ground-truth generation, texture and color synthesis, image features and
// pair sampling.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "pseg/errors.hpp"
#include "pseg/features.hpp"
#include "pseg/pairs.hpp"
#include "pseg/probmaps.hpp"
#include "pseg/rng.hpp"
#include "pseg/synthesis.hpp"

using namespace pseg;
using doctest::Approx;

namespace {

std::vector<int> halves(int n) {
  std::vector<int> labels(n * n);
  for (int c = 0; c < n * n; ++c) labels[c] = (c % n) < n / 2 ? 0 : 1;
  return labels;
}

int argmax_bin(const std::vector<double>& h) {
  return static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());
}

}  // namespace

TEST_CASE("smoothing kernel values") {
  const double s = 1.5, xi = 2.0;
  const int n = 9;
  const auto g = gaussian_smoothing_kernel(s, xi, n);
  REQUIRE(g.size() == 81);
  const int c = n / 2;
  CHECK(g[c * n + c] == Approx(s * s));
  CHECK(g[c * n + c + 1] == Approx(s * s * std::exp(-1.0 / (2 * xi * xi))));
  CHECK(g[(c + 2) * n + c + 1] == Approx(s * s * std::exp(-5.0 / (2 * xi * xi))));
  for (int y = 1; y < n; ++y)
    for (int x = 1; x < n; ++x) CHECK(g[y * n + x] == Approx(g[(2 * c - y) * n + (2 * c - x)]));
}

TEST_CASE("generated maps stay on the simplex") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    MapGenParams mp;
    mp.k = 2 + static_cast<int>(seed % 4);
    mp.n = 8;
    mp.sigma_amp = 0.2 + 0.05 * seed;
    mp.xi = 1.0 + 0.03 * seed;
    mp.seed = seed;
    CHECK(generate_probmaps(mp).max_simplex_error() < 1e-12);
  }
}

TEST_CASE("field amplitude controls map entropy") {
  const double ln3 = std::log(3.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MapGenParams sharp{3, 16, 60.0, 2.0, seed};
    CHECK(mean_entropy(generate_probmaps(sharp)).mean < 0.05 * ln3);
    MapGenParams flat{3, 16, 1e-4, 2.0, seed};
    const ProbMaps p = generate_probmaps(flat);
    for (double v : p.tensor().values()) CHECK(v == Approx(1.0 / 3).epsilon(1e-3));
  }
}

TEST_CASE("deterministic maps are one-hot argmax") {
  const ProbMaps p = generate_probmaps({3, 10, 1.0, 2.0, 4});
  const ProbMaps d = deterministic_maps(p);
  const SegMap s = argmax_segmap(p);
  for (int c = 0; c < d.cells(); ++c) CHECK(d(s.labels[c], c) == 1.0);
}

TEST_CASE("log-normal radial bandwidth") {
  CHECK(lognormal_sigma_r(2.0) == Approx(0.6436).epsilon(1e-4));
  const TextureKernel k = make_texture_kernel(0.0, 5.0, 0.05, 2.0);
  CHECK(k.r0 == Approx(0.05 * (1 + k.sigma_r * k.sigma_r)));
  CHECK(radial_factor(k.r0, k) == Approx(1.0));
  CHECK(orientation_factor(k.theta0, k) == Approx(1.0));
  CHECK(orientation_factor(k.theta0 + 0.3, k) < 1.0);
  CHECK(orientation_factor(k.theta0 + std::numbers::pi, k) == Approx(1.0));
  CHECK_THROWS_AS(fourier_texture_kernel(0.0, 0.0, k), ContractError);
}

TEST_CASE("texture orientation, mode and contrast") {
  const ProbMaps maps = ProbMaps::one_hot(2, 16, std::vector<int>(256, 0));
  TextureParams tp;
  tp.theta0_deg = {90.0, 90.0};
  tp.seed = 12;
  const GrayImage img = synthesize_texture(maps, tp, 256);
  CHECK(argmax_bin(orientation_histogram(img, 36)) == 18);
  const ContrastStats st = contrast(img);
  CHECK(st.rms == Approx(35.0).epsilon(0.02));
  CHECK(st.mean == Approx(128.0).epsilon(0.02));
  const TextureKernel k = make_texture_kernel(90.0, 5.0, tp.mode_cycles_per_px(256), 2.0);
  CHECK(std::abs(radial_spectral_mode(img) - k.r0) < 0.1 * k.r0);
}

TEST_CASE("wider orientation bandwidth spreads the spectrum") {
  const ProbMaps maps = ProbMaps::one_hot(2, 16, std::vector<int>(256, 0));
  TextureParams low = texture_preset(UncertaintyPreset::Low), high = texture_preset(UncertaintyPreset::High);
  low.seed = high.seed = 3;
  const double s_low = orientation_spread_deg(orientation_histogram(synthesize_texture(maps, low, 256), 90));
  const double s_high = orientation_spread_deg(orientation_histogram(synthesize_texture(maps, high, 256), 90));
  CHECK(s_high > s_low);
}

TEST_CASE("color clusters") {
  const int n = 6, px = 8;
  const ProbMaps maps = ProbMaps::one_hot(2, n, halves(n));
  const std::vector<Rgb> palette{{0.8, 0.2, 0.3}, {0.1, 0.6, 0.5}};
  const RgbImage clean = synthesize_rgb_clusters(maps, palette, 0.0, 1, px);
  REQUIRE(clean.width == n * px);
  for (int y = 0; y < clean.height; ++y)
    for (int x = 0; x < clean.width; ++x) CHECK(clean.at(x, y) == palette[(x / px) < n / 2 ? 0 : 1]);

  const double sd = 0.05;
  const RgbImage noisy = synthesize_rgb_clusters(maps, palette, sd, 2, px);
  for (int seg = 0; seg < 2; ++seg)
    for (int ch = 0; ch < 3; ++ch) {
      double sum = 0.0;
      int count = 0;
      for (int y = 0; y < noisy.height; ++y)
        for (int x = 0; x < noisy.width; ++x)
          if (((x / px) < n / 2 ? 0 : 1) == seg) {
            sum += noisy.at(x, y)[ch];
            ++count;
          }
      CHECK(std::abs(sum / count - palette[seg][ch]) <= 3.0 * sd / std::sqrt(count));
    }
}

TEST_CASE("rgb features") {
  const GridSpec g(4, 32);
  const FeatureMaps red = rgb_features(RgbImage(32, 32, {1.0, 0.0, 0.0}), g);
  for (int c = 0; c < 16; ++c) {
    CHECK(red(c, 0) == 1.0);
    CHECK(red(c, 1) == 0.0);
    CHECK(red(c, 2) == 0.0);
  }
  RgbImage checker(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      if ((x + y) % 2) checker.at(x, y) = {1.0, 1.0, 1.0};
  const FeatureMaps f = rgb_features(checker, g);
  for (double v : f.values) CHECK(v == Approx(0.5));
}

TEST_CASE("wavelet energy features") {
  const int px = 128;
  const GridSpec g(4, px);
  Rng rng(17);
  GrayImage noise(px, px);
  for (double& v : noise.pixels) v = 128.0 + 30.0 * rng.normal();
  WaveletOptions opt;
  opt.n_orient = 8;
  const FeatureMaps fn = wavelet_energy_features(noise, g, opt);
  std::vector<double> band(opt.n_orient, 0.0);
  for (int c = 0; c < g.cells(); ++c)
    for (int m = 0; m < opt.n_orient; ++m) band[m] += fn(c, m);
  CHECK(*std::max_element(band.begin(), band.end()) / *std::min_element(band.begin(), band.end()) < 1.5);

  GrayImage grating(px, px);
  for (int y = 0; y < px; ++y)
    for (int x = 0; x < px; ++x) grating.at(x, y) = 128.0 + 50.0 * std::sin(2 * std::numbers::pi * 12.0 * x / px);
  const FeatureMaps fg = wavelet_energy_features(grating, g, opt);
  for (int c = 0; c < g.cells(); ++c) {
    std::vector<double> e(fg.cell(c).begin(), fg.cell(c).end());
    CHECK(argmax_bin(e) == 0);
  }
}

TEST_CASE("pair set sizes") {
  CHECK(pair_count(2, 11, Coverage::KPerPixel) == 242);
  CHECK(pair_count(5, 16, Coverage::Minimal) == 1024);
  CHECK(sample_pairset(GridSpec(11), 2, Coverage::KPerPixel, 1).size() == 242);
  CHECK(sample_pairset(GridSpec(16), 5, Coverage::Minimal, 1).size() == 1024);
}

TEST_CASE("pair sets cover every cell without self or duplicate pairs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    for (Coverage cov : {Coverage::Minimal, Coverage::KPerPixel}) {
      const int n = 5 + static_cast<int>(seed % 4), k = 2 + static_cast<int>(seed % 3);
      const PairSet ps = sample_pairset(GridSpec(n), k, cov, seed);
      std::set<CellPair> seen;
      std::vector<int> hit(n * n, 0);
      bool ok = true;
      for (const CellPair& p : ps) {
        ok = ok && p.a != p.b && p.a < n * n && p.b < n * n && seen.insert(CellPair::make(p.a, p.b)).second;
        hit[p.a] = hit[p.b] = 1;
      }
      CHECK(ok);
      CHECK(std::count(hit.begin(), hit.end(), 1) == n * n);
    }
}

TEST_CASE("simulated responses follow the model") {
  const int n = 3;
  const PairSet ps = sample_pairset(GridSpec(n), 2, Coverage::KPerPixel, 9);
  const ResponseDataset same = simulate_responses(ProbMaps::one_hot(2, n, std::vector<int>(9, 1)), ps, 5, 1);
  for (const Block& b : same.blocks)
    for (auto r : b.responses) CHECK(r == 1);

  std::vector<int> checker(9);
  for (int c = 0; c < 9; ++c) checker[c] = c % 2;
  PairSet opposite;
  for (int i = 0; i < 9; ++i)
    for (int j = i + 1; j < 9; ++j)
      if (checker[i] != checker[j]) opposite.pairs.push_back({i, j});
  const ResponseDataset diff = simulate_responses(ProbMaps::one_hot(2, n, checker), opposite, 5, 1);
  for (const Block& b : diff.blocks)
    for (auto r : b.responses) CHECK(r == 0);

  const ResponseDataset half = simulate_responses(ProbMaps::uniform(2, n), ps, 10000, 3);
  const AggregatedCounts agg = aggregate_responses(half);
  for (const PairCount& e : agg.entries()) {
    CHECK(e.rate() >= 0.48);
    CHECK(e.rate() <= 0.52);
  }
}
