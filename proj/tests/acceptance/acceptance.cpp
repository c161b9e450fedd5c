// Acceptance suite: runs every primary criterion and prints one line each.
//
// Usage: pseg_acceptance [--only 1,3,...] [--threads N]
// Exit status is the number of failing criteria (0 when all pass).

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "pseg/features.hpp"
#include "pseg/image.hpp"
#include "pseg/inference.hpp"
#include "pseg/pairs.hpp"
#include "pseg/parametric.hpp"
#include "pseg/rng.hpp"
#include "pseg/stats.hpp"
#include "pseg/sweep.hpp"
#include "pseg/synthesis.hpp"

namespace {

using namespace pseg;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_threads = 0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Number of 4-connected components of each label and adjacency between labels.
struct Regions {
  std::vector<int> components;
  std::vector<int> sizes;
  std::vector<std::vector<bool>> adjacent;
};

Regions analyze_regions(const SegMap& seg) {
  const int n = seg.n, k = seg.k;
  Regions r;
  r.components.assign(k, 0);
  r.sizes.assign(k, 0);
  r.adjacent.assign(k, std::vector<bool>(k, false));
  std::vector<int> seen(static_cast<std::size_t>(n) * n, 0);
  for (int c = 0; c < n * n; ++c) {
    ++r.sizes[seg.labels[c]];
    const int x = c % n, y = c / n;
    if (x + 1 < n && seg.labels[c] != seg.labels[c + 1])
      r.adjacent[seg.labels[c]][seg.labels[c + 1]] = r.adjacent[seg.labels[c + 1]][seg.labels[c]] = true;
    if (y + 1 < n && seg.labels[c] != seg.labels[c + n])
      r.adjacent[seg.labels[c]][seg.labels[c + n]] = r.adjacent[seg.labels[c + n]][seg.labels[c]] = true;
    if (seen[c]) continue;
    ++r.components[seg.labels[c]];
    std::vector<int> stack{c};
    seen[c] = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      const int ax = a % n, ay = a / n;
      const int nb[4][2] = {{ax - 1, ay}, {ax + 1, ay}, {ax, ay - 1}, {ax, ay + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[1] < 0 || q[0] >= n || q[1] >= n) continue;
        const int b = q[1] * n + q[0];
        if (!seen[b] && seg.labels[b] == seg.labels[a]) {
          seen[b] = 1;
          stack.push_back(b);
        }
      }
    }
  }
  return r;
}

// Deterministic K-region map: every segment is one connected region of at
// least 15% of the cells and touches every other segment.
ProbMaps k_region_map(int k, int n, std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    MapGenParams g;
    g.k = k;
    g.n = n;
    g.sigma_amp = 5.0;
    g.xi = n / 4.0;
    g.seed = derive_seed(seed, attempt);
    ProbMaps gt = deterministic_maps(generate_probmaps(g));
    const Regions r = analyze_regions(argmax_segmap(gt));
    bool ok = true;
    for (int a = 0; a < k && ok; ++a) {
      ok = r.components[a] == 1 && r.sizes[a] >= 0.15 * n * n;
      for (int b = 0; b < k && ok; ++b) ok = a == b || r.adjacent[a][b];
    }
    if (ok) return gt;
  }
}

// ------------------------------------------------------------------ 1

Outcome loss_equivalence() {
  const auto t0 = Clock::now();
  MapGenParams g;
  g.k = 3;
  g.n = 20;
  g.sigma_amp = 1.0;
  g.xi = 2.0;
  g.seed = 101;
  const ProbMaps gt = generate_probmaps(g);
  const PairSet pairs = sample_pairset(GridSpec(20), 3, Coverage::KPerPixel, 102);
  const ResponseDataset d = simulate_responses(gt, pairs, 10, 103);
  FitConfig cfg;
  cfg.seed = 104;
  cfg.loss = LossKind::BCE;
  const FitResult bce = fit_nonparametric(d, 3, cfg);
  cfg.loss = LossKind::SE;
  const FitResult se = fit_nonparametric(d, 3, cfg);
  const double diff = mae_aligned(bce.maps, se.maps);
  const double secs = seconds_since(t0);
  const bool pass = diff < 0.02 && bce.stationarity_gap < 0.05 && se.stationarity_gap < 0.05 && secs < 120.0;
  return {pass, fmt("BCE vs SE MAE %.4f (<0.02), gaps BCE %.4f SE %.4f (<0.05), %.1f s", diff,
                    bce.stationarity_gap, se.stationarity_gap, secs)};
}

// ------------------------------------------------------------------ 2

Outcome deterministic_recovery() {
  const int k = 3, n = 10, seeds = 50;
  std::vector<int> errors(seeds, 0);
  parallel_for(seeds, g_threads, [&](int s) {
    const ProbMaps gt = k_region_map(k, n, derive_seed(200, s, 0));
    const PairSet pairs = sample_pairset(GridSpec(n), k, Coverage::Minimal, derive_seed(200, s, 1));
    const ResponseDataset d = simulate_responses(gt, pairs, 1, derive_seed(200, s, 2));
    FitConfig cfg;
    cfg.seed = derive_seed(200, s, 3);
    const FitResult fit = fit_nonparametric(d, k, cfg);
    const SegMap got = argmax_segmap(permute_segments(fit.maps, align_labels(fit.maps, gt)));
    const SegMap want = argmax_segmap(gt);
    for (int c = 0; c < n * n; ++c) errors[s] += got.labels[c] != want.labels[c];
  });
  const int exact = static_cast<int>(std::count(errors.begin(), errors.end(), 0));
  const int worst = *std::max_element(errors.begin(), errors.end());
  return {exact == seeds, fmt("%d/%d seeds exact (K=3, N=10), worst %d cell errors", exact, seeds, worst)};
}

// ------------------------------------------------------------------ 3

Outcome regularization_benefit() {
  const auto t0 = Clock::now();
  SweepConfig cfg;
  cfg.axis = SweepAxis::Blocks;
  cfg.levels = {1, 4, 16, 64};
  cfg.resamples = 50;
  cfg.seed = 300;
  cfg.gt.k = 3;
  cfg.gt.n = 20;
  cfg.gt.sigma_amp = 1.0;
  cfg.gt.xi = 2.0;
  cfg.threads = g_threads;
  FitConfig plain;
  FitConfig reg;
  reg.lambda = 10.0;
  cfg.conditions = {{"lambda=0", plain}, {"lambda=10", reg}};
  const SweepTable t = run_sweep(cfg);
  bool pass = true;
  std::ostringstream os;
  for (std::size_t i = 0; i + 1 < t.summary.size(); i += 2) {
    const double ratio = t.summary[i + 1].mae_mean / t.summary[i].mae_mean;
    pass = pass && ratio <= 0.5 && t.summary[i].n_failed == 0 && t.summary[i + 1].n_failed == 0;
    os << fmt("Nb=%g %.3f/%.3f=%.2f ", t.summary[i].level, t.summary[i + 1].mae_mean, t.summary[i].mae_mean, ratio);
  }
  const double secs = seconds_since(t0);
  pass = pass && secs < 900.0;
  return {pass, os.str() + fmt("(ratio <=0.5), %.0f s", secs)};
}

// ------------------------------------------------------------------ 4

Outcome unknown_k() {
  const int n = 20, blocks = 10;
  // Moderate uncertainty; all five segments present with at least 10% mass.
  MapGenParams g;
  g.k = 5;
  g.n = n;
  g.sigma_amp = 1.5;
  g.xi = 3.0;
  g.seed = 400;
  ProbMaps gt = generate_probmaps(g);
  auto smallest = [](const ProbMaps& p) {
    const auto m = segment_mass(p);
    return *std::min_element(m.begin(), m.end());
  };
  while (smallest(gt) < 0.1) {
    ++g.seed;
    gt = generate_probmaps(g);
  }
  const PairSet pairs = sample_pairset(GridSpec(n), 5, Coverage::KPerPixel, 401);
  const ResponseDataset d = simulate_responses(gt, pairs, blocks, 402);
  const std::vector<int> fit_ks{3, 4, 6, 7};
  std::vector<std::vector<double>> masses(fit_ks.size());
  parallel_for(static_cast<int>(fit_ks.size()), g_threads, [&](int i) {
    FitConfig cfg;
    cfg.lambda = 10.0;
    cfg.seed = 403;
    masses[i] = segment_mass(fit_nonparametric(d, fit_ks[i], cfg).maps);
    std::sort(masses[i].begin(), masses[i].end());
  });
  bool pass = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < fit_ks.size(); ++i) {
    const int k = fit_ks[i];
    if (k > 5) {
      const double worst = masses[i][k - 6];
      pass = pass && worst < 1e-2;
      os << fmt("K=%d largest superfluous mass %.2e (<1e-2); ", k, worst);
    } else {
      pass = pass && masses[i][0] >= 1e-2;
      os << fmt("K=%d smallest mass %.3f (>=1e-2); ", k, masses[i][0]);
    }
  }
  std::string s = os.str();
  return {pass, s.substr(0, s.size() - 2)};
}

// ------------------------------------------------------------------ 5

Outcome uncertainty_tracking() {
  const int reps = 20;
  int detected = 0;
  double gt_gap = 0.0;
  for (int r = 0; r < reps; ++r) {
    UncertaintyStudyConfig cfg;
    cfg.levels = {0.5, 3.0};
    cfg.participants = 15;
    cfg.seed = derive_seed(500, r);
    cfg.threads = g_threads;
    const UncertaintyStudyResult res = uncertainty_study(cfg);
    const double gap = res.levels.front().gt_entropy - res.levels.back().gt_entropy;
    if (r == 0 || gap < gt_gap) gt_gap = gap;
    // Larger amplitude gives lower entropy, so the test statistic must be negative.
    if (gap >= 0.3 && res.test && res.test->p < 0.05 && res.test->t < 0.0) ++detected;
  }
  const bool pass = detected >= 16 && gt_gap >= 0.3;
  return {pass, fmt("ordering detected in %d/%d repetitions (>=16), min GT entropy gap %.3f nats (>=0.3)", detected,
                    reps, gt_gap)};
}

// ------------------------------------------------------------------ 6

// Random counts on a 4x4 grid covering all pairs of an instance.
AggregatedCounts random_counts(int n, Rng& rng) {
  std::vector<PairCount> entries;
  const int cells = n * n;
  for (int t = 0; t < 3 * cells; ++t) {
    int i = rng.index(cells), j = rng.index(cells - 1);
    if (j >= i) ++j;
    PairCount pc;
    pc.pair = CellPair::make(i, j);
    if (std::any_of(entries.begin(), entries.end(), [&](const PairCount& e) { return e.pair == pc.pair; })) continue;
    pc.n_obs = 1 + rng.index(10);
    pc.same = rng.index(pc.n_obs + 1);
    entries.push_back(pc);
  }
  return AggregatedCounts(std::move(entries));
}

MapTensor random_interior_maps(int k, int n, Rng& rng) {
  MapTensor p(k, n);
  for (int c = 0; c < n * n; ++c) {
    double s = 0.0;
    for (int q = 0; q < k; ++q) s += p(q, c) = 0.2 + rng.uniform();
    for (int q = 0; q < k; ++q) p(q, c) /= s;
  }
  return p;
}

double fd_relative_error(const Objective& obj, const MapTensor& p) {
  const MapTensor g = obj.gradient(p);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.values().size(); ++i) {
    const double h = 1e-6;
    MapTensor a = p, b = p;
    a.values()[i] += h;
    b.values()[i] -= h;
    const double fd = (obj.value(a) - obj.value(b)) / (2.0 * h);
    num += (g.values()[i] - fd) * (g.values()[i] - fd);
    den += fd * fd;
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

Outcome gradient_suite() {
  const int n = 4, k = 3, instances = 100;
  double worst = 0.0;
  Rng rng(600);
  for (int t = 0; t < instances; ++t) {
    const AggregatedCounts counts = random_counts(n, rng);
    const MapTensor p = random_interior_maps(k, n, rng);
    const double lambda = rng.uniform(0.0, 20.0);
    const int width = 1 + rng.index(2);
    for (LossKind loss : {LossKind::BCE, LossKind::SE})
      worst = std::max(worst, fd_relative_error(Objective(counts, n, loss, lambda, width), p));
  }
  return {worst < 1e-5, fmt("worst relative error %.2e over %d instances x {BCE, SE} (<1e-5)", worst, instances)};
}

// ------------------------------------------------------------------ 7

Outcome simplex_invariant() {
  double worst_sum = 0.0, most_negative = 0.0;
  long iterates = 0;
  int fits = 0;
  for (LossKind loss : {LossKind::BCE, LossKind::SE})
    for (double lambda : {0.0, 10.0}) {
      MapGenParams g;
      g.k = 3;
      g.n = 12;
      g.seed = 700 + fits;
      const ProbMaps gt = generate_probmaps(g);
      const ResponseDataset d =
          simulate_responses(gt, sample_pairset(GridSpec(12), 3, Coverage::KPerPixel, 710 + fits), 4, 720 + fits);
      FitConfig cfg;
      cfg.loss = loss;
      cfg.lambda = lambda;
      cfg.seed = 730 + fits;
      fit_nonparametric(d, 3, cfg, [&](int, const MapTensor& p, double) {
        ++iterates;
        for (int c = 0; c < p.cells(); ++c) {
          double s = 0.0;
          for (double v : p.cell(c)) {
            s += v;
            most_negative = std::min(most_negative, v);
          }
          worst_sum = std::max(worst_sum, std::abs(s - 1.0));
        }
      });
      ++fits;
    }
  const bool pass = worst_sum <= 1e-12 && most_negative >= 0.0 && iterates > 0;
  return {pass, fmt("%ld iterates over %d fits: max |sum-1| %.2e (<=1e-12), min entry %.2e (>=0)", iterates, fits,
                    worst_sum, most_negative)};
}

// ------------------------------------------------------------------ 8

Outcome parametric_rgb() {
  const int n = 48, k = 3, cell_px = 4;
  const double noise = 0.1;
  const ProbMaps gt = k_region_map(k, n, 800);
  const std::vector<Rgb> palette{{0.75, 0.35, 0.35}, {0.35, 0.7, 0.4}, {0.4, 0.4, 0.75}};
  const RgbImage img = synthesize_rgb_clusters(gt, palette, noise, 801, cell_px);
  const GridSpec grid(n, n * cell_px);
  const FeatureMaps x = rgb_features(img, grid);
  const PairSet pairs = sample_pairset(grid, k, Coverage::KPerPixel, 802);
  const ResponseDataset d = simulate_responses(gt, pairs, 10, 803, grid);
  FitConfig cfg;
  cfg.lambda = 1.0;
  cfg.seed = 804;
  const ParametricFit fit = fit_parametric(d, x, k, cfg);
  const Permutation perm = align_labels(fit.result.maps, gt);
  const SegMap got = argmax_segmap(permute_segments(fit.result.maps, perm));
  const SegMap want = argmax_segmap(gt);
  int agree = 0;
  for (int c = 0; c < n * n; ++c) agree += got.labels[c] == want.labels[c];
  const double agreement = static_cast<double>(agree) / (n * n);

  // Mean feature vector of the cells assigned to each fitted segment.
  double worst_z = 0.0;
  for (int q = 0; q < k; ++q)
    for (int ch = 0; ch < 3; ++ch) {
      std::vector<double> v;
      for (int c = 0; c < n * n; ++c)
        if (got.labels[c] == q) v.push_back(x(c, ch));
      if (v.size() < 2) {
        worst_z = INFINITY;
        continue;
      }
      const double se = std::sqrt(variance(v) / v.size());
      worst_z = std::max(worst_z, std::abs(mean(v) - palette[q][ch]) / se);
    }
  const bool pass = agreement >= 0.95 && worst_z <= 3.0;
  return {pass, fmt("label agreement %.4f (>=0.95), worst feature deviation %.2f SE (<=3)", agreement, worst_z)};
}

// ------------------------------------------------------------------ 9

struct OrientationRun {
  int target = 0;
  int peak = 0;
  double correlation = 0.0;
  double fwhm = 0.0;
};

// Full width at half maximum of the bump around `peak`, in bands, with
// linear interpolation of the half-height crossings (circular axis).
double fwhm(const std::vector<double>& w, int peak) {
  const int d = static_cast<int>(w.size());
  const double base = *std::min_element(w.begin(), w.end());
  const double half = base + 0.5 * (w[peak] - base);
  auto side = [&](int dir) {
    for (int s = 1; s < d; ++s) {
      const double a = w[((peak + dir * (s - 1)) % d + d) % d];
      const double b = w[((peak + dir * s) % d + d) % d];
      if (b <= half) return s - 1 + (a - half) / (a - b);
    }
    return static_cast<double>(d) / 2.0;
  };
  return side(1) + side(-1);
}

OrientationRun orientation_run(UncertaintyPreset preset, std::uint64_t seed) {
  const int n = 16, px = 256, k = 2;
  const GridSpec grid(n, px);
  const ProbMaps layout = k_region_map(k, n, derive_seed(seed, 0));
  TextureParams tp = texture_preset(preset);
  tp.units = FrequencyUnits::CyclesPerImage;
  tp.mode = 32.0;
  tp.theta0_deg = {85.0, 95.0};
  tp.seed = derive_seed(seed, 1);
  const FeatureMaps x = wavelet_energy_features(synthesize_texture(layout, tp, px), grid);

  // Ideal observer: per-band variances of each segment measured on
  // single-segment textures of the same parameters.
  VarianceParams truth(k, x.d);
  for (int q = 0; q < k; ++q) {
    std::vector<int> labels(grid.cells(), q);
    TextureParams pure = tp;
    pure.seed = derive_seed(seed, 2, q);
    const FeatureMaps e = wavelet_energy_features(
        synthesize_texture(ProbMaps::one_hot(k, n, labels), pure, px), grid);
    for (int j = 0; j < x.d; ++j) {
      double s = 0.0;
      for (int c = 0; c < grid.cells(); ++c) s += e(c, j);
      truth.s(q, j) = std::sqrt(s / grid.cells());
    }
  }
  const ProbMaps observer = logistic_probmaps(variance_reparam(truth), x);
  const ResponseDataset d =
      simulate_responses(observer, sample_pairset(grid, k, Coverage::KPerPixel, derive_seed(seed, 3)), 10,
                         derive_seed(seed, 4), grid);
  FitConfig cfg;
  cfg.seed = derive_seed(seed, 5);
  ParametricOptions opt;
  opt.model = ParamModel::Variance;
  const ParametricFit fit = fit_parametric(d, x, k, cfg, opt);
  // Differential variance sigma_1^2 - sigma_2^2 per band, fitted and true.
  const VarianceParams& fv = *fit.variance;
  const bool swapped = align_labels(fit.result.maps, observer)[0] != 0;
  std::vector<double> w(x.d), ref(x.d);
  for (int j = 0; j < x.d; ++j) {
    w[j] = fv.s(0, j) * fv.s(0, j) - fv.s(1, j) * fv.s(1, j);
    if (swapped) w[j] = -w[j];
    ref[j] = truth.s(0, j) * truth.s(0, j) - truth.s(1, j) * truth.s(1, j);
  }

  OrientationRun r;
  r.target = static_cast<int>(std::max_element(ref.begin(), ref.end()) - ref.begin());
  r.peak = static_cast<int>(std::max_element(w.begin(), w.end()) - w.begin());
  const double mw = mean(w), mr = mean(ref);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    sxy += (w[j] - mw) * (ref[j] - mr);
    sxx += (w[j] - mw) * (w[j] - mw);
    syy += (ref[j] - mr) * (ref[j] - mr);
  }
  r.correlation = sxy / std::sqrt(sxx * syy);
  r.fwhm = fwhm(w, r.peak);
  return r;
}

Outcome orientation_weights() {
  OrientationRun runs[2];
  parallel_for(2, g_threads, [&](int i) {
    runs[i] = orientation_run(i == 0 ? UncertaintyPreset::Low : UncertaintyPreset::High, 900);
  });
  auto band_ok = [](const OrientationRun& r) { return std::abs(r.peak - r.target) <= 1; };
  const bool pass = band_ok(runs[0]) && band_ok(runs[1]) && runs[0].correlation > 0.9 &&
                    runs[1].correlation > 0.9 && runs[1].fwhm > runs[0].fwhm;
  return {pass, fmt("low/high: peak band %d/%d (true %d/%d, +-1), correlation %.3f/%.3f (>0.9), FWHM %.2f < %.2f",
                    runs[0].peak, runs[1].peak, runs[0].target, runs[1].target, runs[0].correlation,
                    runs[1].correlation, runs[0].fwhm, runs[1].fwhm)};
}

// ------------------------------------------------------------------ 10

Outcome synthesis_regressions() {
  const double sr = lognormal_sigma_r(2.0);
  const int px = 256, n = 16;
  MapGenParams g;
  g.k = 2;
  g.n = n;
  g.seed = 1000;
  const ProbMaps layout = deterministic_maps(generate_probmaps(g));
  TextureParams tp;
  tp.seed = 1001;
  const GrayImage img = synthesize_texture(layout, tp, px);
  const double r0 = make_texture_kernel(0.0, tp.sigma_theta_deg, tp.mode_cycles_per_px(px), tp.bandwidth_oct).r0;
  const double mode = radial_spectral_mode(img);
  const double rms = contrast(img).rms;
  const bool pass = std::abs(sr - 0.6436) <= 1e-4 && std::abs(mode - r0) <= 0.1 * r0 &&
                    std::abs(rms - 35.0) <= 0.02 * 35.0;
  return {pass, fmt("sigma_r(2) %.5f (0.6436+-1e-4), spectral mode %.4f vs r0 %.4f c/px (10%%), RMS %.2f (35+-2%%)",
                    sr, mode, r0, rms)};
}

// ------------------------------------------------------------------ 11

Outcome resolution_study() {
  SweepConfig cfg;
  cfg.axis = SweepAxis::Resolution;
  cfg.levels = {8, 16, 32};
  cfg.gt_n = 64;
  cfg.resamples = 20;
  cfg.seed = 1100;
  cfg.gt.k = 3;
  cfg.gt.sigma_amp = 1.0;
  cfg.gt.xi = 8.0;
  cfg.threads = g_threads;
  FitConfig plain;
  FitConfig reg;
  reg.lambda = 10.0;
  FitConfig wide = reg;
  wide.kernel_width = 2;
  cfg.conditions = {{"lambda=0", plain}, {"lambda=10", reg}, {"lambda=10,w=2", wide}};
  const SweepTable t = run_sweep(cfg);
  bool pass = true;
  std::ostringstream os;
  for (std::size_t i = 0; i + 2 < t.summary.size(); i += 3) {
    const auto& a = t.summary[i];
    const auto& b = t.summary[i + 1];
    const auto& c = t.summary[i + 2];
    pass = pass && b.mae_mean < a.mae_mean;
    os << fmt("N=%g reg %.3f < plain %.3f; ", a.level, b.mae_mean, a.mae_mean);
    if (a.level == 32) {
      pass = pass && c.mae_mean < b.mae_mean;
      os << fmt("N=32 wide %.3f < 3x3 %.3f; ", c.mae_mean, b.mae_mean);
    }
  }
  std::string s = os.str();
  return {pass, s.substr(0, s.size() - 2)};
}

// ------------------------------------------------------------------ 12

Outcome pair_counts() {
  const long a = pair_count(2, 11, Coverage::KPerPixel);
  const long b = pair_count(5, 16, Coverage::Minimal);
  const long sa = static_cast<long>(sample_pairset(GridSpec(11), 2, Coverage::KPerPixel, 1200).size());
  const long sb = static_cast<long>(sample_pairset(GridSpec(16), 5, Coverage::Minimal, 1201).size());
  const bool pass = a == 242 && b == 1024 && sa == 242 && sb == 1024;
  return {pass, fmt("KN^2 K=2 N=11: %ld (242), (K-1)N^2 K=5 N=16: %ld (1024), sampled %ld/%ld", a, b, sa, sb)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseg acceptance suite"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--threads", g_threads, "Worker threads (0 = hardware concurrency)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "loss equivalence", loss_equivalence},
      {2, "deterministic recovery", deterministic_recovery},
      {3, "regularization benefit", regularization_benefit},
      {4, "unknown-K nulling", unknown_k},
      {5, "uncertainty tracking", uncertainty_tracking},
      {6, "gradient suite", gradient_suite},
      {7, "simplex invariant", simplex_invariant},
      {8, "parametric RGB", parametric_rgb},
      {9, "orientation-weight recovery", orientation_weights},
      {10, "synthesis regressions", synthesis_regressions},
      {11, "resolution study", resolution_study},
      {12, "pair-count arithmetic", pair_counts},
  };
  int failures = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] AC%-2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
