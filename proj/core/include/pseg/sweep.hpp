#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pseg/inference.hpp"
#include "pseg/pairs.hpp"
#include "pseg/stats.hpp"
#include "pseg/synthesis.hpp"

namespace pseg {

enum class SweepAxis {
  Blocks,       // level = number of blocks
  Uncertainty,  // level = sigma_amp of the ground truth
  Resolution,   // level = grid size n, subsampled from a gt_n ground truth
  K,            // level = number of fitted segments
};

const char* to_string(SweepAxis a) noexcept;
SweepAxis parse_sweep_axis(const std::string& name);

struct FitCondition {
  std::string name;
  FitConfig fit;
};

struct SweepConfig {
  SweepAxis axis = SweepAxis::Blocks;
  std::vector<double> levels;
  int resamples = 100;
  std::vector<FitCondition> conditions;
  std::uint64_t seed = 0;

  // Ground truth and experiment defaults; the swept axis overrides one of them.
  MapGenParams gt;                 // k, n, sigma_amp, xi (gt.seed is ignored)
  bool deterministic_gt = false;   // argmax the generated maps
  int gt_n = 64;                   // ground-truth size for the resolution axis
  int n_blocks = 10;
  Coverage coverage = Coverage::KPerPixel;
  int fit_k = 0;                   // 0 -> gt.k
  int threads = 0;                 // 0 -> hardware concurrency
  double ci_level = 0.95;

  void validate() const;
};

struct SweepRow {
  double level = 0.0;
  std::string condition;
  int resample = 0;
  double mae = 0.0;
  double mean_entropy = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::string error;
};

struct SweepSummary {
  double level = 0.0;
  std::string condition;
  double mae_mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_ok = 0;
  int n_failed = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;        // level-major, then resample, then condition
  std::vector<SweepSummary> summary; // level-major, then condition
};

/// Ground truth used for one level of a sweep. The field seed is fixed for
/// the whole sweep so levels differ only in the swept parameter.
ProbMaps sweep_ground_truth(const SweepConfig& cfg, double level);

/// Subsamples an N x N map to n x n by taking cell (s x + s/2, s y + s/2), s = N / n.
ProbMaps subsample_maps(const ProbMaps& p, int n);

/// For every level and resample: draw a pair set, simulate responses, fit
/// every condition on the same data, and record the aligned MAE against
/// the ground truth. Summary rows give the mean MAE and the percentile
/// interval over resamples. Failed fits are kept as flagged rows.
SweepTable run_sweep(const SweepConfig& cfg);

struct UncertaintyStudyConfig {
  std::vector<double> levels;  // sigma_amp per level
  int participants = 15;
  int k = 2;
  int n = 11;
  double xi = 2.0;
  int n_blocks = 5;
  Coverage coverage = Coverage::KPerPixel;
  FitConfig fit;               // lambda 0 by default
  std::uint64_t seed = 0;
  int threads = 0;

  void validate() const;
};

struct UncertaintyLevel {
  double sigma_amp = 0.0;
  double gt_entropy = 0.0;
  std::vector<double> participant_entropy;
  double mean = 0.0;
};

struct UncertaintyStudyResult {
  std::vector<UncertaintyLevel> levels;
  std::optional<WelchResult> test;  // highest-level minus lowest-level participants
  bool degenerate = false;
  std::string note;
};

/// One ground-truth image per level (same field seed); each simulated
/// participant gets an independent pair set and responses, is fitted, and
/// contributes the mean entropy of the fitted maps.
UncertaintyStudyResult uncertainty_study(const UncertaintyStudyConfig& cfg);

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 -> hardware).
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace pseg
