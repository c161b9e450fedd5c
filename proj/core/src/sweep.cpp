#include "pseg/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pseg/errors.hpp"
#include "pseg/rng.hpp"

namespace pseg {

const char* to_string(SweepAxis a) noexcept {
  switch (a) {
    case SweepAxis::Blocks: return "blocks";
    case SweepAxis::Uncertainty: return "uncertainty";
    case SweepAxis::Resolution: return "resolution";
    case SweepAxis::K: return "k";
  }
  return "?";
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "blocks") return SweepAxis::Blocks;
  if (name == "uncertainty") return SweepAxis::Uncertainty;
  if (name == "resolution") return SweepAxis::Resolution;
  if (name == "k") return SweepAxis::K;
  throw ContractError("unknown sweep axis '" + name + "' (expected blocks, uncertainty, resolution or k)");
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void SweepConfig::validate() const {
  detail::require(!levels.empty(), "sweep needs at least one level");
  detail::require(resamples >= 2, "sweep needs at least 2 resamples");
  detail::require(!conditions.empty(), "sweep needs at least one fit condition");
  detail::require(n_blocks >= 1, "sweep needs n_blocks >= 1");
  detail::require(ci_level > 0.0 && ci_level < 1.0, "ci_level must be in (0, 1)");
  gt.validate();
  for (const auto& c : conditions) c.fit.validate();
  for (double l : levels) {
    switch (axis) {
      case SweepAxis::Blocks:
        detail::require(l >= 1 && l == std::floor(l), "blocks levels must be positive integers");
        break;
      case SweepAxis::Uncertainty:
        detail::require(l > 0.0, "uncertainty levels must be > 0");
        break;
      case SweepAxis::Resolution:
        detail::require(l >= 3 && l == std::floor(l) && gt_n % static_cast<int>(l) == 0,
                        "resolution levels must be integers >= 3 dividing gt_n");
        break;
      case SweepAxis::K:
        detail::require(l >= 2 && l == std::floor(l), "k levels must be integers >= 2");
        break;
    }
  }
}

ProbMaps subsample_maps(const ProbMaps& p, int n) {
  detail::require(n >= 1 && p.n() % n == 0, "subsample_maps: target size must divide the source size");
  const int s = p.n() / n;
  MapTensor t(p.k(), n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const int src = (s * y + s / 2) * p.n() + (s * x + s / 2);
      for (int k = 0; k < p.k(); ++k) t(k, y * n + x) = p(k, src);
    }
  return ProbMaps(std::move(t));
}

ProbMaps sweep_ground_truth(const SweepConfig& cfg, double level) {
  MapGenParams g = cfg.gt;
  g.seed = derive_seed(cfg.seed, 0);
  if (cfg.axis == SweepAxis::Uncertainty) g.sigma_amp = level;
  if (cfg.axis == SweepAxis::Resolution) g.n = cfg.gt_n;
  ProbMaps p = generate_probmaps(g);
  if (cfg.deterministic_gt) p = deterministic_maps(p);
  if (cfg.axis == SweepAxis::Resolution) p = subsample_maps(p, static_cast<int>(level));
  return p;
}

SweepTable run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const int n_levels = static_cast<int>(cfg.levels.size());
  const int n_cond = static_cast<int>(cfg.conditions.size());

  std::vector<ProbMaps> gts;
  for (double l : cfg.levels) gts.push_back(sweep_ground_truth(cfg, l));

  SweepTable table;
  table.rows.resize(static_cast<std::size_t>(n_levels) * cfg.resamples * n_cond);
  const int tasks = n_levels * cfg.resamples;
  parallel_for(tasks, cfg.threads, [&](int task) {
    const int li = task / cfg.resamples;
    const int r = task % cfg.resamples;
    const double level = cfg.levels[li];
    const ProbMaps& gt = gts[li];
    const int n_blocks = cfg.axis == SweepAxis::Blocks ? static_cast<int>(level) : cfg.n_blocks;
    const int fit_k = cfg.axis == SweepAxis::K ? static_cast<int>(level) : (cfg.fit_k > 0 ? cfg.fit_k : gt.k());
    const std::uint64_t data_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(li) + 1, r);

    const GridSpec grid(gt.n());
    const PairSet pairs = sample_pairset(grid, gt.k(), cfg.coverage, derive_seed(data_seed, 0));
    const ResponseDataset data = simulate_responses(gt, pairs, n_blocks, derive_seed(data_seed, 1));
    const AggregatedCounts counts = aggregate_responses(data);

    for (int c = 0; c < n_cond; ++c) {
      SweepRow& row = table.rows[(static_cast<std::size_t>(task)) * n_cond + c];
      row.level = level;
      row.condition = cfg.conditions[c].name;
      row.resample = r;
      try {
        FitConfig fc = cfg.conditions[c].fit;
        fc.seed = derive_seed(data_seed, 2);
        const FitResult fit = fit_nonparametric(counts, gt.n(), fit_k, fc);
        const int kk = std::max(fit_k, gt.k());
        row.mae = mae_aligned(pad_segments(fit.maps, kk), pad_segments(gt, kk), std::max(8, kk));
        row.mean_entropy = mean_entropy(fit.maps).mean;
        row.iterations = fit.iterations;
        row.converged = fit.converged;
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
    }
  });

  for (int li = 0; li < n_levels; ++li)
    for (int c = 0; c < n_cond; ++c) {
      SweepSummary s;
      s.level = cfg.levels[li];
      s.condition = cfg.conditions[c].name;
      std::vector<double> maes;
      for (int r = 0; r < cfg.resamples; ++r) {
        const SweepRow& row = table.rows[(static_cast<std::size_t>(li) * cfg.resamples + r) * n_cond + c];
        if (row.failed)
          ++s.n_failed;
        else
          maes.push_back(row.mae);
      }
      s.n_ok = static_cast<int>(maes.size());
      if (!maes.empty()) {
        s.mae_mean = mean(maes);
        const Interval ci = percentile_interval(maes, cfg.ci_level);
        s.ci_low = ci.low;
        s.ci_high = ci.high;
      } else {
        s.mae_mean = s.ci_low = s.ci_high = std::nan("");
      }
      table.summary.push_back(s);
    }
  return table;
}

void UncertaintyStudyConfig::validate() const {
  detail::require(levels.size() >= 2, "uncertainty study needs at least 2 levels");
  detail::require(participants >= 2, "uncertainty study needs at least 2 participants per level");
  detail::require(k >= 2 && n >= 3 && n_blocks >= 1 && xi > 0.0, "uncertainty study: bad experiment parameters");
  for (double l : levels) detail::require(l > 0.0, "uncertainty levels must be > 0");
  fit.validate();
}

UncertaintyStudyResult uncertainty_study(const UncertaintyStudyConfig& cfg) {
  cfg.validate();
  const int n_levels = static_cast<int>(cfg.levels.size());
  UncertaintyStudyResult out;
  std::vector<ProbMaps> gts;
  for (double s : cfg.levels) {
    MapGenParams g;
    g.k = cfg.k;
    g.n = cfg.n;
    g.xi = cfg.xi;
    g.sigma_amp = s;
    g.seed = derive_seed(cfg.seed, 0);
    gts.push_back(generate_probmaps(g));
    UncertaintyLevel lv;
    lv.sigma_amp = s;
    lv.gt_entropy = mean_entropy(gts.back()).mean;
    lv.participant_entropy.assign(cfg.participants, 0.0);
    out.levels.push_back(std::move(lv));
  }

  parallel_for(n_levels * cfg.participants, cfg.threads, [&](int task) {
    const int li = task / cfg.participants;
    const int pi = task % cfg.participants;
    const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(li) + 1, pi);
    const GridSpec grid(cfg.n);
    const PairSet pairs = sample_pairset(grid, cfg.k, cfg.coverage, derive_seed(s, 0));
    const ResponseDataset data = simulate_responses(gts[li], pairs, cfg.n_blocks, derive_seed(s, 1));
    FitConfig fc = cfg.fit;
    fc.seed = derive_seed(s, 2);
    const FitResult fit = fit_nonparametric(data, cfg.k, fc);
    out.levels[li].participant_entropy[pi] = mean_entropy(fit.maps).mean;
  });

  for (auto& lv : out.levels) lv.mean = mean(lv.participant_entropy);
  try {
    out.test = welch_test(out.levels.back().participant_entropy, out.levels.front().participant_entropy);
  } catch (const ContractError& e) {
    out.degenerate = true;
    out.note = e.what();
  }
  if (!out.degenerate && out.levels.front().gt_entropy < 1e-9 && out.levels.back().gt_entropy < 1e-9) {
    out.degenerate = true;
    out.note = "ground truth is deterministic at both extreme levels";
  }
  return out;
}

}  // namespace pseg
