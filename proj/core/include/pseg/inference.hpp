#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pseg/dataset.hpp"
#include "pseg/probmaps.hpp"
#include "pseg/regularizer.hpp"

namespace pseg {

enum class LossKind { BCE, SE };

const char* to_string(LossKind loss) noexcept;
LossKind parse_loss(const std::string& name);

struct FitConfig {
  LossKind loss = LossKind::SE;
  double lambda = 0.0;       // spatial penalty weight
  int kernel_width = 1;      // see RegKernel
  double learning_rate = 0.5;
  double epsilon = 1e-8;     // stop when |loss change| <= epsilon
  int max_iter = 5000;
  std::uint64_t seed = 0;
  double prob_clamp = 1e-7;  // BCE evaluates <p_i,p_j> clamped to [c, 1-c]

  /// Throws ContractError on out-of-range fields.
  void validate() const;
};

struct FitResult {
  ProbMaps maps;
  std::vector<double> loss_trace;  // iterations + 1 entries
  int iterations = 0;
  bool converged = false;
  double stationarity_gap = 0.0;
  int lr_halvings = 0;
  std::string diagnostic;
};

// Data terms. The BCE of a dataset equals the BCE of its aggregate, so both
// entry points share one implementation.
double bce_loss(const MapTensor& p, const AggregatedCounts& counts, double prob_clamp = 1e-7);
double bce_loss(const ProbMaps& p, const ResponseDataset& d, double prob_clamp = 1e-7);
double se_loss(const MapTensor& p, const AggregatedCounts& counts);
inline double se_loss(const ProbMaps& p, const AggregatedCounts& counts) { return se_loss(p.tensor(), counts); }

/// Gradient of bce_loss with respect to every p_u.
MapTensor grad_bce(const MapTensor& p, const AggregatedCounts& counts, double prob_clamp = 1e-7);
MapTensor grad_bce(const ProbMaps& p, const ResponseDataset& d, double prob_clamp = 1e-7);
/// Gradient of se_loss, plus the spatial-penalty gradient when lambda > 0.
MapTensor grad_se(const MapTensor& p, const AggregatedCounts& counts, double lambda = 0.0,
                  const RegKernel& kernel = RegKernel{});
inline MapTensor grad_se(const ProbMaps& p, const AggregatedCounts& counts, double lambda = 0.0,
                         const RegKernel& kernel = RegKernel{}) {
  return grad_se(p.tensor(), counts, lambda, kernel);
}

/// Data loss plus spatial penalty over probability maps.
class Objective {
 public:
  Objective(AggregatedCounts counts, int n, LossKind loss, double lambda, int kernel_width,
            double prob_clamp = 1e-7);

  double value(const MapTensor& p) const;
  /// Gradient with respect to the probabilities (no simplex projection).
  MapTensor gradient(const MapTensor& p) const;

  const AggregatedCounts& counts() const noexcept { return counts_; }
  LossKind loss() const noexcept { return loss_; }
  double lambda() const noexcept { return lambda_; }
  const RegKernel& kernel() const noexcept { return kernel_; }
  double prob_clamp() const noexcept { return clamp_; }

 private:
  AggregatedCounts counts_;
  LossKind loss_;
  double lambda_;
  RegKernel kernel_;
  double clamp_;
};

/// Called with the iterate after every multiplicative update.
using IterationObserver = std::function<void(int iteration, const MapTensor& p, double loss)>;

/// Uniform 1/K plus seeded jitter of amplitude 1e-3, renormalized.
MapTensor initial_maps(int k, int n, std::uint64_t seed);

/// Exponentiated-gradient descent on the simplex:
///   p <- p * exp(-lr * grad), then per-cell renormalization,
/// repeated while the loss changes by more than epsilon (at most max_iter).
///
/// If the loss stays above its best value for 20 consecutive iterations
/// (steady rises or a sustained oscillation), or settles on a plateau above
/// it, the best iterate is restored and the learning rate halved; a ninth
/// such episode stops the run with converged = false. The returned maps are
/// always the lowest-loss iterate.
/// Throws FitError on a non-finite loss, ContractError on k < 2 or an
/// empty dataset.
FitResult fit_nonparametric(const ResponseDataset& d, int k, const FitConfig& cfg,
                            const IterationObserver& observer = {});
FitResult fit_nonparametric(const AggregatedCounts& counts, int n, int k, const FitConfig& cfg,
                            const IterationObserver& observer = {});
/// Same algorithm from an explicit starting point.
FitResult fit_from(const Objective& objective, MapTensor start, const FitConfig& cfg,
                   const IterationObserver& observer = {});

struct StationarityReport {
  double gap = 0.0;  // max over observed pairs
  std::vector<std::pair<CellPair, double>> per_pair;  // |<p_i,p_j> - k_ij|
};

StationarityReport stationarity_report(const ProbMaps& p, const AggregatedCounts& counts);

}  // namespace pseg
