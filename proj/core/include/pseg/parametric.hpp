#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pseg/inference.hpp"

namespace pseg {

/// D-dimensional feature vector per grid cell, stored cell-major.
struct FeatureMaps {
  int n = 0;
  int d = 0;
  std::vector<double> values;  // values[cell * d + j]

  FeatureMaps() = default;
  FeatureMaps(int n, int d, double fill = 0.0);

  int cells() const noexcept { return n * n; }
  double& operator()(int cell, int j) noexcept { return values[static_cast<std::size_t>(cell) * d + j]; }
  double operator()(int cell, int j) const noexcept { return values[static_cast<std::size_t>(cell) * d + j]; }
  std::span<const double> cell(int c) const noexcept {
    return {values.data() + static_cast<std::size_t>(c) * d, static_cast<std::size_t>(d)};
  }
  /// Throws ContractError on a shape mismatch or non-finite entry.
  void validate() const;
};

/// p_i[k] = softmax_k(<omega_k, x_i> + beta_k).
struct LogisticParams {
  int k = 0;
  int d = 0;
  std::vector<double> omega;  // omega[seg * d + j]
  std::vector<double> beta;   // beta[seg]

  LogisticParams() = default;
  LogisticParams(int k, int d) : k(k), d(d), omega(static_cast<std::size_t>(k) * d, 0.0), beta(k, 0.0) {}
  double& w(int seg, int j) noexcept { return omega[static_cast<std::size_t>(seg) * d + j]; }
  double w(int seg, int j) const noexcept { return omega[static_cast<std::size_t>(seg) * d + j]; }
};

/// Per-segment, per-feature standard deviations; omega = -1/sigma^2, beta = 0.
struct VarianceParams {
  int k = 0;
  int d = 0;
  std::vector<double> sigma;  // sigma[seg * d + j] > 0

  VarianceParams() = default;
  VarianceParams(int k, int d, double fill = 1.0) : k(k), d(d), sigma(static_cast<std::size_t>(k) * d, fill) {}
  double& s(int seg, int j) noexcept { return sigma[static_cast<std::size_t>(seg) * d + j]; }
  double s(int seg, int j) const noexcept { return sigma[static_cast<std::size_t>(seg) * d + j]; }
};

enum class ParamModel { Logistic, Variance };

const char* to_string(ParamModel m) noexcept;
ParamModel parse_param_model(const std::string& name);

ProbMaps logistic_probmaps(const LogisticParams& params, const FeatureMaps& features);
LogisticParams variance_reparam(const VarianceParams& v);
/// omega_1 - omega_2 = (sigma_1^2 - sigma_2^2) / (sigma_1^2 sigma_2^2), per feature. Requires K = 2.
std::vector<double> differential_variance(const VarianceParams& v);

/// Loss of the maps generated by a parameter vector.
///
/// Logistic layout: omega (k*d, segment-major) then beta (k).
/// Variance layout: log sigma (k*d, segment-major).
class ParametricObjective {
 public:
  ParametricObjective(Objective objective, FeatureMaps features, int k, ParamModel model);

  int dimension() const noexcept;
  double evaluate(const std::vector<double>& theta, std::vector<double>& grad) const;
  LogisticParams logistic(const std::vector<double>& theta) const;
  VarianceParams variance(const std::vector<double>& theta) const;
  MapTensor maps(const std::vector<double>& theta) const;
  /// Seeded starting point.
  std::vector<double> initial(std::uint64_t seed) const;

  const Objective& objective() const noexcept { return obj_; }
  ParamModel model() const noexcept { return model_; }

 private:
  Objective obj_;
  FeatureMaps x_;
  int k_;
  ParamModel model_;
  std::vector<double> mean_, sd_;
};

struct ParametricOptions {
  ParamModel model = ParamModel::Logistic;
  int restarts = 5;
  int memory = 10;
};

struct ParametricFit {
  ParamModel model = ParamModel::Logistic;
  LogisticParams logistic;
  std::optional<VarianceParams> variance;
  FitResult result;
  int best_restart = 0;
  std::vector<double> restart_losses;
};

/// Minimizes the configured loss (plus spatial penalty) over model
/// parameters with L-BFGS from `restarts` seeded starting points, keeping
/// the lowest final loss (ties go to the lower restart index). Restarts
/// run concurrently.
ParametricFit fit_parametric(const AggregatedCounts& counts, const FeatureMaps& features, int k,
                             const FitConfig& cfg, const ParametricOptions& opt = {});
ParametricFit fit_parametric(const ResponseDataset& d, const FeatureMaps& features, int k, const FitConfig& cfg,
                             const ParametricOptions& opt = {});

}  // namespace pseg
