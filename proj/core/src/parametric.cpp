#include "pseg/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "pseg/errors.hpp"
#include "pseg/lbfgs.hpp"
#include "pseg/rng.hpp"

namespace pseg {

FeatureMaps::FeatureMaps(int n, int d, double fill)
    : n(n), d(d), values(static_cast<std::size_t>(n) * n * d, fill) {
  detail::require(n >= 1 && d >= 1, "FeatureMaps needs n >= 1 and d >= 1");
}

void FeatureMaps::validate() const {
  detail::require(n >= 1 && d >= 1, "FeatureMaps needs n >= 1 and d >= 1");
  detail::require(values.size() == static_cast<std::size_t>(n) * n * d, "FeatureMaps: size does not match n*n*d");
  for (double v : values) detail::require(std::isfinite(v), "FeatureMaps: non-finite entry");
}

const char* to_string(ParamModel m) noexcept { return m == ParamModel::Logistic ? "logistic" : "variance"; }

ParamModel parse_param_model(const std::string& name) {
  if (name == "logistic") return ParamModel::Logistic;
  if (name == "variance") return ParamModel::Variance;
  throw ContractError("unknown model '" + name + "' (expected logistic or variance)");
}

namespace {

void softmax_into(const LogisticParams& params, const FeatureMaps& x, MapTensor& p) {
  std::vector<double> z(params.k);
  for (int c = 0; c < x.cells(); ++c) {
    const auto xc = x.cell(c);
    double zmax = -INFINITY;
    for (int s = 0; s < params.k; ++s) {
      double v = params.beta[s];
      for (int j = 0; j < params.d; ++j) v += params.w(s, j) * xc[j];
      z[s] = v;
      zmax = std::max(zmax, v);
    }
    double sum = 0.0;
    for (int s = 0; s < params.k; ++s) sum += (z[s] = std::exp(z[s] - zmax));
    for (int s = 0; s < params.k; ++s) p(s, c) = z[s] / sum;
  }
}

}  // namespace

ProbMaps logistic_probmaps(const LogisticParams& params, const FeatureMaps& features) {
  features.validate();
  detail::require(params.k >= 1, "logistic_probmaps needs K >= 1");
  detail::require(params.d == features.d, "logistic_probmaps: parameter and feature dimensions differ");
  detail::require(params.omega.size() == static_cast<std::size_t>(params.k) * params.d &&
                      params.beta.size() == static_cast<std::size_t>(params.k),
                  "logistic_probmaps: malformed parameters");
  MapTensor p(params.k, features.n);
  softmax_into(params, features, p);
  return ProbMaps(std::move(p));
}

LogisticParams variance_reparam(const VarianceParams& v) {
  detail::require(v.sigma.size() == static_cast<std::size_t>(v.k) * v.d, "variance_reparam: malformed parameters");
  LogisticParams out(v.k, v.d);
  for (std::size_t i = 0; i < v.sigma.size(); ++i) {
    detail::require(v.sigma[i] > 0.0, "variance_reparam: sigma must be > 0");
    out.omega[i] = -1.0 / (v.sigma[i] * v.sigma[i]);
  }
  return out;
}

std::vector<double> differential_variance(const VarianceParams& v) {
  detail::require(v.k == 2, "differential_variance needs K = 2");
  const LogisticParams l = variance_reparam(v);
  std::vector<double> out(v.d);
  for (int j = 0; j < v.d; ++j) out[j] = l.w(0, j) - l.w(1, j);
  return out;
}

ParametricObjective::ParametricObjective(Objective objective, FeatureMaps features, int k, ParamModel model)
    : obj_(std::move(objective)), x_(std::move(features)), k_(k), model_(model) {
  x_.validate();
  detail::require(k >= 2, "parametric fit needs K >= 2");
  detail::require(obj_.counts().max_cell() < x_.cells(), "parametric fit: pairs reference cells outside the features");
  mean_.assign(x_.d, 0.0);
  sd_.assign(x_.d, 0.0);
  for (int c = 0; c < x_.cells(); ++c)
    for (int j = 0; j < x_.d; ++j) mean_[j] += x_(c, j);
  for (double& m : mean_) m /= x_.cells();
  for (int c = 0; c < x_.cells(); ++c)
    for (int j = 0; j < x_.d; ++j) sd_[j] += (x_(c, j) - mean_[j]) * (x_(c, j) - mean_[j]);
  for (double& s : sd_) s = std::sqrt(s / x_.cells());
}

int ParametricObjective::dimension() const noexcept {
  return model_ == ParamModel::Logistic ? k_ * x_.d + k_ : k_ * x_.d;
}

LogisticParams ParametricObjective::logistic(const std::vector<double>& theta) const {
  detail::require(static_cast<int>(theta.size()) == dimension(), "parameter vector has the wrong length");
  LogisticParams lp(k_, x_.d);
  const std::size_t kd = static_cast<std::size_t>(k_) * x_.d;
  if (model_ == ParamModel::Logistic) {
    std::copy(theta.begin(), theta.begin() + kd, lp.omega.begin());
    std::copy(theta.begin() + kd, theta.end(), lp.beta.begin());
  } else {
    for (std::size_t i = 0; i < kd; ++i) lp.omega[i] = -std::exp(-2.0 * theta[i]);
  }
  return lp;
}

VarianceParams ParametricObjective::variance(const std::vector<double>& theta) const {
  detail::require(model_ == ParamModel::Variance, "variance() called on a logistic objective");
  VarianceParams v(k_, x_.d);
  for (std::size_t i = 0; i < v.sigma.size(); ++i) v.sigma[i] = std::exp(theta[i]);
  return v;
}

MapTensor ParametricObjective::maps(const std::vector<double>& theta) const {
  MapTensor p(k_, x_.n);
  softmax_into(logistic(theta), x_, p);
  return p;
}

double ParametricObjective::evaluate(const std::vector<double>& theta, std::vector<double>& grad) const {
  const LogisticParams lp = logistic(theta);
  MapTensor p(k_, x_.n);
  softmax_into(lp, x_, p);
  const double f = obj_.value(p);
  const MapTensor g = obj_.gradient(p);

  grad.assign(theta.size(), 0.0);
  std::vector<double> dz(k_);
  const int d = x_.d;
  for (int c = 0; c < x_.cells(); ++c) {
    double avg = 0.0;
    for (int s = 0; s < k_; ++s) avg += p(s, c) * g(s, c);
    for (int s = 0; s < k_; ++s) dz[s] = p(s, c) * (g(s, c) - avg);
    const auto xc = x_.cell(c);
    for (int s = 0; s < k_; ++s) {
      if (dz[s] == 0.0) continue;
      for (int j = 0; j < d; ++j) grad[static_cast<std::size_t>(s) * d + j] += dz[s] * xc[j];
      if (model_ == ParamModel::Logistic) grad[static_cast<std::size_t>(k_) * d + s] += dz[s];
    }
  }
  if (model_ == ParamModel::Variance) {
    // d omega / d log sigma = -2 omega.
    for (std::size_t i = 0; i < lp.omega.size(); ++i) grad[i] *= -2.0 * lp.omega[i];
  }
  return f;
}

std::vector<double> ParametricObjective::initial(std::uint64_t seed) const {
  Rng rng(seed);
  const int d = x_.d;
  std::vector<double> theta(dimension(), 0.0);
  if (model_ == ParamModel::Logistic) {
    for (int s = 0; s < k_; ++s) {
      double b = 0.0;
      for (int j = 0; j < d; ++j) {
        const double w = sd_[j] > 0.0 ? rng.normal() / (sd_[j] * std::sqrt(static_cast<double>(d))) : 0.0;
        theta[static_cast<std::size_t>(s) * d + j] = w;
        b -= w * mean_[j];
      }
      theta[static_cast<std::size_t>(k_) * d + s] = b;
    }
  } else {
    // sigma^2 around d * |mean| keeps the initial logits of order one.
    for (int s = 0; s < k_; ++s)
      for (int j = 0; j < d; ++j) {
        const double scale = std::max(std::abs(mean_[j]) + sd_[j], 1e-12) * d;
        theta[static_cast<std::size_t>(s) * d + j] = 0.5 * std::log(scale) + 0.5 * rng.normal();
      }
  }
  return theta;
}

ParametricFit fit_parametric(const AggregatedCounts& counts, const FeatureMaps& features, int k,
                             const FitConfig& cfg, const ParametricOptions& opt) {
  cfg.validate();
  detail::require(k >= 2, "fit_parametric needs K >= 2");
  detail::require(!counts.empty(), "fit_parametric needs a nonempty dataset");
  detail::require(opt.restarts >= 1, "fit_parametric needs at least one restart");
  const ParametricObjective po(Objective(counts, features.n, cfg.loss, cfg.lambda, cfg.kernel_width, cfg.prob_clamp),
                               features, k, opt.model);

  LbfgsOptions lo;
  lo.memory = opt.memory;
  lo.max_iter = cfg.max_iter;
  lo.grad_tol = cfg.epsilon;
  const SmoothFunction fn = [&po](const std::vector<double>& t, std::vector<double>& g) { return po.evaluate(t, g); };

  std::vector<std::future<LbfgsResult>> runs;
  for (int r = 0; r < opt.restarts; ++r)
    runs.push_back(std::async(std::launch::async, [&, r] {
      return minimize_lbfgs(fn, po.initial(derive_seed(cfg.seed, static_cast<std::uint64_t>(r))), lo);
    }));
  std::vector<LbfgsResult> results;
  for (auto& f : runs) results.push_back(f.get());

  ParametricFit out;
  out.model = opt.model;
  int best = 0;
  for (int r = 0; r < opt.restarts; ++r) {
    out.restart_losses.push_back(results[r].f);
    if (results[r].f < results[best].f) best = r;
  }
  const LbfgsResult& b = results[best];
  out.best_restart = best;
  out.logistic = po.logistic(b.x);
  if (opt.model == ParamModel::Variance) out.variance = po.variance(b.x);
  out.result.maps = ProbMaps(po.maps(b.x));
  out.result.loss_trace = b.trace;
  out.result.iterations = b.iterations;
  out.result.converged = b.converged;
  out.result.diagnostic = b.stop_reason;
  out.result.stationarity_gap = stationarity_report(out.result.maps, counts).gap;
  return out;
}

ParametricFit fit_parametric(const ResponseDataset& d, const FeatureMaps& features, int k, const FitConfig& cfg,
                             const ParametricOptions& opt) {
  detail::require(d.grid.n() == features.n, "fit_parametric: dataset grid and features differ in size");
  return fit_parametric(aggregate_responses(d), features, k, cfg, opt);
}

}  // namespace pseg
