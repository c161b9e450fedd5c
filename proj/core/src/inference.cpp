#include "pseg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pseg/errors.hpp"
#include "pseg/rng.hpp"

namespace pseg {

const char* to_string(LossKind loss) noexcept { return loss == LossKind::BCE ? "bce" : "se"; }

LossKind parse_loss(const std::string& name) {
  if (name == "bce" || name == "BCE") return LossKind::BCE;
  if (name == "se" || name == "SE") return LossKind::SE;
  throw ContractError("unknown loss '" + name + "' (expected bce or se)");
}

void FitConfig::validate() const {
  detail::require(lambda >= 0.0, "lambda must be >= 0");
  detail::require(kernel_width >= 1, "kernel width must be >= 1");
  detail::require(learning_rate > 0.0, "learning rate must be > 0");
  detail::require(epsilon > 0.0, "epsilon must be > 0");
  detail::require(max_iter >= 1, "max_iter must be >= 1");
  detail::require(prob_clamp > 0.0 && prob_clamp < 0.5, "prob_clamp must lie in (0, 0.5)");
}

namespace {

void check_counts(const MapTensor& p, const AggregatedCounts& counts) {
  const int m = counts.max_cell();
  if (m >= p.cells())
    throw ContractError("pair references cell " + std::to_string(m) + " outside a grid of " +
                        std::to_string(p.cells()) + " cells");
  for (const auto& e : counts.entries())
    if (e.pair.a < 0) throw ContractError("pair references a negative cell index");
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double bce_loss(const MapTensor& p, const AggregatedCounts& counts, double prob_clamp) {
  check_counts(p, counts);
  double s = 0.0;
  for (const auto& e : counts.entries()) {
    const double q = std::clamp(dot(p.cell(e.pair.a), p.cell(e.pair.b)), prob_clamp, 1.0 - prob_clamp);
    const int diff = e.n_obs - e.same;
    if (e.same) s -= e.same * std::log(q);
    if (diff) s -= diff * std::log1p(-q);
  }
  return s;
}

double bce_loss(const ProbMaps& p, const ResponseDataset& d, double prob_clamp) {
  return bce_loss(p.tensor(), aggregate_responses(d), prob_clamp);
}

double se_loss(const MapTensor& p, const AggregatedCounts& counts) {
  check_counts(p, counts);
  double s = 0.0;
  for (const auto& e : counts.entries()) {
    const double r = e.rate() - dot(p.cell(e.pair.a), p.cell(e.pair.b));
    s += r * r;
  }
  return s;
}

MapTensor grad_bce(const MapTensor& p, const AggregatedCounts& counts, double prob_clamp) {
  check_counts(p, counts);
  MapTensor g(p.k(), p.n(), 0.0);
  const int k = p.k();
  for (const auto& e : counts.entries()) {
    const auto pa = p.cell(e.pair.a);
    const auto pb = p.cell(e.pair.b);
    const double q = std::clamp(dot(pa, pb), prob_clamp, 1.0 - prob_clamp);
    // d/dq of -(s ln q + (N - s) ln(1 - q))
    const double c = -(e.same / q - (e.n_obs - e.same) / (1.0 - q));
    auto ga = g.cell(e.pair.a);
    auto gb = g.cell(e.pair.b);
    for (int s = 0; s < k; ++s) {
      ga[s] += c * pb[s];
      gb[s] += c * pa[s];
    }
  }
  return g;
}

MapTensor grad_bce(const ProbMaps& p, const ResponseDataset& d, double prob_clamp) {
  return grad_bce(p.tensor(), aggregate_responses(d), prob_clamp);
}

MapTensor grad_se(const MapTensor& p, const AggregatedCounts& counts, double lambda, const RegKernel& kernel) {
  check_counts(p, counts);
  MapTensor g(p.k(), p.n(), 0.0);
  const int k = p.k();
  for (const auto& e : counts.entries()) {
    const auto pa = p.cell(e.pair.a);
    const auto pb = p.cell(e.pair.b);
    // d/dp_a (k - <p_a,p_b>)^2 = -2 (k - <p_a,p_b>) p_b
    const double c = -2.0 * (e.rate() - dot(pa, pb));
    auto ga = g.cell(e.pair.a);
    auto gb = g.cell(e.pair.b);
    for (int s = 0; s < k; ++s) {
      ga[s] += c * pb[s];
      gb[s] += c * pa[s];
    }
  }
  add_reg_gradient(p, lambda, kernel, g);
  return g;
}

Objective::Objective(AggregatedCounts counts, int n, LossKind loss, double lambda, int kernel_width,
                     double prob_clamp)
    : counts_(std::move(counts)), loss_(loss), lambda_(lambda), kernel_(kernel_width), clamp_(prob_clamp) {
  detail::require(counts_.max_cell() < n * n, "Objective: counts reference cells outside the grid");
  detail::require(lambda >= 0.0, "Objective: lambda must be >= 0");
}

double Objective::value(const MapTensor& p) const {
  const double data = loss_ == LossKind::BCE ? bce_loss(p, counts_, clamp_) : se_loss(p, counts_);
  return data + reg_penalty(p, lambda_, kernel_);
}

MapTensor Objective::gradient(const MapTensor& p) const {
  if (loss_ == LossKind::SE) return grad_se(p, counts_, lambda_, kernel_);
  MapTensor g = grad_bce(p, counts_, clamp_);
  add_reg_gradient(p, lambda_, kernel_, g);
  return g;
}

MapTensor initial_maps(int k, int n, std::uint64_t seed) {
  detail::require(k >= 1 && n >= 1, "initial_maps: bad shape");
  Rng rng(seed);
  MapTensor p(k, n);
  for (int c = 0; c < p.cells(); ++c) {
    auto v = p.cell(c);
    double sum = 0.0;
    for (auto& x : v) {
      x = 1.0 / k + 1e-3 * rng.uniform();
      sum += x;
    }
    for (auto& x : v) x /= sum;
  }
  return p;
}

FitResult fit_from(const Objective& objective, MapTensor p, const FitConfig& cfg, const IterationObserver& observer) {
  cfg.validate();
  const int k = p.k();
  detail::require(k >= 2, "fit needs K >= 2");

  // Divergence guard: 20 consecutive iterations above the best loss seen
  // (steady rises or a sustained oscillation), or a plateau above it,
  // restore the best iterate and halve the learning rate.
  constexpr int kStallLimit = 20;
  constexpr int kMaxHalvings = 8;

  FitResult res;
  double lr = cfg.learning_rate;
  double loss = objective.value(p);
  if (!std::isfinite(loss)) throw FitError("initial loss is not finite");
  res.loss_trace.push_back(loss);
  double prev = loss + 1.0;
  double best = loss;
  MapTensor best_p = p;
  int stalled = 0;
  std::vector<double> logp(k);

  while (std::abs(loss - prev) > cfg.epsilon && res.iterations < cfg.max_iter) {
    const MapTensor g = objective.gradient(p);
    for (int c = 0; c < p.cells(); ++c) {
      auto pc = p.cell(c);
      const auto gc = g.cell(c);
      // Work with log p - lr g shifted by its maximum: the shift cancels in
      // the normalization and the largest term is exactly 1, so the sum
      // cannot underflow even when some entries have reached 0.
      double amax = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < k; ++s) {
        logp[s] = pc[s] > 0.0 ? std::log(pc[s]) - lr * gc[s] : -std::numeric_limits<double>::infinity();
        amax = std::max(amax, logp[s]);
      }
      double sum = 0.0;
      for (int s = 0; s < k; ++s) sum += (pc[s] = std::exp(logp[s] - amax));
      for (int s = 0; s < k; ++s) pc[s] /= sum;
    }
    prev = loss;
    loss = objective.value(p);
    ++res.iterations;
    res.loss_trace.push_back(loss);
    if (!std::isfinite(loss))
      throw FitError("loss became non-finite at iteration " + std::to_string(res.iterations) +
                     " (learning rate " + std::to_string(lr) + ")");
    if (observer) observer(res.iterations, p, loss);

    if (loss < best) {
      best = loss;
      best_p = p;
      stalled = 0;
    } else if (++stalled >= kStallLimit || (std::abs(loss - prev) <= cfg.epsilon && loss > best + cfg.epsilon)) {
      // A plateau above the best loss would otherwise pass the epsilon test.
      if (res.lr_halvings == kMaxHalvings) {
        res.diagnostic = "stopped: loss stayed above its best value after " + std::to_string(kMaxHalvings) +
                         " learning-rate halvings";
        break;
      }
      lr *= 0.5;
      ++res.lr_halvings;
      stalled = 0;
      p = best_p;
      prev = loss;
      loss = best;
    }
  }

  if (!res.diagnostic.empty() || loss > best) {
    p = best_p;
    loss = best;
  }
  res.converged = res.diagnostic.empty() && std::abs(loss - prev) <= cfg.epsilon;
  if (!res.converged && res.diagnostic.empty()) res.diagnostic = "reached max_iter";
  res.maps = ProbMaps(std::move(p), 1e-9);
  res.stationarity_gap = stationarity_report(res.maps, objective.counts()).gap;
  return res;
}

FitResult fit_nonparametric(const AggregatedCounts& counts, int n, int k, const FitConfig& cfg,
                            const IterationObserver& observer) {
  cfg.validate();
  detail::require(k >= 2, "fit needs K >= 2, got " + std::to_string(k));
  detail::require(!counts.empty(), "fit needs a non-empty dataset");
  const Objective objective(counts, n, cfg.loss, cfg.lambda, cfg.kernel_width, cfg.prob_clamp);
  return fit_from(objective, initial_maps(k, n, cfg.seed), cfg, observer);
}

FitResult fit_nonparametric(const ResponseDataset& d, int k, const FitConfig& cfg, const IterationObserver& observer) {
  return fit_nonparametric(aggregate_responses(d), d.grid.n(), k, cfg, observer);
}

StationarityReport stationarity_report(const ProbMaps& p, const AggregatedCounts& counts) {
  check_counts(p.tensor(), counts);
  StationarityReport r;
  r.per_pair.reserve(counts.size());
  for (const auto& e : counts.entries()) {
    const double d = std::abs(prob_same(p.cell(e.pair.a), p.cell(e.pair.b)) - e.rate());
    r.per_pair.emplace_back(e.pair, d);
    r.gap = std::max(r.gap, d);
  }
  return r;
}

}  // namespace pseg
