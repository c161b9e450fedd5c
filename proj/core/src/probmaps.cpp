#include "pseg/probmaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pseg/errors.hpp"

namespace pseg {

MapTensor::MapTensor(int k, int n, double fill)
    : k_(k), n_(n), v_(static_cast<std::size_t>(k) * n * n, fill) {
  detail::require(k >= 1 && n >= 1, "MapTensor needs k >= 1 and n >= 1");
}

void check_simplex(const MapTensor& t, double tol) {
  for (int c = 0; c < t.cells(); ++c) {
    double sum = 0.0;
    for (double v : t.cell(c)) {
      if (!(v >= -tol && v <= 1.0 + tol))
        throw ContractError("probability out of [0,1] at cell " + std::to_string(c));
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
      throw ContractError("cell " + std::to_string(c) + " sums to " + std::to_string(sum));
  }
}

ProbMaps::ProbMaps(MapTensor values, double tol) : t_(std::move(values)) {
  detail::require(t_.k() >= 1 && t_.n() >= 1, "ProbMaps needs a non-empty tensor");
  check_simplex(t_, tol);
}

ProbMaps ProbMaps::uniform(int k, int n) { return ProbMaps(MapTensor(k, n, 1.0 / k)); }

ProbMaps ProbMaps::one_hot(int k, int n, std::span<const int> labels) {
  detail::require(static_cast<int>(labels.size()) == n * n, "one_hot: label count != n*n");
  MapTensor t(k, n, 0.0);
  for (int c = 0; c < n * n; ++c) {
    detail::require(labels[c] >= 0 && labels[c] < k, "one_hot: label out of range");
    t(labels[c], c) = 1.0;
  }
  return ProbMaps(std::move(t));
}

double ProbMaps::max_simplex_error() const noexcept {
  double worst = 0.0;
  for (int c = 0; c < cells(); ++c) {
    const auto v = cell(c);
    worst = std::max(worst, std::abs(std::accumulate(v.begin(), v.end(), 0.0) - 1.0));
  }
  return worst;
}

double prob_same(std::span<const double> p_i, std::span<const double> p_j) {
  detail::require(p_i.size() == p_j.size(), "prob_same: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < p_i.size(); ++k) s += p_i[k] * p_j[k];
  return s;
}

SegMap argmax_segmap(const ProbMaps& p) {
  SegMap out{p.n(), p.k(), std::vector<int>(p.cells())};
  for (int c = 0; c < p.cells(); ++c) {
    const auto v = p.cell(c);
    // max_element returns the first maximum, which is the lowest index.
    out.labels[c] = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
  }
  return out;
}

std::vector<double> entropy_map(const ProbMaps& p) {
  std::vector<double> h(p.cells(), 0.0);
  for (int c = 0; c < p.cells(); ++c) {
    double s = 0.0;
    for (double v : p.cell(c))
      if (v > 0.0) s -= v * std::log(v);
    h[c] = std::max(0.0, s);
  }
  return h;
}

EntropySummary mean_entropy(const ProbMaps& p) {
  const auto h = entropy_map(p);
  const double n = static_cast<double>(h.size());
  const double mean = std::accumulate(h.begin(), h.end(), 0.0) / n;
  if (h.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : h) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, sd / std::sqrt(n)};
}

ProbMaps permute_segments(const ProbMaps& p, const Permutation& perm) {
  detail::require(static_cast<int>(perm.size()) == p.k(), "permutation size != K");
  MapTensor t(p.k(), p.n());
  for (int c = 0; c < p.cells(); ++c)
    for (int a = 0; a < p.k(); ++a) t(perm[a], c) = p(a, c);
  return ProbMaps(std::move(t));
}

double mae(const ProbMaps& p, const ProbMaps& reference) {
  detail::require(p.tensor().same_shape(reference.tensor()), "mae: shape mismatch");
  const auto& a = p.tensor().values();
  const auto& b = reference.tensor().values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / p.cells();
}

Permutation align_labels(const ProbMaps& p, const ProbMaps& reference, int max_k) {
  detail::require(p.tensor().same_shape(reference.tensor()), "align_labels: shape mismatch");
  const int k = p.k();
  if (k > max_k)
    throw ContractError("align_labels: K=" + std::to_string(k) + " exceeds the exhaustive-search bound " +
                        std::to_string(max_k));
  // cost[a][b]: L1 distance between map a of p and map b of the reference.
  std::vector<double> cost(static_cast<std::size_t>(k) * k, 0.0);
  for (int c = 0; c < p.cells(); ++c)
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) cost[a * k + b] += std::abs(p(a, c) - reference(b, c));

  Permutation perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Permutation best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int a = 0; a < k; ++a) total += cost[a * k + perm[a]];
    if (total < best_cost - 1e-12) {
      best_cost = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double mae_aligned(const ProbMaps& p, const ProbMaps& reference, int max_k) {
  return mae(permute_segments(p, align_labels(p, reference, max_k)), reference);
}

ProbMaps pad_segments(const ProbMaps& p, int k) {
  detail::require(k >= p.k(), "pad_segments: cannot shrink K");
  MapTensor t(k, p.n(), 0.0);
  for (int c = 0; c < p.cells(); ++c)
    for (int a = 0; a < p.k(); ++a) t(a, c) = p(a, c);
  return ProbMaps(std::move(t));
}

std::vector<double> segment_mass(const ProbMaps& p) {
  std::vector<double> m(p.k(), 0.0);
  for (int c = 0; c < p.cells(); ++c)
    for (int a = 0; a < p.k(); ++a) m[a] += p(a, c);
  for (double& v : m) v /= p.cells();
  return m;
}

}  // namespace pseg
