#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pseg {

/// Dense K-per-cell array on an n x n grid, stored cell-major
/// (`values[cell * k + seg]`). Used for probabilities and their gradients.
class MapTensor {
 public:
  MapTensor() = default;
  MapTensor(int k, int n, double fill = 0.0);

  int k() const noexcept { return k_; }
  int n() const noexcept { return n_; }
  int cells() const noexcept { return n_ * n_; }

  double& operator()(int seg, int cell) noexcept { return v_[static_cast<std::size_t>(cell) * k_ + seg]; }
  double operator()(int seg, int cell) const noexcept {
    return v_[static_cast<std::size_t>(cell) * k_ + seg];
  }
  std::span<double> cell(int c) noexcept { return {v_.data() + static_cast<std::size_t>(c) * k_, static_cast<std::size_t>(k_)}; }
  std::span<const double> cell(int c) const noexcept {
    return {v_.data() + static_cast<std::size_t>(c) * k_, static_cast<std::size_t>(k_)};
  }
  std::vector<double>& values() noexcept { return v_; }
  const std::vector<double>& values() const noexcept { return v_; }

  bool same_shape(const MapTensor& o) const noexcept { return k_ == o.k_ && n_ == o.n_; }

 private:
  int k_ = 0;
  int n_ = 0;
  std::vector<double> v_;
};

/// Probabilistic segmentation maps: one point of the K-simplex per cell.
class ProbMaps {
 public:
  ProbMaps() = default;
  /// Validates the simplex invariant (entries in [0,1], cell sums 1 within `tol`).
  explicit ProbMaps(MapTensor values, double tol = 1e-9);

  static ProbMaps uniform(int k, int n);
  /// One-hot maps from a label per cell.
  static ProbMaps one_hot(int k, int n, std::span<const int> labels);

  int k() const noexcept { return t_.k(); }
  int n() const noexcept { return t_.n(); }
  int cells() const noexcept { return t_.cells(); }
  double operator()(int seg, int cell) const noexcept { return t_(seg, cell); }
  std::span<const double> cell(int c) const noexcept { return t_.cell(c); }
  const MapTensor& tensor() const noexcept { return t_; }

  /// Maximum deviation of a cell sum from 1.
  double max_simplex_error() const noexcept;

 private:
  MapTensor t_;
};

/// Throws ContractError unless every cell of `t` is on the simplex within `tol`.
void check_simplex(const MapTensor& t, double tol);

/// Hard labels, row-major over the grid.
struct SegMap {
  int n = 0;
  int k = 0;
  std::vector<int> labels;
};

using Permutation = std::vector<int>;

struct EntropySummary {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Probability that two cells fall in the same segment: <p_i, p_j>.
double prob_same(std::span<const double> p_i, std::span<const double> p_j);

/// Per-cell argmax, ties resolved to the lowest segment index.
SegMap argmax_segmap(const ProbMaps& p);

/// Per-cell Shannon entropy in nats (0 ln 0 = 0), values in [0, ln K].
std::vector<double> entropy_map(const ProbMaps& p);

/// Mean and standard error of the per-cell entropies.
EntropySummary mean_entropy(const ProbMaps& p);

/// Relabels segments: output segment perm[a] takes input segment a.
ProbMaps permute_segments(const ProbMaps& p, const Permutation& perm);

/// Unaligned mean over cells of the L1 distance between K-vectors.
double mae(const ProbMaps& p, const ProbMaps& reference);

/// Permutation minimizing MAE(permute_segments(p, perm), reference).
/// Exhaustive over K! orderings; throws ContractError when K > max_k.
Permutation align_labels(const ProbMaps& p, const ProbMaps& reference, int max_k = 8);

/// MAE after optimal label alignment; in [0, 2].
double mae_aligned(const ProbMaps& p, const ProbMaps& reference, int max_k = 8);

/// Appends empty segments so that maps of different K can be compared.
ProbMaps pad_segments(const ProbMaps& p, int k);

/// Mean probability mass of each segment over all cells.
std::vector<double> segment_mass(const ProbMaps& p);

}  // namespace pseg
