#pragma once

#include <vector>

#include "pseg/probmaps.hpp"

namespace pseg {

/// Neighbor-average kernel G used by the spatial penalty.
///
/// width 1: the four edge neighbors, weight 1/4 each, zero at the center.
/// width w >= 2: uniform weights over the (2w+1)^2 window minus the center.
/// Weights always sum to 1.
class RegKernel {
 public:
  struct Tap {
    int dx;
    int dy;
    double weight;
  };

  explicit RegKernel(int width = 1);

  int width() const noexcept { return width_; }
  const std::vector<Tap>& taps() const noexcept { return taps_; }

 private:
  int width_;
  std::vector<Tap> taps_;
};

/// (G * p) per segment, edges replicated: sum_j G_j p[clamp(i - j)].
MapTensor convolve_replicate(const MapTensor& p, const RegKernel& kernel);

/// lambda * sum_i sum_k (p_i[k] - (G*p)_i[k])^2.
double reg_penalty(const MapTensor& p, double lambda, const RegKernel& kernel);
inline double reg_penalty(const ProbMaps& p, double lambda, const RegKernel& kernel) {
  return reg_penalty(p.tensor(), lambda, kernel);
}

/// Adds the gradient of reg_penalty, 2 lambda (I - G)^T (I - G) p, to `grad`.
void add_reg_gradient(const MapTensor& p, double lambda, const RegKernel& kernel, MapTensor& grad);

}  // namespace pseg
