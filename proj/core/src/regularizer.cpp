#include "pseg/regularizer.hpp"

#include <algorithm>

#include "pseg/errors.hpp"

namespace pseg {

RegKernel::RegKernel(int width) : width_(width) {
  detail::require(width >= 1, "regularization kernel width must be >= 1");
  if (width == 1) {
    taps_ = {{1, 0, 0.25}, {-1, 0, 0.25}, {0, 1, 0.25}, {0, -1, 0.25}};
    return;
  }
  const int side = 2 * width + 1;
  const double w = 1.0 / (side * side - 1);
  for (int dy = -width; dy <= width; ++dy)
    for (int dx = -width; dx <= width; ++dx)
      if (dx != 0 || dy != 0) taps_.push_back({dx, dy, w});
}

namespace {

inline int clampi(int v, int n) { return std::clamp(v, 0, n - 1); }

// residual r = p - G*p
MapTensor residual(const MapTensor& p, const RegKernel& kernel) {
  const MapTensor smooth = convolve_replicate(p, kernel);
  MapTensor r(p.k(), p.n());
  for (std::size_t i = 0; i < r.values().size(); ++i) r.values()[i] = p.values()[i] - smooth.values()[i];
  return r;
}

}  // namespace

MapTensor convolve_replicate(const MapTensor& p, const RegKernel& kernel) {
  const int n = p.n();
  const int k = p.k();
  MapTensor out(k, n, 0.0);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      auto dst = out.cell(y * n + x);
      for (const auto& t : kernel.taps()) {
        const auto src = p.cell(clampi(y - t.dy, n) * n + clampi(x - t.dx, n));
        for (int s = 0; s < k; ++s) dst[s] += t.weight * src[s];
      }
    }
  return out;
}

double reg_penalty(const MapTensor& p, double lambda, const RegKernel& kernel) {
  if (lambda == 0.0) return 0.0;
  const MapTensor r = residual(p, kernel);
  double s = 0.0;
  for (double v : r.values()) s += v * v;
  return lambda * s;
}

void add_reg_gradient(const MapTensor& p, double lambda, const RegKernel& kernel, MapTensor& grad) {
  if (lambda == 0.0) return;
  detail::require(grad.same_shape(p), "add_reg_gradient: shape mismatch");
  const int n = p.n();
  const int k = p.k();
  const MapTensor r = residual(p, kernel);
  // grad += 2 lambda (r - G^T r); G^T scatters each residual back to the
  // (clamped) source cells it was averaged from.
  for (std::size_t i = 0; i < r.values().size(); ++i) grad.values()[i] += 2.0 * lambda * r.values()[i];
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const auto ri = r.cell(y * n + x);
      for (const auto& t : kernel.taps()) {
        auto g = grad.cell(clampi(y - t.dy, n) * n + clampi(x - t.dx, n));
        for (int s = 0; s < k; ++s) g[s] -= 2.0 * lambda * t.weight * ri[s];
      }
    }
}

}  // namespace pseg
