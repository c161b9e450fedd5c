#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pseg/probmaps.hpp"

namespace pseg {

/// Boundary pixels on a width x height raster.
struct ContourMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;  // row-major, 1 = boundary

  ContourMap() = default;
  ContourMap(int w, int h) : width(w), height(h), mask(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const noexcept { return mask[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y) noexcept { mask[static_cast<std::size_t>(y) * width + x] = 1; }
  std::size_t count() const noexcept;
};

using Polyline = std::vector<std::pair<double, double>>;

/// Rasterizes a polyline (pixel coordinates) onto a width x height mask.
/// Vertices outside the raster are clipped.
ContourMap rasterize_polyline(const Polyline& line, int width, int height);

/// Marks every pixel whose right or lower neighbor carries a different
/// label, after upsampling the label grid by cell_px.
ContourMap segmap_boundaries(const SegMap& seg, int cell_px);

struct FScore {
  double f = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// One-to-one matching of boundary pixels within Euclidean distance tol_px
/// (maximum bipartite matching). precision = matched / predicted,
/// recall = matched / reference. Both empty -> f = 1; exactly one empty -> f = 0.
FScore contour_fscore(const ContourMap& predicted, const ContourMap& reference, double tol_px = 2.0);

}  // namespace pseg
