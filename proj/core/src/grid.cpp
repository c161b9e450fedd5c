#include "pseg/grid.hpp"

#include <string>

#include "pseg/errors.hpp"

namespace pseg {

GridSpec::GridSpec(int n, int image_px) : n_(n), image_px_(image_px) {
  detail::require(n >= 3, "grid size must be at least 3, got " + std::to_string(n));
  detail::require(image_px >= n && image_px % n == 0,
                  "image size " + std::to_string(image_px) + " px is not a multiple of grid size " +
                      std::to_string(n));
}

// n/2 with integer division equals (n-1)/2 for odd n, which makes one
// offset serve both centering conventions.
std::pair<int, int> GridSpec::lattice(int cell) const noexcept {
  const int half = n_ / 2;
  return {col(cell) - half, row(cell) - half};
}

int GridSpec::from_lattice(int lx, int ly) const noexcept {
  const int half = n_ / 2;
  return index(lx + half, ly + half);
}

PixelRegion GridSpec::region(int cell) const noexcept {
  const int s = cell_px();
  return {col(cell) * s, row(cell) * s, s};
}

std::pair<double, double> GridSpec::center_px(int cell) const noexcept {
  const double s = cell_px();
  return {(col(cell) + 0.5) * s, (row(cell) + 0.5) * s};
}

int GridSpec::cell_of_pixel(int px, int py) const noexcept {
  const int s = cell_px();
  return index(px / s, py / s);
}

}  // namespace pseg
