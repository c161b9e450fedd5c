#pragma once

#include <utility>

namespace pseg {

/// Pixel rectangle [x0, x0+size) x [y0, y0+size).
struct PixelRegion {
  int x0 = 0;
  int y0 = 0;
  int size = 0;
};

/// N x N measurement lattice laid over a square image of `image_px` pixels.
///
/// Cells are indexed row-major, `cell = y * n + x`, with (x, y) the 0-based
/// column and row. Lattice coordinates are centered: {-(n-1)/2 .. (n-1)/2}
/// for odd n and {-n/2 .. n/2-1} for even n. Each cell owns a square block
/// of `image_px / n` pixels; image_px must be a multiple of n.
class GridSpec {
 public:
  GridSpec() = default;
  /// Throws ContractError if n < 3, image_px < n, or image_px % n != 0.
  GridSpec(int n, int image_px);
  /// One pixel per cell.
  explicit GridSpec(int n) : GridSpec(n, n) {}

  int n() const noexcept { return n_; }
  int image_px() const noexcept { return image_px_; }
  int cells() const noexcept { return n_ * n_; }
  int cell_px() const noexcept { return image_px_ / n_; }
  bool odd_centered() const noexcept { return (n_ % 2) == 1; }

  int index(int x, int y) const noexcept { return y * n_ + x; }
  int col(int cell) const noexcept { return cell % n_; }
  int row(int cell) const noexcept { return cell / n_; }
  bool contains(int cell) const noexcept { return cell >= 0 && cell < cells(); }

  /// Centered lattice coordinate of a cell, first = x, second = y.
  std::pair<int, int> lattice(int cell) const noexcept;
  /// Inverse of `lattice`.
  int from_lattice(int lx, int ly) const noexcept;
  /// Pixel block covered by a cell.
  PixelRegion region(int cell) const noexcept;
  /// Pixel coordinates of the cell center (may be fractional).
  std::pair<double, double> center_px(int cell) const noexcept;
  /// Cell containing pixel (px, py).
  int cell_of_pixel(int px, int py) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int n_ = 3;
  int image_px_ = 3;
};

}  // namespace pseg
