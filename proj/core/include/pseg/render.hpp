#pragma once

#include <string>
#include <vector>

#include "pseg/image.hpp"
#include "pseg/probmaps.hpp"

namespace pseg {

enum class RenderMode { PerSegment, Argmax, Entropy };

const char* to_string(RenderMode m) noexcept;
RenderMode parse_render_mode(const std::string& name);

/// Categorical color of segment `k` (cycles after 10 colors).
Rgb segment_color(int k);

struct RenderedImage {
  std::string name;  // "segment0", "argmax", "entropy"
  RgbImage image;
};

/// PerSegment: one image per segment, pixel = p * segment_color(k) (black at 0).
/// Argmax: segment_color of the argmax label. Entropy: gray level H / ln K.
/// Each cell becomes a cell_px x cell_px block.
std::vector<RenderedImage> render(const ProbMaps& maps, RenderMode mode, int cell_px = 8);

}  // namespace pseg
