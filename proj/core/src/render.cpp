#include "pseg/render.hpp"

#include <array>
#include <cmath>

#include "pseg/errors.hpp"

namespace pseg {

const char* to_string(RenderMode m) noexcept {
  switch (m) {
    case RenderMode::PerSegment: return "per_segment";
    case RenderMode::Argmax: return "argmax";
    case RenderMode::Entropy: return "entropy";
  }
  return "?";
}

RenderMode parse_render_mode(const std::string& name) {
  if (name == "per_segment") return RenderMode::PerSegment;
  if (name == "argmax") return RenderMode::Argmax;
  if (name == "entropy") return RenderMode::Entropy;
  throw ContractError("unknown render mode '" + name + "' (expected per_segment, argmax or entropy)");
}

Rgb segment_color(int k) {
  static constexpr std::array<std::array<int, 3>, 10> kPalette{{{31, 119, 180},
                                                                {255, 127, 14},
                                                                {44, 160, 44},
                                                                {214, 39, 40},
                                                                {148, 103, 189},
                                                                {140, 86, 75},
                                                                {227, 119, 194},
                                                                {127, 127, 127},
                                                                {188, 189, 34},
                                                                {23, 190, 207}}};
  const auto& c = kPalette[static_cast<std::size_t>(k) % kPalette.size()];
  return {c[0] / 255.0, c[1] / 255.0, c[2] / 255.0};
}

namespace {

RgbImage blocks(int n, int cell_px, const std::vector<Rgb>& cell_colors) {
  RgbImage img(n * cell_px, n * cell_px);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) img.at(x, y) = cell_colors[(y / cell_px) * n + x / cell_px];
  return img;
}

}  // namespace

std::vector<RenderedImage> render(const ProbMaps& maps, RenderMode mode, int cell_px) {
  detail::require(cell_px >= 1, "render: cell_px must be >= 1");
  const int n = maps.n();
  std::vector<RenderedImage> out;
  std::vector<Rgb> colors(maps.cells());
  switch (mode) {
    case RenderMode::PerSegment:
      for (int k = 0; k < maps.k(); ++k) {
        const Rgb base = segment_color(k);
        for (int c = 0; c < maps.cells(); ++c)
          for (int ch = 0; ch < 3; ++ch) colors[c][ch] = maps(k, c) * base[ch];
        out.push_back({"segment" + std::to_string(k), blocks(n, cell_px, colors)});
      }
      break;
    case RenderMode::Argmax: {
      const SegMap seg = argmax_segmap(maps);
      for (int c = 0; c < maps.cells(); ++c) colors[c] = segment_color(seg.labels[c]);
      out.push_back({"argmax", blocks(n, cell_px, colors)});
      break;
    }
    case RenderMode::Entropy: {
      const auto h = entropy_map(maps);
      const double hmax = maps.k() > 1 ? std::log(static_cast<double>(maps.k())) : 1.0;
      for (int c = 0; c < maps.cells(); ++c) {
        const double v = std::min(1.0, h[c] / hmax);
        colors[c] = {v, v, v};
      }
      out.push_back({"entropy", blocks(n, cell_px, colors)});
      break;
    }
  }
  return out;
}

}  // namespace pseg
