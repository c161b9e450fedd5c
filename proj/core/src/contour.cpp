#include "pseg/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "pseg/errors.hpp"

namespace pseg {

std::size_t ContourMap::count() const noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

ContourMap rasterize_polyline(const Polyline& line, int width, int height) {
  detail::require(width > 0 && height > 0, "rasterize_polyline: empty raster");
  ContourMap out(width, height);
  auto plot = [&](int x, int y) {
    if (x >= 0 && y >= 0 && x < width && y < height) out.set(x, y);
  };
  if (line.size() == 1) plot(static_cast<int>(std::lround(line[0].first)), static_cast<int>(std::lround(line[0].second)));
  for (std::size_t i = 1; i < line.size(); ++i) {
    int x0 = static_cast<int>(std::lround(line[i - 1].first)), y0 = static_cast<int>(std::lround(line[i - 1].second));
    const int x1 = static_cast<int>(std::lround(line[i].first)), y1 = static_cast<int>(std::lround(line[i].second));
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      plot(x0, y0);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }
  return out;
}

ContourMap segmap_boundaries(const SegMap& seg, int cell_px) {
  detail::require(cell_px >= 1, "segmap_boundaries: cell_px must be >= 1");
  detail::require(seg.labels.size() == static_cast<std::size_t>(seg.n) * seg.n, "segmap_boundaries: malformed map");
  const int px = seg.n * cell_px;
  ContourMap out(px, px);
  auto label = [&](int x, int y) { return seg.labels[(y / cell_px) * seg.n + x / cell_px]; };
  for (int y = 0; y < px; ++y)
    for (int x = 0; x < px; ++x) {
      const int l = label(x, y);
      if ((x + 1 < px && label(x + 1, y) != l) || (y + 1 < px && label(x, y + 1) != l)) out.set(x, y);
    }
  return out;
}

namespace {

// Hopcroft-Karp on left = predicted pixels, right = reference pixels.
class Matcher {
 public:
  explicit Matcher(std::vector<std::vector<int>> adj, int n_right)
      : adj_(std::move(adj)), match_l_(adj_.size(), -1), match_r_(n_right, -1), dist_(adj_.size()) {}

  int run() {
    int matched = 0;
    while (bfs())
      for (std::size_t u = 0; u < adj_.size(); ++u)
        if (match_l_[u] < 0 && dfs(static_cast<int>(u))) ++matched;
    return matched;
  }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::queue<int> q;
    bool found = false;
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      dist_[u] = match_l_[u] < 0 ? 0 : kInf;
      if (match_l_[u] < 0) q.push(static_cast<int>(u));
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj_[u]) {
        const int w = match_r_[v];
        if (w < 0)
          found = true;
        else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(int u) {
    for (int v : adj_[u]) {
      const int w = match_r_[v];
      if (w < 0 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_l_[u] = v;
        match_r_[v] = u;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<int> match_l_, match_r_, dist_;
};

}  // namespace

FScore contour_fscore(const ContourMap& predicted, const ContourMap& reference, double tol_px) {
  detail::require(predicted.width == reference.width && predicted.height == reference.height,
                  "contour_fscore: contours have different sizes");
  detail::require(tol_px >= 0.0, "contour_fscore: tolerance must be >= 0");
  const int w = predicted.width, h = predicted.height;
  std::vector<int> ref_id(static_cast<std::size_t>(w) * h, -1);
  int n_ref = 0;
  for (std::size_t i = 0; i < reference.mask.size(); ++i)
    if (reference.mask[i]) ref_id[i] = n_ref++;

  std::vector<std::vector<int>> adj;
  const int r = static_cast<int>(std::floor(tol_px));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!predicted.at(x, y)) continue;
      auto& nb = adj.emplace_back();
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= w || yy >= h || dx * dx + dy * dy > tol_px * tol_px) continue;
          const int id = ref_id[static_cast<std::size_t>(yy) * w + xx];
          if (id >= 0) nb.push_back(id);
        }
    }
  const int n_pred = static_cast<int>(adj.size());
  if (n_pred == 0 && n_ref == 0) return {1.0, 1.0, 1.0};
  if (n_pred == 0 || n_ref == 0) return {0.0, 0.0, 0.0};

  const int matched = Matcher(std::move(adj), n_ref).run();
  FScore s;
  s.precision = static_cast<double>(matched) / n_pred;
  s.recall = static_cast<double>(matched) / n_ref;
  s.f = matched == 0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace pseg
