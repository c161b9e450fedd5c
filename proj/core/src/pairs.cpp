#include "pseg/pairs.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_set>
#include <vector>

#include "pseg/errors.hpp"
#include "pseg/rng.hpp"

namespace pseg {

const char* to_string(Coverage c) noexcept {
  return c == Coverage::Minimal ? "minimal" : "k_per_pixel";
}

Coverage parse_coverage(const std::string& name) {
  if (name == "minimal") return Coverage::Minimal;
  if (name == "k_per_pixel") return Coverage::KPerPixel;
  throw ContractError("unknown coverage '" + name + "' (expected minimal or k_per_pixel)");
}

long pair_count(int k, int n, Coverage coverage) {
  detail::require(k >= 2, "pair_count needs K >= 2");
  detail::require(n >= 1, "pair_count needs n >= 1");
  const long per_cell = coverage == Coverage::Minimal ? k - 1 : k;
  return per_cell * n * n;
}

namespace {

std::uint64_t key(int i, int j) {
  const CellPair p = CellPair::make(i, j);
  return (static_cast<std::uint64_t>(p.a) << 32) | static_cast<std::uint32_t>(p.b);
}

}  // namespace

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

void shuffle(std::vector<CellPair>& v, Rng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) std::swap(v[i], v[rng.index(i + 1)]);
}

}  // namespace

PairSet sample_pairset(const GridSpec& grid, int k, Coverage coverage, std::uint64_t seed) {
  const int n = grid.n();
  const int cells = grid.cells();
  const long total = pair_count(k, n, coverage);
  const long capacity = static_cast<long>(cells) * (cells - 1) / 2;
  if (total > capacity)
    throw ContractError("cannot place " + std::to_string(total) + " distinct pairs on a " + std::to_string(n) + "x" +
                        std::to_string(n) + " grid (at most " + std::to_string(capacity) + ")");

  Rng rng(seed);
  std::unordered_set<std::uint64_t> used;
  used.reserve(static_cast<std::size_t>(total) * 2);
  PairSet out;
  out.pairs.reserve(static_cast<std::size_t>(total));
  auto try_add = [&](int a, int b) {
    if (a == b || !used.insert(key(a, b)).second) return false;
    out.pairs.push_back(CellPair::make(a, b));
    return true;
  };
  auto add_uniform = [&](int a) {
    while (!try_add(a, rng.index(cells))) {
    }
  };

  if (coverage == Coverage::Minimal) {
    // A random spanning tree of the 4-neighbor lattice, then the other
    // lattice edges, then uniform pairs until (K-1) n^2 are placed.
    std::vector<CellPair> lattice;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        if (x + 1 < n) lattice.push_back(CellPair::make(grid.index(x, y), grid.index(x + 1, y)));
        if (y + 1 < n) lattice.push_back(CellPair::make(grid.index(x, y), grid.index(x, y + 1)));
      }
    shuffle(lattice, rng);
    DisjointSets sets(cells);
    std::vector<CellPair> rest;
    for (const CellPair& e : lattice) {
      if (sets.unite(e.a, e.b))
        try_add(e.a, e.b);
      else
        rest.push_back(e);
    }
    for (const CellPair& e : rest) {
      if (static_cast<long>(out.size()) == total) break;
      try_add(e.a, e.b);
    }
    while (static_cast<long>(out.size()) < total) add_uniform(rng.index(cells));
    return out;
  }

  // One partner from the near ring (Chebyshev distance 1 or 2), the others
  // uniform over the grid.
  std::vector<int> near;
  auto add_near = [&](int a) {
    const int x = grid.col(a), y = grid.row(a);
    near.clear();
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if ((dx || dy) && nx >= 0 && ny >= 0 && nx < n && ny < n && !used.count(key(a, grid.index(nx, ny))))
          near.push_back(grid.index(nx, ny));
      }
    if (near.empty())
      add_uniform(a);
    else
      try_add(a, near[rng.index(static_cast<int>(near.size()))]);
  };
  for (int a = 0; a < cells; ++a) {
    add_near(a);
    for (int s = 1; s < k; ++s) add_uniform(a);
  }
  return out;
}

ResponseDataset simulate_responses(const ProbMaps& gt, const PairSet& pairs, int n_blocks, std::uint64_t seed,
                                   const GridSpec& grid, std::string image_id) {
  detail::require(n_blocks >= 1, "simulate_responses needs at least one block");
  detail::require(grid.n() == gt.n(), "simulate_responses: grid and maps differ in size");
  std::vector<double> prob(pairs.size());
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const CellPair& p = pairs.pairs[t];
    detail::require(gt.tensor().cells() > std::max(p.a, p.b) && p.a >= 0, "simulate_responses: pair outside grid");
    prob[t] = prob_same(gt.cell(p.a), gt.cell(p.b));
  }
  ResponseDataset d;
  d.image_id = std::move(image_id);
  d.grid = grid;
  d.k_instructed = gt.k();
  Rng rng(seed);
  d.blocks.resize(static_cast<std::size_t>(n_blocks));
  for (Block& b : d.blocks) {
    b.pairs = pairs;
    b.responses.resize(pairs.size());
    for (std::size_t t = 0; t < pairs.size(); ++t) b.responses[t] = rng.bernoulli(prob[t]) ? 1 : 0;
  }
  return d;
}

}  // namespace pseg
