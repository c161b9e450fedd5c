#pragma once

#include <cstdint>
#include <string>

#include "pseg/dataset.hpp"
#include "pseg/grid.hpp"
#include "pseg/probmaps.hpp"

namespace pseg {

enum class Coverage {
  Minimal,     // (K-1) n^2 pairs
  KPerPixel,   // K n^2 pairs
};

const char* to_string(Coverage c) noexcept;
Coverage parse_coverage(const std::string& name);

/// Number of pairs sample_pairset returns: (K-1) n^2 or K n^2.
long pair_count(int k, int n, Coverage coverage);

/// Random pair set with pair_count(k, n, coverage) distinct pairs, none of
/// the form (i, i), covering every cell.
///
/// Minimal: a random spanning tree of the 4-neighbor lattice, then the
/// remaining lattice edges in random order, then uniform pairs. The tree
/// links every cell to every other through tested pairs.
/// KPerPixel: each cell anchors K pairs, one with a partner from its near
/// ring (Chebyshev distance 1 or 2) and K - 1 with uniform partners.
///
/// Throws ContractError when the grid cannot hold that many distinct pairs.
PairSet sample_pairset(const GridSpec& grid, int k, Coverage coverage, std::uint64_t seed);

/// One block per repetition of the same pair set; each response is a
/// Bernoulli draw with parameter <gt_i, gt_j>.
ResponseDataset simulate_responses(const ProbMaps& gt, const PairSet& pairs, int n_blocks, std::uint64_t seed,
                                   const GridSpec& grid, std::string image_id = "simulated");
inline ResponseDataset simulate_responses(const ProbMaps& gt, const PairSet& pairs, int n_blocks,
                                          std::uint64_t seed) {
  return simulate_responses(gt, pairs, n_blocks, seed, GridSpec(gt.n()));
}

}  // namespace pseg
