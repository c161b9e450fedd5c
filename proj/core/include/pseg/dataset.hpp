#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pseg/grid.hpp"

namespace pseg {

/// Unordered pair of cell indices, stored with `a <= b`.
struct CellPair {
  int a = 0;
  int b = 0;

  /// Canonicalizes the order; does not reject i == j (see validate_dataset).
  static CellPair make(int i, int j) noexcept { return i <= j ? CellPair{i, j} : CellPair{j, i}; }

  friend auto operator<=>(const CellPair&, const CellPair&) = default;
};

/// Pairs tested within one block.
struct PairSet {
  std::vector<CellPair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }
  auto begin() const noexcept { return pairs.begin(); }
  auto end() const noexcept { return pairs.end(); }
};

struct Block {
  PairSet pairs;
  std::vector<std::uint8_t> responses;  // 1 = "same segment", aligned with pairs
};

struct ResponseDataset {
  std::string image_id;
  GridSpec grid;
  std::optional<int> k_instructed;
  std::vector<Block> blocks;

  std::size_t trial_count() const noexcept;
};

/// Per-pair summary over all blocks: `same` of `n_obs` responses were 1.
struct PairCount {
  CellPair pair;
  int same = 0;
  int n_obs = 0;

  double rate() const noexcept { return static_cast<double>(same) / n_obs; }
};

/// Pairs observed at least once, sorted by pair.
class AggregatedCounts {
 public:
  AggregatedCounts() = default;
  explicit AggregatedCounts(std::vector<PairCount> entries);

  const std::vector<PairCount>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const PairCount* find(CellPair p) const noexcept;
  /// Largest cell index referenced, or -1 when empty.
  int max_cell() const noexcept;

 private:
  std::vector<PairCount> entries_;
};

AggregatedCounts aggregate_responses(const ResponseDataset& d);

enum class ViolationKind {
  IdenticalPointPair,
  OutOfGrid,
  LengthMismatch,
  InvalidResponse,
  DuplicatePair,
};

struct Violation {
  ViolationKind kind;
  int block = -1;
  int trial = -1;
  std::string message;
};

const char* to_string(ViolationKind kind) noexcept;

/// Empty iff the dataset is well-formed.
std::vector<Violation> validate_dataset(const ResponseDataset& d);

}  // namespace pseg
