#include "pseg/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pseg/errors.hpp"

namespace pseg {

std::size_t ResponseDataset::trial_count() const noexcept {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.pairs.size();
  return n;
}

AggregatedCounts::AggregatedCounts(std::vector<PairCount> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const PairCount& x, const PairCount& y) { return x.pair < y.pair; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    detail::require(entries_[i].n_obs > 0, "AggregatedCounts: n_obs must be positive");
    detail::require(entries_[i].same >= 0 && entries_[i].same <= entries_[i].n_obs,
                    "AggregatedCounts: same count out of range");
    detail::require(i == 0 || entries_[i - 1].pair != entries_[i].pair,
                    "AggregatedCounts: duplicate pair");
  }
}

const PairCount* AggregatedCounts::find(CellPair p) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                             [](const PairCount& e, const CellPair& q) { return e.pair < q; });
  return (it != entries_.end() && it->pair == p) ? &*it : nullptr;
}

int AggregatedCounts::max_cell() const noexcept {
  int m = -1;
  for (const auto& e : entries_) m = std::max(m, e.pair.b);
  return m;
}

AggregatedCounts aggregate_responses(const ResponseDataset& d) {
  std::map<CellPair, PairCount> acc;
  for (const auto& block : d.blocks) {
    detail::require(block.responses.size() == block.pairs.size(),
                    "aggregate_responses: responses and pairs differ in length");
    for (std::size_t t = 0; t < block.pairs.size(); ++t) {
      const CellPair p = CellPair::make(block.pairs.pairs[t].a, block.pairs.pairs[t].b);
      auto& e = acc[p];
      e.pair = p;
      e.same += block.responses[t] ? 1 : 0;
      e.n_obs += 1;
    }
  }
  std::vector<PairCount> out;
  out.reserve(acc.size());
  for (auto& [_, e] : acc) out.push_back(e);
  return AggregatedCounts(std::move(out));
}

const char* to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::IdenticalPointPair: return "identical-point pair";
    case ViolationKind::OutOfGrid: return "out-of-grid";
    case ViolationKind::LengthMismatch: return "length mismatch";
    case ViolationKind::InvalidResponse: return "invalid response";
    case ViolationKind::DuplicatePair: return "duplicate pair";
  }
  return "unknown";
}

std::vector<Violation> validate_dataset(const ResponseDataset& d) {
  std::vector<Violation> out;
  const int cells = d.grid.cells();
  for (std::size_t b = 0; b < d.blocks.size(); ++b) {
    const auto& block = d.blocks[b];
    const int bi = static_cast<int>(b);
    if (block.responses.size() != block.pairs.size()) {
      out.push_back({ViolationKind::LengthMismatch, bi, -1,
                     "block " + std::to_string(b) + " has " + std::to_string(block.pairs.size()) +
                         " pairs but " + std::to_string(block.responses.size()) + " responses"});
    }
    std::set<CellPair> seen;
    for (std::size_t t = 0; t < block.pairs.size(); ++t) {
      const int ti = static_cast<int>(t);
      const auto [i, j] = block.pairs.pairs[t];
      const std::string where = "block " + std::to_string(b) + " trial " + std::to_string(t);
      if (i < 0 || i >= cells || j < 0 || j >= cells) {
        out.push_back({ViolationKind::OutOfGrid, bi, ti, where + ": cell index outside the grid"});
        continue;
      }
      if (i == j) {
        out.push_back({ViolationKind::IdenticalPointPair, bi, ti, where + ": pair tests a cell against itself"});
        continue;
      }
      if (!seen.insert(CellPair::make(i, j)).second)
        out.push_back({ViolationKind::DuplicatePair, bi, ti, where + ": pair repeated within the block"});
      if (t < block.responses.size() && block.responses[t] > 1)
        out.push_back({ViolationKind::InvalidResponse, bi, ti, where + ": response is not 0 or 1"});
    }
  }
  return out;
}

}  // namespace pseg
