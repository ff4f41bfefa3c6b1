#pragma once

// Bit-parallel intersection of region filters and the per-base-region
// accumulator threaded through a multi-set query.

#include <span>
#include <vector>

#include "c23/cuckoo23.hpp"
#include "c23/types.hpp"
#include "c23/wordpack.hpp"

namespace c23 {

// Intersection state for one Ok region of the base set. Non-zero cells of
// `fingerprints` are always a subset of the base region's occupied cells,
// carrying the base fingerprints.
struct Accumulator {
  const RegionFilter* base = nullptr;
  PackedVec fingerprints;
  PackedVec occupied;
  // Ids confirmed by stash probes; they bypass the filters until verify().
  std::vector<ItemId> side_candidates;

  // Starts from the complete filter of `region`, which must be Ok.
  static Accumulator from_region(const RegionFilter& region);
};

// Fingerprints of acc that also sit in the same cell of `other`:
// match_mask(acc.F, other.F, acc.M) AND acc.F. No table lookups.
PackedVec intersect_partial(const Accumulator& acc, const RegionFilter& other, OpCounter* ops = nullptr);

// Stash items of either region found in the other one. `other_global`, when
// given, is the exact membership of the dataset `other` belongs to. Each id
// is emitted once.
std::vector<ItemId> probe_stashes(const RegionFilter& acc_region, const RegionFilter& other,
                                  const PositionMap* other_global = nullptr);

// OR of partials computed against disjoint regions of one set; all-zero
// (m, delta) vector when `parts` is empty.
PackedVec or_partials(std::span<const PackedVec> parts, unsigned m, unsigned delta, OpCounter* ops = nullptr);

// Copies every surviving fingerprint to its twin cell: F |= twin(F), then
// recomputes M. Throws ContractViolation if the base region is not Ok.
Accumulator restore_accumulator(Accumulator acc, OpCounter* ops = nullptr);

// Base-table items under all-ones cells of acc.occupied (each read once, at
// the lower cell of its twin pair) followed by the side candidates.
std::vector<ItemId> extract_candidates(const Accumulator& acc);

// Keeps candidates whose key lies in `range` and that belong to every set.
// Returns sorted, distinct ids. Throws DataIntegrityError when a candidate
// has no entry in `positions`.
std::vector<ItemId> verify(std::span<const ItemId> candidates, std::span<const PositionMap* const> sets,
                           const QueryRange& range, const PositionMap& positions);

}  // namespace c23
