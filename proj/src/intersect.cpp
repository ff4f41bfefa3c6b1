#include "c23/intersect.hpp"

#include <algorithm>
#include <string>

#include "c23/errors.hpp"

namespace c23 {

Accumulator Accumulator::from_region(const RegionFilter& region) {
  if (!region.ok()) throw ContractViolation("accumulators need an Ok base region");
  Accumulator acc;
  acc.base = &region;
  acc.fingerprints = region.fingerprints;
  acc.occupied = region.occupied;
  return acc;
}

PackedVec intersect_partial(const Accumulator& acc, const RegionFilter& other, OpCounter* ops) {
  if (!other.ok()) throw ContractViolation("intersect_partial: fallback regions must be routed separately");
  PackedVec matches = match_mask(acc.fingerprints, other.fingerprints, acc.occupied, ops);
  return bitwise_and(matches, acc.fingerprints, ops);
}

std::vector<ItemId> probe_stashes(const RegionFilter& acc_region, const RegionFilter& other,
                                  const PositionMap* other_global) {
  std::vector<ItemId> out;
  auto emit = [&out](ItemId x) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  };
  for (ItemId x : acc_region.stash) {
    if (lookup_region(other, x) || (other_global && other_global->contains(x))) emit(x);
  }
  for (ItemId x : other.stash) {
    if (lookup_region(acc_region, x)) emit(x);
  }
  return out;
}

PackedVec or_partials(std::span<const PackedVec> parts, unsigned m, unsigned delta, OpCounter* ops) {
  PackedVec out(m, delta);
  for (const PackedVec& p : parts) out = bitwise_or(out, p, ops);
  return out;
}

Accumulator restore_accumulator(Accumulator acc, OpCounter* ops) {
  if (acc.base == nullptr || !acc.base->ok()) {
    throw ContractViolation("restore_accumulator: base region has no twin program");
  }
  PackedVec twins = apply(acc.base->twin_program, acc.fingerprints, ops);
  acc.fingerprints = bitwise_or(acc.fingerprints, twins, ops);
  acc.occupied = nonzero_mask(acc.fingerprints, ops);
  return acc;
}

std::vector<ItemId> extract_candidates(const Accumulator& acc) {
  std::vector<ItemId> out;
  const RegionFilter& base = *acc.base;
  for (std::size_t c : all_ones_cells(acc.occupied)) {
    const std::size_t twin = base.twin.pi[c];
    const std::size_t canonical = std::min(c, twin);
    if (c != canonical && acc.occupied.get(canonical) != 0) continue;
    if (base.table[c]) out.push_back(*base.table[c]);
  }
  out.insert(out.end(), acc.side_candidates.begin(), acc.side_candidates.end());
  return out;
}

std::vector<ItemId> verify(std::span<const ItemId> candidates, std::span<const PositionMap* const> sets,
                           const QueryRange& range, const PositionMap& positions) {
  std::vector<ItemId> out;
  for (ItemId x : candidates) {
    auto pos = positions.find(x);
    if (pos == positions.end()) {
      throw DataIntegrityError("candidate " + std::to_string(x) + " has no known position");
    }
    if (!range.contains(pos->second)) continue;
    const bool everywhere =
        std::all_of(sets.begin(), sets.end(), [x](const PositionMap* s) { return s->contains(x); });
    if (everywhere) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace c23
