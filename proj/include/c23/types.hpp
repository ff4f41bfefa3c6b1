#pragma once

#include <cstdint>
#include <unordered_map>

namespace c23 {

using ItemId = std::uint64_t;

// Position along the shared one-dimensional curve. Ordered by integer value.
using CurveKey = std::uint64_t;

struct Item {
  ItemId id = 0;
  CurveKey key = 0;

  friend bool operator==(const Item&, const Item&) = default;
};

// Closed interval [lo, hi] of curve keys.
struct QueryRange {
  CurveKey lo = 0;
  CurveKey hi = 0;

  bool contains(CurveKey k) const { return lo <= k && k <= hi; }
};

// Exact id -> key map of one dataset. Doubles as the dataset's membership set.
using PositionMap = std::unordered_map<ItemId, CurveKey>;

}  // namespace c23
