#pragma once

// Datasets of curve-keyed items split into interval regions, and spatial
// multiple-set intersection queries over them.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "c23/cuckoo23.hpp"
#include "c23/types.hpp"

namespace c23 {

using DatasetId = std::uint32_t;

// Z-order key: x bits in even positions, y bits in odd positions.
constexpr CurveKey morton_encode(std::uint32_t x, std::uint32_t y) {
  auto spread = [](std::uint64_t v) {
    v = (v | (v << 16)) & 0x0000FFFF0000FFFFULL;
    v = (v | (v << 8)) & 0x00FF00FF00FF00FFULL;
    v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0FULL;
    v = (v | (v << 2)) & 0x3333333333333333ULL;
    v = (v | (v << 1)) & 0x5555555555555555ULL;
    return v;
  };
  return spread(x) | (spread(y) << 1);
}

struct Dataset {
  DatasetId id = 0;
  PositionMap positions;  // exact membership, id -> key
  std::vector<RegionFilter> regions;  // ascending key ranges

  bool contains(ItemId x) const { return positions.contains(x); }
  std::size_t size() const { return positions.size(); }
  std::size_t fallback_regions() const;
};

struct QueryStats {
  std::uint64_t candidates = 0;              // distinct ids handed to verification
  std::uint64_t false_positives_culled = 0;  // candidates that verification rejected
  std::uint64_t fallback_pairs = 0;          // overlapping pairs touching a fallback region
  std::uint64_t word_ops = 0;

  friend bool operator==(const QueryStats&, const QueryStats&) = default;
};

struct QueryResult {
  std::vector<Item> items;  // sorted by id
  QueryStats stats;
};

// Sorts by (key, id) and cuts consecutive groups of `capacity` items; the
// last group may be shorter. Throws IngestError on duplicate ids.
std::vector<std::vector<Item>> partition(std::vector<Item> items, unsigned capacity);

// Regions with key_hi >= r.lo and key_lo <= r.hi, found by binary search.
std::vector<const RegionFilter*> prune_regions(const Dataset& d, const QueryRange& r);

// Every pair (a, b) with intersecting key ranges, by a linear merge. Both
// lists must be ordered: key_lo and key_hi non-decreasing, key_lo <= key_hi.
std::vector<std::pair<const RegionFilter*, const RegionFilter*>> overlap_join(
    std::span<const RegionFilter* const> a, std::span<const RegionFilter* const> b);

class Index {
 public:
  explicit Index(Params params = {});

  const Params& params() const { return params_; }
  const std::map<DatasetId, Dataset>& datasets() const { return datasets_; }
  const Dataset& dataset(DatasetId id) const;
  bool has_dataset(DatasetId id) const { return datasets_.contains(id); }

  // Partitions and builds all regions of a new dataset. Throws IngestError
  // on duplicate ids, a reused dataset id, or an item whose key differs from
  // its key in another dataset.
  void add_dataset(DatasetId id, std::vector<Item> items);

  // Installs an already-built dataset (used by load_index).
  void insert_dataset(Dataset d);

  friend bool operator==(const Index& a, const Index& b);

 private:
  Params params_;
  std::map<DatasetId, Dataset> datasets_;
};

// Items present in every listed dataset whose key lies in r. Throws
// NotFound for an unknown dataset id and ContractViolation if set_ids is
// empty.
QueryResult query(const Index& idx, const QueryRange& r, std::span<const DatasetId> set_ids);

// Brute-force answer from the raw item maps; the oracle for query().
std::vector<Item> baseline_query(const Index& idx, const QueryRange& r, std::span<const DatasetId> set_ids);

// Versioned little-endian binary image, see docs/FORMAT.md.
void save_index(const Index& idx, std::ostream& out);
void save_index(const Index& idx, const std::string& path);
std::vector<std::uint8_t> serialize_index(const Index& idx);

// Throws FormatError on bad magic/version, truncation, checksum mismatch or
// inconsistent content. Nothing is returned unless the whole image is valid.
Index load_index(std::istream& in);
Index load_index(const std::string& path);
Index deserialize_index(std::span<const std::uint8_t> bytes);

}  // namespace c23
