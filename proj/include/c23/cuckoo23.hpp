#pragma once

// 2-3 cuckoo hash-filters for one interval region.
//
// Every stored item sits in exactly two of its three hash-chosen cells. The
// packed filter F mirrors the table with a non-zero fingerprint per occupied
// cell, M marks occupied cells with all ones, and a small stash keeps items
// the eviction walk could not place. When the stash would overflow the
// region falls back to a sorted id list.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "c23/benes.hpp"
#include "c23/types.hpp"
#include "c23/wordpack.hpp"

namespace c23 {

struct Params {
  PackParams pack;
  double epsilon = 0.1;
  unsigned capacity = 0;      // items per region (B); 0 derives floor(m / (6 (1 + epsilon)))
  unsigned evict_limit = 32;  // L: queue iterations per insertion before stashing
  unsigned stash_limit = 4;   // lambda
  std::uint64_t seed = 0x23C0C0A5EEDULL;

  unsigned region_capacity() const;
  void validate() const;

  friend bool operator==(const Params&, const Params&) = default;
};

struct CellTriple {
  std::array<std::uint32_t, 3> cells{};

  bool contains(std::uint32_t c) const { return cells[0] == c || cells[1] == c || cells[2] == c; }
  friend bool operator==(const CellTriple&, const CellTriple&) = default;
};

// Seeded 64-bit mixer shared by every hash in the index.
std::uint64_t mix64(std::uint64_t x);

// Three pairwise-distinct cells in [0, m). Throws ConfigError if m < 3.
CellTriple cell_triple(ItemId item, std::uint64_t seed, unsigned m);

// Non-zero delta-bit digest. Throws ConfigError if delta < 2 or delta > 64.
std::uint64_t fingerprint(ItemId item, std::uint64_t seed, unsigned delta);

enum class RegionStatus : std::uint8_t { Ok = 0, Fallback = 1 };

// Involution on [0, m): pi[c] is the twin cell of c, or c itself.
struct TwinPermutation {
  std::vector<std::uint32_t> pi;
};

struct RegionFilter {
  CurveKey key_lo = 0;
  CurveKey key_hi = 0;
  RegionStatus status = RegionStatus::Ok;
  std::uint64_t seed = 0;  // hash seed the cells were computed with

  // Ok regions.
  std::vector<std::optional<ItemId>> table;
  PackedVec fingerprints;  // F
  PackedVec occupied;      // M
  std::vector<ItemId> stash;
  TwinPermutation twin;
  BenesProgram twin_program;

  // Fallback regions, sorted by id.
  std::vector<ItemId> fallback_items;

  bool ok() const { return status == RegionStatus::Ok; }
  std::size_t size() const;

  // Every member id: table items (each once) and stash, or the fallback list.
  std::vector<ItemId> members() const;
};

// Builds the filter with the two-out-of-three random-walk insertion. Items
// must have distinct ids and there may be at most params.region_capacity()
// of them.
RegionFilter build_region(std::span<const Item> items, const Params& params);

// Fallback representation: the sorted item list only.
RegionFilter make_fallback_region(std::span<const Item> items);

// Ok region from an explicit placement. Recomputes F, M and the twin program
// and checks every table invariant; throws DataIntegrityError when the
// placement is not a valid 2-3 table for `params`.
RegionFilter assemble_region(CurveKey key_lo, CurveKey key_hi, std::vector<std::optional<ItemId>> table,
                             std::vector<ItemId> stash, const Params& params);

bool lookup_region(const RegionFilter& r, ItemId item);

// Throws UnsupportedOperation for fallback regions.
TwinPermutation twin_permutation(const RegionFilter& r);

}  // namespace c23
