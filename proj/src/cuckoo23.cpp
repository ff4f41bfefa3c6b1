#include "c23/cuckoo23.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "c23/errors.hpp"

namespace c23 {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kFingerprintTag = 0xF1F9E2D3C4B5A697ULL;
constexpr std::uint64_t kEvictTag = 0x5EEDE71C7ED00001ULL;

std::uint64_t keyed_hash(ItemId item, std::uint64_t seed, std::uint64_t tag) {
  return mix64(item ^ mix64(seed ^ mix64(tag)));
}

std::uint32_t reduce(std::uint64_t h, unsigned m) {
  return static_cast<std::uint32_t>((static_cast<unsigned __int128>(h) * m) >> 64);
}

// splitmix64 stream for eviction choices.
class EvictionRng {
 public:
  explicit EvictionRng(std::uint64_t state) : state_(state) {}

  std::uint32_t below(std::uint32_t n) {
    state_ += kGolden;
    return reduce(mix64(state_), n);
  }

 private:
  std::uint64_t state_;
};

class TableBuilder {
 public:
  TableBuilder(const Params& params, std::uint64_t rng_state)
      : params_(params), m_(params.pack.m), table_(m_), rng_(rng_state) {}

  // Returns false when the stash overflows.
  bool insert(ItemId x) {
    unsigned iterations = 0;
    for (int instance = 0; instance < 2; ++instance) {
      if (in_stash(x)) break;
      place(x);
      while (!queue_.empty()) {
        if (iterations >= params_.evict_limit) {
          if (!stash_queue()) return false;
          break;
        }
        ++iterations;
        const ItemId y = queue_.front();
        queue_.pop_front();
        place(y);
      }
    }
    return true;
  }

  std::vector<std::optional<ItemId>> take_table() { return std::move(table_); }
  std::vector<ItemId> take_stash() { return std::move(stash_); }

 private:
  // One-out-of-three insertion of one instance of y, skipping cells that
  // already hold y. Evicts a random occupant when every candidate is full.
  void place(ItemId y) {
    const CellTriple triple = cell_triple(y, params_.seed, m_);
    std::array<std::uint32_t, 3> candidates{};
    unsigned n = 0;
    for (std::uint32_t c : triple.cells) {
      if (table_[c] != y) candidates[n++] = c;
    }
    for (unsigned i = 0; i < n; ++i) {
      if (!table_[candidates[i]]) {
        table_[candidates[i]] = y;
        return;
      }
    }
    const std::uint32_t victim_cell = candidates[rng_.below(n)];
    queue_.push_back(*table_[victim_cell]);
    table_[victim_cell] = y;
  }

  bool in_stash(ItemId x) const { return std::find(stash_.begin(), stash_.end(), x) != stash_.end(); }

  // Stopping condition: every queued item leaves the table for the stash.
  bool stash_queue() {
    for (ItemId q : queue_) {
      for (auto& cell : table_) {
        if (cell == q) cell.reset();
      }
      if (!in_stash(q)) stash_.push_back(q);
    }
    queue_.clear();
    return stash_.size() <= params_.stash_limit;
  }

  const Params& params_;
  unsigned m_;
  std::vector<std::optional<ItemId>> table_;
  std::vector<ItemId> stash_;
  std::deque<ItemId> queue_;
  EvictionRng rng_;
};

}  // namespace

unsigned Params::region_capacity() const {
  if (capacity != 0) return capacity;
  return static_cast<unsigned>(std::floor(pack.m / (6.0 * (1.0 + epsilon)) + 1e-9));
}

void Params::validate() const {
  pack.validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be a positive finite number");
  }
  if (evict_limit < 1) throw ConfigError("evict limit L must be >= 1");
  const unsigned b = region_capacity();
  if (b < 1) {
    throw ConfigError("m=" + std::to_string(pack.m) + " is too small for epsilon=" + std::to_string(epsilon));
  }
  if (pack.m + 1e-9 < 6.0 * (1.0 + epsilon) * b) {
    throw ConfigError("region capacity " + std::to_string(b) + " needs m >= 6(1+epsilon)B");
  }
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

CellTriple cell_triple(ItemId item, std::uint64_t seed, unsigned m) {
  if (m < 3) throw ConfigError("cell_triple needs m >= 3, got " + std::to_string(m));
  CellTriple t;
  unsigned found = 0;
  for (std::uint64_t counter = 1; found < 3; ++counter) {
    const std::uint32_t c = reduce(keyed_hash(item, seed, counter), m);
    if (std::find(t.cells.begin(), t.cells.begin() + found, c) == t.cells.begin() + found) {
      t.cells[found++] = c;
    }
  }
  return t;
}

std::uint64_t fingerprint(ItemId item, std::uint64_t seed, unsigned delta) {
  if (delta < 2 || delta > kWordBits) {
    throw ConfigError("fingerprint width must be in [2, 64], got " + std::to_string(delta));
  }
  const std::uint64_t ones = delta == kWordBits ? ~0ULL : (1ULL << delta) - 1;
  const std::uint64_t f = keyed_hash(item, seed, kFingerprintTag) & ones;
  return f == 0 ? 1 : f;
}

std::size_t RegionFilter::size() const {
  if (!ok()) return fallback_items.size();
  std::size_t cells = 0;
  for (const auto& c : table) cells += c.has_value();
  return cells / 2 + stash.size();
}

std::vector<ItemId> RegionFilter::members() const {
  if (!ok()) return fallback_items;
  std::vector<ItemId> out;
  for (std::size_t c = 0; c < table.size(); ++c) {
    if (table[c] && twin.pi[c] > c) out.push_back(*table[c]);
  }
  out.insert(out.end(), stash.begin(), stash.end());
  std::sort(out.begin(), out.end());
  return out;
}

RegionFilter make_fallback_region(std::span<const Item> items) {
  RegionFilter r;
  r.status = RegionStatus::Fallback;
  if (!items.empty()) {
    auto [lo, hi] = std::minmax_element(items.begin(), items.end(),
                                        [](const Item& a, const Item& b) { return a.key < b.key; });
    r.key_lo = lo->key;
    r.key_hi = hi->key;
  }
  r.fallback_items.reserve(items.size());
  for (const Item& it : items) r.fallback_items.push_back(it.id);
  std::sort(r.fallback_items.begin(), r.fallback_items.end());
  return r;
}

RegionFilter assemble_region(CurveKey key_lo, CurveKey key_hi, std::vector<std::optional<ItemId>> table,
                             std::vector<ItemId> stash, const Params& params) {
  const unsigned m = params.pack.m;
  const unsigned delta = params.pack.delta;
  if (table.size() != m) {
    throw DataIntegrityError("region table has " + std::to_string(table.size()) + " cells, expected " +
                             std::to_string(m));
  }
  if (stash.size() > params.stash_limit) {
    throw DataIntegrityError("stash holds " + std::to_string(stash.size()) + " items, limit is " +
                             std::to_string(params.stash_limit));
  }

  RegionFilter r;
  r.key_lo = key_lo;
  r.key_hi = key_hi;
  r.status = RegionStatus::Ok;
  r.seed = params.seed;
  r.fingerprints = PackedVec(m, delta);
  r.occupied = PackedVec(m, delta);
  r.twin.pi.resize(m);
  for (std::uint32_t c = 0; c < m; ++c) r.twin.pi[c] = c;

  std::unordered_map<ItemId, std::uint32_t> first_cell;
  for (std::uint32_t c = 0; c < m; ++c) {
    if (!table[c]) continue;
    const ItemId x = *table[c];
    if (!cell_triple(x, params.seed, m).contains(c)) {
      throw DataIntegrityError("item " + std::to_string(x) + " stored outside its cell triple");
    }
    auto [it, fresh] = first_cell.try_emplace(x, c);
    if (!fresh) {
      const std::uint32_t other = it->second;
      if (r.twin.pi[other] != other) {
        throw DataIntegrityError("item " + std::to_string(x) + " stored in more than two cells");
      }
      r.twin.pi[other] = c;
      r.twin.pi[c] = other;
    }
    r.fingerprints.set(c, fingerprint(x, params.seed, delta));
    r.occupied.set(c, r.occupied.cell_ones());
  }
  for (const auto& [x, c] : first_cell) {
    if (r.twin.pi[c] == c) {
      throw DataIntegrityError("item " + std::to_string(x) + " stored in only one cell");
    }
  }
  std::unordered_set<ItemId> stashed;
  for (ItemId x : stash) {
    if (first_cell.contains(x) || !stashed.insert(x).second) {
      throw DataIntegrityError("stash item " + std::to_string(x) + " is duplicated");
    }
  }

  r.table = std::move(table);
  r.stash = std::move(stash);
  r.twin_program = compile_permutation(r.twin.pi, delta);
  return r;
}

RegionFilter build_region(std::span<const Item> items, const Params& params) {
  const unsigned capacity = params.region_capacity();
  if (items.size() > capacity) {
    throw ContractViolation("region holds " + std::to_string(items.size()) + " items, capacity is " +
                            std::to_string(capacity));
  }
  std::unordered_set<ItemId> ids;
  for (const Item& it : items) {
    if (!ids.insert(it.id).second) {
      throw IngestError("duplicate item id " + std::to_string(it.id) + " within a region");
    }
  }

  CurveKey lo = 0, hi = 0;
  if (!items.empty()) {
    lo = hi = items.front().key;
    for (const Item& it : items) {
      lo = std::min(lo, it.key);
      hi = std::max(hi, it.key);
    }
  }

  const std::uint64_t rng_state =
      mix64(params.seed ^ kEvictTag) ^ mix64(items.empty() ? 0 : items.front().id) ^ items.size();
  TableBuilder builder(params, rng_state);
  for (const Item& it : items) {
    if (!builder.insert(it.id)) {
      RegionFilter r = make_fallback_region(items);
      r.seed = params.seed;
      return r;
    }
  }
  return assemble_region(lo, hi, builder.take_table(), builder.take_stash(), params);
}

bool lookup_region(const RegionFilter& r, ItemId item) {
  if (!r.ok()) return std::binary_search(r.fallback_items.begin(), r.fallback_items.end(), item);
  if (!r.table.empty()) {
    for (std::uint32_t c : cell_triple(item, r.seed, static_cast<unsigned>(r.table.size())).cells) {
      if (r.table[c] == item) return true;
    }
  }
  return std::find(r.stash.begin(), r.stash.end(), item) != r.stash.end();
}

TwinPermutation twin_permutation(const RegionFilter& r) {
  if (!r.ok()) throw UnsupportedOperation("fallback regions have no twin permutation");
  return r.twin;
}

}  // namespace c23
