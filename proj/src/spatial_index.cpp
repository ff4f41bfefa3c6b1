#include "c23/spatial_index.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>

#include "c23/errors.hpp"
#include "c23/intersect.hpp"

namespace c23 {

namespace {

void require_ordered(std::span<const RegionFilter* const> regions, const char* side) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const RegionFilter& r = *regions[i];
    bool ordered = r.key_lo <= r.key_hi;
    if (i > 0) {
      const RegionFilter& prev = *regions[i - 1];
      ordered = ordered && prev.key_lo <= r.key_lo && prev.key_hi <= r.key_hi;
    }
    if (!ordered) {
      throw ContractViolation(std::string("overlap_join: ") + side + " region list is not ordered at position " +
                              std::to_string(i));
    }
  }
}

bool same_region(const RegionFilter& a, const RegionFilter& b) {
  return a.key_lo == b.key_lo && a.key_hi == b.key_hi && a.status == b.status && a.table == b.table &&
         a.stash == b.stash && a.fallback_items == b.fallback_items;
}

}  // namespace

std::size_t Dataset::fallback_regions() const {
  return static_cast<std::size_t>(
      std::count_if(regions.begin(), regions.end(), [](const RegionFilter& r) { return !r.ok(); }));
}

std::vector<std::vector<Item>> partition(std::vector<Item> items, unsigned capacity) {
  if (capacity == 0) throw ContractViolation("partition: capacity must be positive");
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.id < b.id; });
  auto dup = std::adjacent_find(items.begin(), items.end(),
                                [](const Item& a, const Item& b) { return a.id == b.id; });
  if (dup != items.end()) throw IngestError("duplicate item id " + std::to_string(dup->id));

  // Ties on the key are broken by id so the layout is a pure function of the item set.
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.key != b.key ? a.key < b.key : a.id < b.id; });
  std::vector<std::vector<Item>> groups;
  for (std::size_t i = 0; i < items.size(); i += capacity) {
    const std::size_t end = std::min(items.size(), i + capacity);
    groups.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(i), items.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return groups;
}

std::vector<const RegionFilter*> prune_regions(const Dataset& d, const QueryRange& r) {
  const auto& regions = d.regions;
  if (r.lo > r.hi) return {};
  auto first = std::partition_point(regions.begin(), regions.end(),
                                    [&](const RegionFilter& g) { return g.key_hi < r.lo; });
  auto last = std::partition_point(first, regions.end(), [&](const RegionFilter& g) { return g.key_lo <= r.hi; });
  std::vector<const RegionFilter*> out;
  out.reserve(static_cast<std::size_t>(last - first));
  for (auto it = first; it != last; ++it) out.push_back(&*it);
  return out;
}

std::vector<std::pair<const RegionFilter*, const RegionFilter*>> overlap_join(
    std::span<const RegionFilter* const> a, std::span<const RegionFilter* const> b) {
  require_ordered(a, "left");
  require_ordered(b, "right");
  std::vector<std::pair<const RegionFilter*, const RegionFilter*>> out;
  std::size_t start = 0;
  for (const RegionFilter* ra : a) {
    while (start < b.size() && b[start]->key_hi < ra->key_lo) ++start;
    for (std::size_t j = start; j < b.size() && b[j]->key_lo <= ra->key_hi; ++j) {
      out.emplace_back(ra, b[j]);
    }
  }
  return out;
}

Index::Index(Params params) : params_(params) { params_.validate(); }

const Dataset& Index::dataset(DatasetId id) const {
  auto it = datasets_.find(id);
  if (it == datasets_.end()) throw NotFound("unknown dataset id " + std::to_string(id));
  return it->second;
}

void Index::add_dataset(DatasetId id, std::vector<Item> items) {
  if (datasets_.contains(id)) throw IngestError("dataset " + std::to_string(id) + " already exists");
  for (const Item& it : items) {
    for (const auto& [other_id, other] : datasets_) {
      auto pos = other.positions.find(it.id);
      if (pos != other.positions.end() && pos->second != it.key) {
        throw IngestError("item " + std::to_string(it.id) + " has key " + std::to_string(it.key) +
                          " in dataset " + std::to_string(id) + " but key " + std::to_string(pos->second) +
                          " in dataset " + std::to_string(other_id));
      }
    }
  }

  Dataset d;
  d.id = id;
  d.positions.reserve(items.size());
  for (const Item& it : items) d.positions.emplace(it.id, it.key);
  for (const auto& group : partition(std::move(items), params_.region_capacity())) {
    d.regions.push_back(build_region(group, params_));
  }
  datasets_.emplace(id, std::move(d));
}

void Index::insert_dataset(Dataset d) {
  const DatasetId id = d.id;
  if (!datasets_.emplace(id, std::move(d)).second) {
    throw IngestError("dataset " + std::to_string(id) + " already exists");
  }
}

bool operator==(const Index& a, const Index& b) {
  if (!(a.params_ == b.params_) || a.datasets_.size() != b.datasets_.size()) return false;
  for (const auto& [id, da] : a.datasets_) {
    auto it = b.datasets_.find(id);
    if (it == b.datasets_.end()) return false;
    const Dataset& db = it->second;
    if (da.positions != db.positions || da.regions.size() != db.regions.size()) return false;
    for (std::size_t i = 0; i < da.regions.size(); ++i) {
      if (!same_region(da.regions[i], db.regions[i])) return false;
    }
  }
  return true;
}

QueryResult query(const Index& idx, const QueryRange& r, std::span<const DatasetId> set_ids) {
  if (set_ids.empty()) throw ContractViolation("query needs at least one dataset");
  std::vector<DatasetId> ids(set_ids.begin(), set_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  struct PrunedSet {
    const Dataset* dataset;
    std::vector<const RegionFilter*> regions;
    std::size_t items = 0;
  };
  std::vector<PrunedSet> sets;
  for (DatasetId id : ids) {
    PrunedSet s{&idx.dataset(id), {}, 0};
    s.regions = prune_regions(*s.dataset, r);
    for (const RegionFilter* g : s.regions) s.items += g->size();
    sets.push_back(std::move(s));
  }
  std::stable_sort(sets.begin(), sets.end(),
                   [](const PrunedSet& a, const PrunedSet& b) { return a.items < b.items; });

  const Params& params = idx.params();
  OpCounter ops;
  QueryResult result;
  std::vector<ItemId> candidates;

  const PrunedSet& base = sets.front();
  std::vector<Accumulator> accs;
  std::unordered_map<const RegionFilter*, std::size_t> acc_of;
  for (const RegionFilter* g : base.regions) {
    if (!g->ok()) {
      candidates.insert(candidates.end(), g->fallback_items.begin(), g->fallback_items.end());
      continue;
    }
    acc_of.emplace(g, accs.size());
    accs.push_back(Accumulator::from_region(*g));
    if (sets.size() == 1) accs.back().side_candidates = g->stash;
  }

  std::vector<std::vector<PackedVec>> parts(accs.size());
  for (std::size_t k = 1; k < sets.size(); ++k) {
    const PrunedSet& other = sets[k];
    for (auto& p : parts) p.clear();
    for (const auto& [ga, gb] : overlap_join(base.regions, other.regions)) {
      if (!ga->ok() || !gb->ok()) ++result.stats.fallback_pairs;
      if (!ga->ok()) continue;  // its items are already candidates
      Accumulator& acc = accs[acc_of.at(ga)];
      // A fallback partner cannot filter; keep the overlap unchanged so no
      // member is lost before verification.
      parts[acc_of.at(ga)].push_back(gb->ok() ? intersect_partial(acc, *gb, &ops) : acc.fingerprints);
      for (ItemId x : probe_stashes(*ga, *gb, &other.dataset->positions)) acc.side_candidates.push_back(x);
    }
    for (std::size_t i = 0; i < accs.size(); ++i) {
      accs[i].fingerprints = or_partials(parts[i], params.pack.m, params.pack.delta, &ops);
      accs[i] = restore_accumulator(std::move(accs[i]), &ops);
    }
  }

  for (const Accumulator& acc : accs) {
    for (ItemId x : extract_candidates(acc)) candidates.push_back(x);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<const PositionMap*> memberships;
  for (const PrunedSet& s : sets) memberships.push_back(&s.dataset->positions);
  const PositionMap& positions = base.dataset->positions;
  const std::vector<ItemId> confirmed = verify(candidates, memberships, r, positions);

  result.items.reserve(confirmed.size());
  for (ItemId x : confirmed) result.items.push_back({x, positions.at(x)});
  result.stats.candidates = candidates.size();
  result.stats.false_positives_culled = candidates.size() - confirmed.size();
  result.stats.word_ops = ops.word_ops;
  return result;
}

std::vector<Item> baseline_query(const Index& idx, const QueryRange& r, std::span<const DatasetId> set_ids) {
  if (set_ids.empty()) throw ContractViolation("query needs at least one dataset");
  std::vector<const Dataset*> sets;
  for (DatasetId id : set_ids) sets.push_back(&idx.dataset(id));
  const Dataset* smallest =
      *std::min_element(sets.begin(), sets.end(), [](const Dataset* a, const Dataset* b) { return a->size() < b->size(); });
  std::vector<Item> out;
  for (const auto& [id, key] : smallest->positions) {
    if (!r.contains(key)) continue;
    if (std::all_of(sets.begin(), sets.end(), [id = id](const Dataset* d) { return d->contains(id); })) {
      out.push_back({id, key});
    }
  }
  std::sort(out.begin(), out.end(), [](const Item& a, const Item& b) { return a.id < b.id; });
  return out;
}

}  // namespace c23
