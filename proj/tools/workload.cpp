#include "workload.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "c23/cuckoo23.hpp"

namespace c23::cli {

std::vector<std::vector<Item>> make_workload(const WorkloadSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::unordered_set<ItemId> used;
  auto fresh_id = [&] {
    for (;;) {
      const ItemId id = rng();
      if (used.insert(id).second) return id;
    }
  };
  const std::uint64_t key_salt = mix64(spec.seed ^ 0x6B65795F73616C74ULL);
  auto key_of = [&](ItemId id) { return mix64(id ^ key_salt) % spec.key_space; };

  const std::size_t largest = spec.sizes.empty() ? 0 : *std::max_element(spec.sizes.begin(), spec.sizes.end());
  const auto pool_size = static_cast<std::size_t>(std::ceil(spec.overlap * static_cast<double>(largest) * 1.25));
  std::vector<ItemId> pool(pool_size);
  for (ItemId& id : pool) id = fresh_id();

  std::vector<std::vector<Item>> sets;
  for (std::size_t n : spec.sizes) {
    const auto shared = std::min(pool.size(), static_cast<std::size_t>(std::llround(spec.overlap * static_cast<double>(n))));
    // Partial Fisher-Yates: the first `shared` pool entries become a random sample.
    for (std::size_t i = 0; i < shared; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<Item> items;
    items.reserve(n);
    for (std::size_t i = 0; i < shared; ++i) items.push_back({pool[i], key_of(pool[i])});
    while (items.size() < n) {
      const ItemId id = fresh_id();
      items.push_back({id, key_of(id)});
    }
    std::shuffle(items.begin(), items.end(), rng);
    sets.push_back(std::move(items));
  }
  return sets;
}

}  // namespace c23::cli
