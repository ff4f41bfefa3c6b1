#pragma once

// Scalar reference implementations used by the tests. They work cell by cell
// on plain integer vectors and never call the word-parallel kernels.

#include <algorithm>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

#include "c23/types.hpp"

namespace c23::oracle {

using Cells = std::vector<std::uint64_t>;

inline std::uint64_t ones(unsigned delta) { return delta == 64 ? ~0ULL : (1ULL << delta) - 1; }

// Cells r with Mi[r] all ones and Fi[r] == Fj[r].
inline std::vector<std::size_t> matching_cells(const Cells& fi, const Cells& fj, const Cells& mi, unsigned delta) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < fi.size(); ++r) {
    if (mi[r] == ones(delta) && fi[r] == fj[r]) out.push_back(r);
  }
  return out;
}

inline Cells nonzero_cells(const Cells& f, unsigned delta) {
  Cells out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] != 0 ? ones(delta) : 0;
  return out;
}

// Cell pi[i] of the result holds cell i of v.
inline Cells permute(const Cells& v, const std::vector<std::uint32_t>& pi) {
  Cells out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[pi[i]] = v[i];
  return out;
}

inline std::vector<std::uint32_t> random_permutation(std::size_t m, std::mt19937_64& rng) {
  std::vector<std::uint32_t> pi(m);
  for (std::size_t i = 0; i < m; ++i) pi[i] = static_cast<std::uint32_t>(i);
  std::shuffle(pi.begin(), pi.end(), rng);
  return pi;
}

// Random involution: a random matching of a random subset of cells.
inline std::vector<std::uint32_t> random_involution(std::size_t m, std::mt19937_64& rng) {
  std::vector<std::uint32_t> order = random_permutation(m, rng);
  std::vector<std::uint32_t> pi(m);
  for (std::size_t i = 0; i < m; ++i) pi[i] = static_cast<std::uint32_t>(i);
  const std::size_t pairs = std::uniform_int_distribution<std::size_t>(0, m / 2)(rng);
  for (std::size_t k = 0; k < pairs; ++k) {
    pi[order[2 * k]] = order[2 * k + 1];
    pi[order[2 * k + 1]] = order[2 * k];
  }
  return pi;
}

inline Cells random_cells(std::size_t m, unsigned delta, std::mt19937_64& rng, bool nonzero = false) {
  Cells out(m);
  for (auto& c : out) {
    c = rng() & ones(delta);
    if (nonzero && c == 0) c = 1;
  }
  return out;
}

// Hash-set intersection of the given sets restricted to [lo, hi], sorted by id.
inline std::vector<Item> brute_force_query(const std::vector<const std::vector<Item>*>& sets, const QueryRange& r) {
  std::vector<Item> out;
  if (sets.empty()) return out;
  std::vector<std::unordered_set<ItemId>> members;
  for (const auto* s : sets) {
    std::unordered_set<ItemId> ids;
    for (const Item& it : *s) ids.insert(it.id);
    members.push_back(std::move(ids));
  }
  for (const Item& it : *sets.front()) {
    if (it.key < r.lo || it.key > r.hi) continue;
    bool all = true;
    for (const auto& m : members) all = all && m.contains(it.id);
    if (all) out.push_back(it);
  }
  std::sort(out.begin(), out.end(), [](const Item& a, const Item& b) { return a.id < b.id; });
  return out;
}

}  // namespace c23::oracle
