#pragma once

// Benes (double butterfly) networks over the cells of a PackedVec.
//
// A program for m = 2^k cells has 2k-1 stages with distances
// m/2, m/4, ..., 2, 1, 2, ..., m/2. Stage s exchanges cell p with cell
// p + distance wherever its swap mask has an all-ones cell at p; only
// positions whose `distance` bit is clear can carry a switch.

#include <cstdint>
#include <span>
#include <vector>

#include "c23/wordpack.hpp"

namespace c23 {

struct BenesStage {
  unsigned distance = 0;
  PackedVec swap_mask;

  friend bool operator==(const BenesStage&, const BenesStage&) = default;
};

struct BenesProgram {
  unsigned m = 0;
  unsigned delta = 0;
  std::vector<BenesStage> stages;

  friend bool operator==(const BenesProgram&, const BenesProgram&) = default;
};

// Number of stages of a Benes network on m = 2^k cells: 2k - 1.
unsigned benes_stage_count(unsigned m);

// Switch settings routing the cell at position i to position pi[i], encoded
// as masks for cells of `delta` bits. Loops of the switch-setting pass start
// at the lowest unrouted input pair with the straight setting, so the result
// is a deterministic function of pi.
//
// Throws ContractViolation if pi is not a bijection on [0, m) or m is not a
// power of two >= 2.
BenesProgram compile_permutation(std::span<const std::uint32_t> pi, unsigned delta);

// Cell pi(i) of the result equals cell i of v. Each stage is one masked
// swap: t = (v ^ (v >> d)) & mask; v ^= t ^ (t << d), done inside a word when
// both partners share one, or as a word-pair exchange when d*delta is a
// multiple of 64.
PackedVec apply(const BenesProgram& p, const PackedVec& v, OpCounter* ops = nullptr);

}  // namespace c23
