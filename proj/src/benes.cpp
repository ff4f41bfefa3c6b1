#include "c23/benes.hpp"

#include <bit>
#include <string>

#include "c23/errors.hpp"

namespace c23 {

namespace {

class Router {
 public:
  explicit Router(BenesProgram& program) : program_(program), levels_(std::countr_zero(program.m)) {}

  // Routes the sub-network covering cells [offset, offset + perm.size()).
  void route(const std::vector<std::uint32_t>& perm, unsigned offset, unsigned level) {
    const auto n = static_cast<std::uint32_t>(perm.size());
    if (n == 2) {
      if (perm[0] == 1) set_switch(levels_ - 1, offset);
      return;
    }
    const std::uint32_t half = n / 2;
    std::vector<std::uint32_t> inverse(n);
    for (std::uint32_t i = 0; i < n; ++i) inverse[perm[i]] = i;

    // to_upper[i]: element i passes through the upper sub-network.
    std::vector<char> to_upper(n, 0);
    std::vector<char> done(half, 0);
    for (std::uint32_t start = 0; start < half; ++start) {
      if (done[start]) continue;
      std::uint32_t x = start;
      while (!done[x % half]) {
        done[x % half] = 1;
        to_upper[x] = 1;
        // The element sharing x's output switch must use the lower network,
        // which forces its input-switch partner into the upper one.
        const std::uint32_t rival = inverse[perm[x] ^ half];
        x = rival ^ half;
      }
    }

    const unsigned in_stage = level;
    const unsigned out_stage = 2 * levels_ - 2 - level;
    std::vector<std::uint32_t> upper(half), lower(half);
    for (std::uint32_t e = 0; e < n; ++e) {
      const std::uint32_t slot = e % half;
      const std::uint32_t dest = perm[e] % half;
      if (to_upper[e]) {
        upper[slot] = dest;
        if (e >= half) set_switch(in_stage, offset + slot);
        if (perm[e] >= half) set_switch(out_stage, offset + dest);
      } else {
        lower[slot] = dest;
      }
    }
    route(upper, offset, level + 1);
    route(lower, offset + half, level + 1);
  }

 private:
  void set_switch(unsigned stage, unsigned cell) {
    PackedVec& mask = program_.stages[stage].swap_mask;
    mask.set(cell, mask.cell_ones());
  }

  BenesProgram& program_;
  unsigned levels_;
};

}  // namespace

unsigned benes_stage_count(unsigned m) {
  if (m < 2 || !std::has_single_bit(m)) {
    throw ContractViolation("Benes network size must be a power of two >= 2, got " + std::to_string(m));
  }
  return 2 * static_cast<unsigned>(std::countr_zero(m)) - 1;
}

BenesProgram compile_permutation(std::span<const std::uint32_t> pi, unsigned delta) {
  const auto m = static_cast<unsigned>(pi.size());
  const unsigned stage_count = benes_stage_count(m);
  std::vector<char> seen(m, 0);
  for (std::uint32_t target : pi) {
    if (target >= m || seen[target]) {
      throw ContractViolation("compile_permutation: input is not a permutation of [0, " +
                              std::to_string(m) + ")");
    }
    seen[target] = 1;
  }

  BenesProgram program;
  program.m = m;
  program.delta = delta;
  const unsigned levels = std::countr_zero(m);
  for (unsigned s = 0; s < stage_count; ++s) {
    const unsigned shift = s < levels ? s + 1 : 2 * levels - 1 - s;
    program.stages.push_back({m >> shift, PackedVec(m, delta)});
  }
  Router(program).route(std::vector<std::uint32_t>(pi.begin(), pi.end()), 0, 0);
  return program;
}

PackedVec apply(const BenesProgram& p, const PackedVec& v, OpCounter* ops) {
  if (v.m() != p.m || v.delta() != p.delta) {
    throw ContractViolation("apply: vector shape (m=" + std::to_string(v.m()) + ", delta=" +
                            std::to_string(v.delta()) + ") does not match program (m=" +
                            std::to_string(p.m) + ", delta=" + std::to_string(p.delta) + ")");
  }
  PackedVec out = v;
  auto x = out.words();
  const std::size_t n_words = x.size();
  for (const BenesStage& stage : p.stages) {
    auto mask = stage.swap_mask.words();
    const std::size_t shift = std::size_t{stage.distance} * p.delta;
    if (shift % kWordBits == 0) {
      const std::size_t k = shift / kWordBits;
      for (std::size_t w = 0; w < n_words; ++w) {
        if ((w / k) % 2 != 0) continue;
        const std::uint64_t t = (x[w] ^ x[w + k]) & mask[w];
        x[w] ^= t;
        x[w + k] ^= t;
      }
      if (ops) ops->add(2 * n_words);  // 4 per word pair
    } else {
      const auto s = static_cast<unsigned>(shift);
      for (std::size_t w = 0; w < n_words; ++w) {
        const std::uint64_t t = ((x[w] >> s) ^ x[w]) & mask[w];
        x[w] ^= t ^ (t << s);
      }
      if (ops) ops->add(6 * n_words);
    }
  }
  return out;
}

}  // namespace c23
