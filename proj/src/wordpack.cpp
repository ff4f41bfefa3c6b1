#include "c23/wordpack.hpp"

#include <bit>
#include <string>

#include "c23/errors.hpp"

namespace c23 {

namespace {

bool valid_delta(unsigned delta) { return delta >= 1 && delta <= kWordBits && std::has_single_bit(delta); }

void require_same_shape(const PackedVec& a, const PackedVec& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ContractViolation(std::string(what) + ": shape mismatch (m=" + std::to_string(a.m()) +
                            "/" + std::to_string(b.m()) + ", delta=" + std::to_string(a.delta()) +
                            "/" + std::to_string(b.delta()) + ")");
  }
}

// High bit of each lane set iff the lane is non-zero. Carries never leave a
// lane because (x & low) + low < 2^delta.
std::uint64_t nonzero_high_bits(std::uint64_t x, std::uint64_t low, std::uint64_t high) {
  return (((x & low) + low) | x) & high;
}

}  // namespace

void PackParams::validate() const {
  if (!valid_delta(delta) || delta < 2) {
    throw ConfigError("delta must be a power of two in [2, 64], got " + std::to_string(delta));
  }
  if (m < 4 || !std::has_single_bit(m)) {
    throw ConfigError("m must be a power of two >= 4, got " + std::to_string(m));
  }
  if ((std::size_t{m} * delta) % kWordBits != 0) {
    throw ConfigError("m*delta must be a multiple of 64");
  }
}

PackedVec::PackedVec(unsigned m, unsigned delta) : m_(m), delta_(delta) {
  if (!valid_delta(delta)) {
    throw ContractViolation("delta must be a power of two in [1, 64], got " + std::to_string(delta));
  }
  if (m == 0) {
    throw ContractViolation("PackedVec needs at least one cell");
  }
  words_.assign((std::size_t{m} * delta + kWordBits - 1) / kWordBits, 0);
}

PackedVec PackedVec::from_words(unsigned m, unsigned delta, std::vector<std::uint64_t> words) {
  PackedVec v(m, delta);
  if (words.size() != v.words_.size()) {
    throw ContractViolation("from_words: expected " + std::to_string(v.words_.size()) +
                            " words, got " + std::to_string(words.size()));
  }
  const std::size_t used = std::size_t{m} * delta % kWordBits;
  if (used != 0 && (words.back() >> used) != 0) {
    throw ContractViolation("from_words: padding bits must be zero");
  }
  v.words_ = std::move(words);
  return v;
}

PackedVec PackedVec::from_cells(unsigned delta, std::span<const std::uint64_t> cells) {
  PackedVec v(static_cast<unsigned>(cells.size()), delta);
  for (std::size_t i = 0; i < cells.size(); ++i) v.set(i, cells[i]);
  return v;
}

std::uint64_t PackedVec::get(std::size_t i) const {
  if (i >= m_) {
    throw ContractViolation("cell index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(m_) + ")");
  }
  const std::size_t bit = i * delta_;
  return (words_[bit / kWordBits] >> (bit % kWordBits)) & cell_ones();
}

void PackedVec::set(std::size_t i, std::uint64_t x) {
  if (i >= m_) {
    throw ContractViolation("cell index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(m_) + ")");
  }
  if ((x & ~cell_ones()) != 0) {
    throw ContractViolation("value " + std::to_string(x) + " does not fit in " +
                            std::to_string(delta_) + " bits");
  }
  const std::size_t bit = i * delta_;
  std::uint64_t& w = words_[bit / kWordBits];
  const unsigned shift = bit % kWordBits;
  w = (w & ~(cell_ones() << shift)) | (x << shift);
}

bool PackedVec::is_zero() const {
  for (std::uint64_t w : words_) {
    if (w != 0) return false;
  }
  return true;
}

std::uint64_t lane_pattern(unsigned delta, std::uint64_t value) {
  std::uint64_t out = 0;
  for (unsigned s = 0; s < kWordBits; s += delta) out |= value << s;
  return out;
}

std::uint64_t subword_get(const PackedVec& v, std::size_t i) { return v.get(i); }

PackedVec subword_set(PackedVec v, std::size_t i, std::uint64_t x) {
  v.set(i, x);
  return v;
}

PackedVec match_mask(const PackedVec& fi, const PackedVec& fj, const PackedVec& mi, OpCounter* ops) {
  require_same_shape(fi, fj, "match_mask");
  require_same_shape(fi, mi, "match_mask");
  PackedVec out(fi.m(), fi.delta());
  const unsigned delta = fi.delta();
  const std::uint64_t ones = fi.cell_ones();
  const std::uint64_t high = lane_pattern(delta, 1ULL << (delta - 1));
  const std::uint64_t low = lane_pattern(delta, ones >> 1);
  auto a = fi.words();
  auto b = fj.words();
  auto mask = mi.words();
  auto dst = out.words();
  for (std::size_t w = 0; w < dst.size(); ++w) {
    const std::uint64_t agree = mask[w] & ~(a[w] ^ b[w]);
    // Lanes that agree on only some bits collapse to zero.
    const std::uint64_t full = high & ~nonzero_high_bits(~agree, low, high);
    dst[w] = (full >> (delta - 1)) * ones;
  }
  if (ops) ops->add(3 * dst.size());  // xor, and-not, packed compare
  return out;
}

std::vector<std::size_t> all_ones_cells(const PackedVec& a) {
  std::vector<std::size_t> cells;
  const unsigned delta = a.delta();
  const std::uint64_t high = lane_pattern(delta, 1ULL << (delta - 1));
  const std::uint64_t low = lane_pattern(delta, a.cell_ones() >> 1);
  const unsigned per_word = a.cells_per_word();
  auto words = a.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    // A lane is all ones iff its complement is zero.
    std::uint64_t flags = high & ~nonzero_high_bits(~words[w], low, high);
    while (flags != 0) {
      const std::size_t cell = w * per_word + static_cast<unsigned>(std::countr_zero(flags)) / delta;
      if (cell >= a.m()) break;
      cells.push_back(cell);
      flags &= flags - 1;
    }
  }
  return cells;
}

PackedVec nonzero_mask(const PackedVec& f, OpCounter* ops) {
  PackedVec out(f.m(), f.delta());
  const unsigned delta = f.delta();
  const std::uint64_t ones = f.cell_ones();
  const std::uint64_t high = lane_pattern(delta, 1ULL << (delta - 1));
  const std::uint64_t low = lane_pattern(delta, ones >> 1);
  auto src = f.words();
  auto dst = out.words();
  for (std::size_t w = 0; w < dst.size(); ++w) {
    // Lane flag in the high bit, moved to bit 0 and spread across the lane.
    dst[w] = (nonzero_high_bits(src[w], low, high) >> (delta - 1)) * ones;
  }
  if (ops) ops->add(dst.size());  // one packed compare per word
  return out;
}

PackedVec bitwise_or(const PackedVec& a, const PackedVec& b, OpCounter* ops) {
  require_same_shape(a, b, "bitwise_or");
  PackedVec out = a;
  auto dst = out.words();
  auto src = b.words();
  for (std::size_t w = 0; w < dst.size(); ++w) dst[w] |= src[w];
  if (ops) ops->add(dst.size());
  return out;
}

PackedVec bitwise_and(const PackedVec& a, const PackedVec& b, OpCounter* ops) {
  require_same_shape(a, b, "bitwise_and");
  PackedVec out = a;
  auto dst = out.words();
  auto src = b.words();
  for (std::size_t w = 0; w < dst.size(); ++w) dst[w] &= src[w];
  if (ops) ops->add(dst.size());
  return out;
}

}  // namespace c23
