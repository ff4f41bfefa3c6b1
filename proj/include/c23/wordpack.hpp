#pragma once

// Packed subword vectors and the bit-parallel kernels used by 2-3 cuckoo
// filters.
//
// A PackedVec holds m cells of delta bits each, packed little-endian into
// 64-bit words: cell i occupies bits [i*delta, (i+1)*delta) of the bit string
// formed by word 0, word 1, ... Bits past m*delta are always zero.
//
// All kernels work on 64-bit words regardless of the host word size, so hex
// golden vectors are portable.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace c23 {

inline constexpr unsigned kWordBits = 64;

// Counts logical word primitives executed by the kernels: AND, OR, XOR, NOT,
// shift, add/sub, multiply and packed subword compare, one per 64-bit word
// operand. Word loads and stores are not counted. One counter belongs to one
// query and is never shared between threads.
struct OpCounter {
  std::uint64_t word_ops = 0;

  void add(std::uint64_t n) { word_ops += n; }
};

struct PackParams {
  unsigned delta = 16;  // fingerprint bits per cell
  unsigned m = 64;      // cells per filter, power of two

  std::size_t word_count() const { return (std::size_t{m} * delta + kWordBits - 1) / kWordBits; }

  // Region-filter layout: delta divides 64, m is a power of two >= 4 and the
  // filter fills whole words.
  void validate() const;

  friend bool operator==(const PackParams&, const PackParams&) = default;
};

class PackedVec {
 public:
  PackedVec() = default;

  // All-zero vector. delta must be a power of two in [1, 64]; m >= 1.
  PackedVec(unsigned m, unsigned delta);

  // Adopts raw words; throws ContractViolation on a size mismatch or
  // non-zero padding.
  static PackedVec from_words(unsigned m, unsigned delta, std::vector<std::uint64_t> words);

  // Builds a vector from one value per cell.
  static PackedVec from_cells(unsigned delta, std::span<const std::uint64_t> cells);

  unsigned m() const { return m_; }
  unsigned delta() const { return delta_; }
  std::size_t word_count() const { return words_.size(); }

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  std::uint64_t get(std::size_t i) const;
  void set(std::size_t i, std::uint64_t x);

  // Value with all delta bits set.
  std::uint64_t cell_ones() const { return delta_ == kWordBits ? ~0ULL : (1ULL << delta_) - 1; }
  unsigned cells_per_word() const { return kWordBits / delta_; }

  bool is_zero() const;
  bool same_shape(const PackedVec& o) const { return m_ == o.m_ && delta_ == o.delta_; }

  friend bool operator==(const PackedVec&, const PackedVec&) = default;

 private:
  unsigned m_ = 0;
  unsigned delta_ = 0;
  std::vector<std::uint64_t> words_;
};

// The word that repeats `value` in every delta-bit lane, e.g. lane_pattern(16, 1)
// == 0x0001000100010001.
std::uint64_t lane_pattern(unsigned delta, std::uint64_t value);

std::uint64_t subword_get(const PackedVec& v, std::size_t i);
PackedVec subword_set(PackedVec v, std::size_t i, std::uint64_t x);

// Mi AND NOT (Fi XOR Fj), collapsed per cell: cell r is all ones iff
// Mi[r] is all ones and Fi[r] == Fj[r], zero otherwise.
PackedVec match_mask(const PackedVec& fi, const PackedVec& fj, const PackedVec& mi,
                     OpCounter* ops = nullptr);

// Ascending indices of all-ones cells. Exact for arbitrary input, although
// callers normally pass masks whose cells are all ones or all zeros.
std::vector<std::size_t> all_ones_cells(const PackedVec& a);

// Cell i of the result is all ones iff cell i of f is non-zero.
PackedVec nonzero_mask(const PackedVec& f, OpCounter* ops = nullptr);

PackedVec bitwise_or(const PackedVec& a, const PackedVec& b, OpCounter* ops = nullptr);
PackedVec bitwise_and(const PackedVec& a, const PackedVec& b, OpCounter* ops = nullptr);

}  // namespace c23
