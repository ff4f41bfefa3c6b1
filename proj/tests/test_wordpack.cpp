#include <gtest/gtest.h>

#include <random>

#include "c23/errors.hpp"
#include "c23/wordpack.hpp"
#include "oracles.hpp"

namespace {

using c23::PackedVec;

PackedVec nibbles(std::initializer_list<std::uint64_t> cells) {
  std::vector<std::uint64_t> v(cells);
  return PackedVec::from_cells(4, v);
}

PackedVec all_ones(unsigned m, unsigned delta) {
  PackedVec v(m, delta);
  for (unsigned i = 0; i < m; ++i) v.set(i, v.cell_ones());
  return v;
}

std::vector<std::uint64_t> cells_of(const PackedVec& v) {
  std::vector<std::uint64_t> out(v.m());
  for (unsigned i = 0; i < v.m(); ++i) out[i] = v.get(i);
  return out;
}

TEST(SubwordGet, ZeroVectorReadsZero) {
  PackedVec v(64, 16);
  EXPECT_EQ(c23::subword_get(v, 3), 0u);
}

TEST(SubwordGet, ReadsBackWhatWasSet) {
  PackedVec v = c23::subword_set(PackedVec(64, 16), 0, 5);
  EXPECT_EQ(c23::subword_get(v, 0), 5u);
}

TEST(SubwordGet, DecodesLittleEndianNibbles) {
  PackedVec v = PackedVec::from_words(4, 4, {0x5073});
  EXPECT_EQ(c23::subword_get(v, 0), 3u);
  EXPECT_EQ(c23::subword_get(v, 1), 7u);
  EXPECT_EQ(c23::subword_get(v, 2), 0u);
  EXPECT_EQ(c23::subword_get(v, 3), 5u);
}

TEST(SubwordGet, OutOfRangeIsContractViolation) {
  PackedVec v(4, 4);
  EXPECT_THROW(c23::subword_get(v, 4), c23::ContractViolation);
}

TEST(SubwordSet, ZeroIntoZeroIsNoop) {
  EXPECT_EQ(c23::subword_set(PackedVec(64, 16), 0, 0), PackedVec(64, 16));
}

TEST(SubwordSet, BitLayout) {
  PackedVec v = c23::subword_set(PackedVec(4, 4), 1, 7);
  ASSERT_EQ(v.word_count(), 1u);
  EXPECT_EQ(v.words()[0], 0x0070u);
}

TEST(SubwordSet, CrossesWordBoundaries) {
  PackedVec v(64, 16);
  v = c23::subword_set(v, 4, 0xBEEF);
  EXPECT_EQ(v.words()[0], 0u);
  EXPECT_EQ(v.words()[1], 0xBEEFu);
}

TEST(SubwordSet, RejectsBadArguments) {
  PackedVec v(4, 4);
  EXPECT_THROW(c23::subword_set(v, 4, 1), c23::ContractViolation);
  EXPECT_THROW(c23::subword_set(v, 0, 16), c23::ContractViolation);
}

TEST(SubwordSet, RoundTripLeavesOtherCellsAlone) {
  std::mt19937_64 rng(11);
  for (unsigned delta : {4u, 8u, 16u, 32u}) {
    for (int trial = 0; trial < 500; ++trial) {
      auto cells = c23::oracle::random_cells(64, delta, rng);
      PackedVec v = PackedVec::from_cells(delta, cells);
      const std::size_t i = rng() % 64;
      const std::uint64_t x = rng() & c23::oracle::ones(delta);
      PackedVec w = c23::subword_set(v, i, x);
      cells[i] = x;
      EXPECT_EQ(cells_of(w), cells);
    }
  }
}

TEST(PackedVec, FromWordsRejectsDirtyPadding) {
  EXPECT_THROW(PackedVec::from_words(4, 4, {0x10000}), c23::ContractViolation);
  EXPECT_THROW(PackedVec::from_words(64, 16, {0}), c23::ContractViolation);
}

TEST(MatchMask, EmptyFilterMatchesNothing) {
  std::mt19937_64 rng(1);
  auto f = PackedVec::from_cells(16, c23::oracle::random_cells(64, 16, rng));
  EXPECT_TRUE(c23::match_mask(f, f, PackedVec(64, 16)).is_zero());
}

TEST(MatchMask, IdenticalFiltersMatchEverywhere) {
  std::mt19937_64 rng(2);
  auto f = PackedVec::from_cells(16, c23::oracle::random_cells(64, 16, rng));
  EXPECT_EQ(c23::match_mask(f, f, all_ones(64, 16)), all_ones(64, 16));
}

TEST(MatchMask, HandWorkedExample) {
  PackedVec fi = nibbles({2, 3, 0, 5});
  PackedVec mi = nibbles({15, 15, 0, 15});
  PackedVec fj = nibbles({2, 9, 7, 5});
  PackedVec a = c23::match_mask(fi, fj, mi);
  EXPECT_EQ(cells_of(a), (std::vector<std::uint64_t>{15, 0, 0, 15}));
  EXPECT_EQ(a.words()[0], 0xF00Fu);
  EXPECT_EQ(c23::all_ones_cells(a), (std::vector<std::size_t>{0, 3}));
}

TEST(MatchMask, ShapeMismatch) {
  EXPECT_THROW(c23::match_mask(PackedVec(64, 16), PackedVec(64, 8), PackedVec(64, 16)), c23::ContractViolation);
  EXPECT_THROW(c23::match_mask(PackedVec(64, 16), PackedVec(32, 16), PackedVec(64, 16)), c23::ContractViolation);
}

TEST(MatchMask, AgreesWithScalarOracle) {
  std::mt19937_64 rng(3);
  for (unsigned delta : {8u, 16u, 32u}) {
    for (int trial = 0; trial < 2000; ++trial) {
      auto fi = c23::oracle::random_cells(64, delta, rng, true);
      auto fj = fi;
      // Mix exact matches with fresh values so both outcomes are exercised.
      for (auto& c : fj) {
        if (rng() % 3 == 0) c = (rng() & c23::oracle::ones(delta)) | 1;
      }
      std::vector<std::uint64_t> mi(64);
      for (std::size_t r = 0; r < 64; ++r) {
        if (rng() % 2) mi[r] = c23::oracle::ones(delta);
        else fi[r] = 0;
      }
      auto a = c23::match_mask(PackedVec::from_cells(delta, fi), PackedVec::from_cells(delta, fj),
                               PackedVec::from_cells(delta, mi));
      ASSERT_EQ(c23::all_ones_cells(a), c23::oracle::matching_cells(fi, fj, mi, delta));
    }
  }
}

TEST(AllOnesCells, Basics) {
  EXPECT_TRUE(c23::all_ones_cells(PackedVec(64, 16)).empty());
  EXPECT_EQ(c23::all_ones_cells(all_ones(8, 8)), (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST(AllOnesCells, IgnoresPartiallySetCells) {
  PackedVec v = PackedVec::from_cells(8, std::vector<std::uint64_t>{0xFF, 0x7F, 0x80, 0xFF, 0, 0xFE, 0xFF, 1});
  EXPECT_EQ(c23::all_ones_cells(v), (std::vector<std::size_t>{0, 3, 6}));
}

TEST(NonzeroMask, Examples) {
  EXPECT_TRUE(c23::nonzero_mask(PackedVec(64, 16)).is_zero());
  EXPECT_EQ(cells_of(c23::nonzero_mask(nibbles({1, 0, 15, 0}))), (std::vector<std::uint64_t>{15, 0, 15, 0}));
}

TEST(NonzeroMask, MaskingLawAndOracle) {
  std::mt19937_64 rng(4);
  for (unsigned delta : {2u, 4u, 8u, 16u, 32u, 64u}) {
    for (int trial = 0; trial < 300; ++trial) {
      auto cells = c23::oracle::random_cells(64, delta, rng);
      for (auto& c : cells) {
        if (rng() % 3 == 0) c = 0;
        else if (rng() % 5 == 0) c = 1ULL << (delta - 1);  // high bit only
      }
      PackedVec f = PackedVec::from_cells(delta, cells);
      PackedVec mask = c23::nonzero_mask(f);
      ASSERT_EQ(cells_of(mask), c23::oracle::nonzero_cells(cells, delta)) << "delta=" << delta;
      ASSERT_EQ(c23::bitwise_and(mask, f), f);
    }
  }
}

TEST(BitwiseOps, IdentityAnnihilatorAndExample) {
  std::mt19937_64 rng(5);
  auto v = PackedVec::from_cells(16, c23::oracle::random_cells(64, 16, rng));
  PackedVec zero(64, 16);
  EXPECT_EQ(c23::bitwise_or(v, zero), v);
  EXPECT_EQ(c23::bitwise_and(v, zero), zero);
  EXPECT_EQ(c23::bitwise_or(nibbles({2, 0, 0, 5}), nibbles({0, 3, 0, 5})), nibbles({2, 3, 0, 5}));
  EXPECT_THROW(c23::bitwise_or(v, PackedVec(32, 16)), c23::ContractViolation);
  EXPECT_THROW(c23::bitwise_and(v, PackedVec(64, 8)), c23::ContractViolation);
}

TEST(OpBudget, KernelsStayWithinFourOpsPerWord) {
  for (unsigned delta : {8u, 16u, 32u}) {
    for (unsigned m : {8u, 64u, 128u}) {
      PackedVec a(m, delta), b(m, delta);
      const std::uint64_t budget = 4 * a.word_count();
      c23::OpCounter ops;
      c23::match_mask(a, b, a, &ops);
      EXPECT_LE(ops.word_ops, budget);
      ops = {};
      c23::nonzero_mask(a, &ops);
      EXPECT_LE(ops.word_ops, budget);
      ops = {};
      c23::bitwise_or(a, b, &ops);
      EXPECT_LE(ops.word_ops, budget);
    }
  }
}

TEST(Padding, StaysZeroUnderEveryKernel) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    auto fi = PackedVec::from_cells(4, c23::oracle::random_cells(4, 4, rng));
    auto fj = PackedVec::from_cells(4, c23::oracle::random_cells(4, 4, rng));
    auto mi = c23::nonzero_mask(fi);
    for (const PackedVec& v : {c23::match_mask(fi, fj, mi), c23::nonzero_mask(fj), c23::bitwise_or(fi, fj),
                               c23::bitwise_and(fi, fj)}) {
      ASSERT_EQ(v.words()[0] >> 16, 0u);
    }
  }
}

TEST(PackParams, Validation) {
  EXPECT_NO_THROW((c23::PackParams{16, 64}.validate()));
  EXPECT_NO_THROW((c23::PackParams{8, 8}.validate()));
  EXPECT_THROW((c23::PackParams{12, 64}.validate()), c23::ConfigError);
  EXPECT_THROW((c23::PackParams{16, 48}.validate()), c23::ConfigError);
  EXPECT_THROW((c23::PackParams{16, 2}.validate()), c23::ConfigError);
  EXPECT_THROW((c23::PackParams{4, 8}.validate()), c23::ConfigError);  // 32 bits, not a whole word
}

}  // namespace
