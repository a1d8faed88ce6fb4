#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "sigpole/combinatorics.hpp"

using namespace sigpole;

namespace {

const char* kFig2 = "1-7,2-8,3-5,4-6,9-11,10-18,12-17,13-14,15-16";

std::vector<Interval> sorted(std::vector<Interval> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(IntervalOfPair, Examples) {
  EXPECT_EQ(interval_of_pair({10, 6}, 10), (Interval{7, 10}));
  EXPECT_EQ(interval_of_pair(1, 2), (Interval{2, 2}));
  for (int j = 1; j < 9; ++j) EXPECT_EQ(interval_of_pair(j, j + 1), (Interval{j + 1, j + 1}));
}

TEST(IntervalOfPair, Errors) {
  EXPECT_THROW(interval_of_pair(3, 3), InvalidPairError);
  EXPECT_THROW(interval_of_pair({1, 7}, 6), InvalidPairError);
  EXPECT_THROW(interval_of_pair({0, 2}, 6), InvalidPairError);
}

TEST(IntervalSet, Examples) {
  EXPECT_EQ(sorted(interval_set(parse_pairs("4-6,5-2,1-3"))), sorted({{5, 6}, {3, 5}, {2, 3}}));
  EXPECT_EQ(sorted(interval_set(parse_pairs("1-6,2-5,3-4"))), sorted({{2, 6}, {3, 5}, {4, 4}}));
  EXPECT_EQ(sorted(interval_set(parse_pairs("1-4,2-5,3-6"))), sorted({{2, 4}, {3, 5}, {4, 6}}));
}

TEST(IntervalSet, SizeAndRange) {
  for (int k = 1; k <= 4; ++k)
    for (const auto& p : all_pair_partitions(k)) {
      const auto ivs = interval_set(p);
      ASSERT_EQ(static_cast<int>(ivs.size()), k);
      for (const auto& iv : ivs) {
        EXPECT_GE(iv.lo, 2);
        EXPECT_LE(iv.hi, 2 * k);
      }
    }
}

TEST(PairPartition, Validation) {
  EXPECT_THROW(parse_pairs("1-2,2-3"), InvalidPairError);
  EXPECT_THROW(parse_pairs("1-1"), InvalidPairError);
  EXPECT_THROW(parse_pairs("1-5,2-3"), InvalidPairError);
  EXPECT_THROW(parse_pairs("1-"), ParseError);
  EXPECT_THROW(parse_pairs("a-b"), ParseError);
  EXPECT_EQ(to_string(parse_pairs(" 2-1 , 4-3 ")), "1-2,3-4");
}

TEST(PairPartition, ReflectionIsInvolution) {
  const auto p = parse_pairs(kFig2);
  EXPECT_EQ(p.reflected().reflected(), p);
  EXPECT_EQ(to_string(parse_pairs("1-3,2-4").reflected()), "1-3,2-4");
  EXPECT_EQ(to_string(parse_pairs("1-2,3-5,4-6").reflected()), "1-3,2-4,5-6");
}

TEST(Word, ParseAndLevelSets) {
  const auto w = parse_word("6,3,1,3,6,6,1,5,6,5");
  EXPECT_EQ(w.k(), 5);
  EXPECT_EQ(w.level_sets().size(), 4u);
  EXPECT_EQ(w.level_set_key(), parse_word("2,4,1,4,2,2,1,3,2,3").level_set_key());
  EXPECT_THROW(parse_word("1,2,3"), ParseError);
  EXPECT_THROW(parse_word("1,0"), ParseError);
  EXPECT_THROW(Word({1, 2, 3}), DimensionError);
  EXPECT_THROW(Word({1, 0}), DomainError);
  EXPECT_THROW(parse_word("1,,2"), ParseError);
}

TEST(Refines, TenLetterWord) {
  const auto w = parse_word("6,3,1,3,6,6,1,5,6,5");
  EXPECT_FALSE(refines(parse_pairs("1-2,3-4,5-6,7-8,9-10"), w));
  EXPECT_TRUE(refines(parse_pairs("1-6,2-4,3-7,5-9,8-10"), w));
  EXPECT_TRUE(refines(parse_pairs("1-9,2-4,3-7,5-6,8-10"), w));
  EXPECT_FALSE(refines(parse_pairs("1-9,2-7,3-4,5-6,8-10"), w));
}

TEST(Refines, ConstantWordAndLengthMismatch) {
  for (const auto& p : all_pair_partitions(3)) EXPECT_TRUE(refines(p, Word(std::vector<int>(6, 4))));
  EXPECT_THROW(refines(parse_pairs("1-2"), parse_word("1,1,1,1")), DimensionError);
}

TEST(Refines, EquivalentToMonochromaticPairs) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    std::vector<int> letters(6);
    for (auto& c : letters) c = 1 + static_cast<int>(rng() % 2);
    const Word w(letters);
    for (const auto& p : all_pair_partitions(3)) {
      bool mono = true;
      for (auto [a, b] : p.pairs()) mono = mono && w.letter(a) == w.letter(b);
      EXPECT_EQ(refines(p, w), mono);
    }
  }
}

TEST(EnumerateRefining, Examples) {
  const auto one = enumerate_refining(parse_word("1,1"));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(to_string(one[0]), "1-2");
  EXPECT_EQ(enumerate_refining(parse_word("1,1,1,1")).size(), 3u);
  const auto forced = enumerate_refining(parse_word("1,2,1,2"));
  ASSERT_EQ(forced.size(), 1u);
  EXPECT_EQ(to_string(forced[0]), "1-3,2-4");
  EXPECT_TRUE(enumerate_refining(parse_word("1,2,2,3")).empty());
}

TEST(EnumerateRefining, ConstantWordCountsAndOrder) {
  for (int k = 1; k <= 6; ++k) {
    const auto all = enumerate_refining(Word(std::vector<int>(2 * k, 1)));
    EXPECT_EQ(all.size(), odd_double_factorial(2 * k));
    EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  }
}

TEST(PositionSet, ParseAndDecompose) {
  const auto s = parse_position_set("1-3,5-6,8-9,12,14,16,18");
  EXPECT_EQ(s.size(), 11);
  EXPECT_EQ(s.maximal_intervals().size(), 7u);
  EXPECT_EQ(to_string(s), "1-3,5-6,8-9,12,14,16,18");
  EXPECT_EQ(to_string(parse_position_set("2-3,4-5")), "2-5");
  EXPECT_THROW(parse_position_set("5-3"), ParseError);
}

TEST(BracketCount, Examples) {
  const auto p = parse_pairs(kFig2);
  EXPECT_EQ(bracket_count(parse_position_set("2-8,10-11,13-17"), p), 8);
  EXPECT_EQ(bracket_count(PositionSet(), p), 0);
  EXPECT_EQ(bracket_count(parse_position_set("1-18"), p), 9);
  EXPECT_THROW(bracket_count(parse_position_set("1-19"), p), DimensionError);
}

TEST(BracketCount, EighteenPointSets) {
  const auto p = parse_pairs(kFig2);
  const std::vector<std::pair<const char*, int>> rows{
      {"2-8,10-11,13-17", 16}, {"3-4,6-11,13-14,17-18", 4}, {"1-3,5-6,8-9,12,14,16,18", 6}, {"4-6,14,16", 8},
      {"2-7,10-11,13-17", 14}};
  for (auto [text, twice] : rows) {
    const auto s = parse_position_set(text);
    EXPECT_EQ(2 * bracket_count(s, p), twice) << text;
    EXPECT_EQ(2 * bracket_count_via_aug_def(s, p), twice) << text;
  }
  // components of 2[S|P] = |S| + aug - def
  const auto b2 = bracket_breakdown(parse_position_set("3-4,6-11,13-14,17-18"), p);
  EXPECT_EQ(b2.augmented_components, 0);
  EXPECT_EQ(b2.deficient_points, 8);
  const auto b3 = bracket_breakdown(parse_position_set("1-3,5-6,8-9,12,14,16,18"), p);
  EXPECT_EQ(b3.size, 11);
  EXPECT_EQ(b3.augmented_components, 3);
  EXPECT_EQ(b3.deficient_points, 8);
  const auto b5 = bracket_breakdown(parse_position_set("2-7,10-11,13-17"), p);
  EXPECT_EQ(b5.augmented_components, 3);
  EXPECT_EQ(b5.deficient_points, 2);
}

TEST(Augmentation, Examples) {
  const auto p = parse_pairs(kFig2);
  EXPECT_EQ(augmentation({2, 8}, p), parse_position_set("1-8"));
  EXPECT_EQ(augmentation({1, 5}, p), parse_position_set("1-5"));
  EXPECT_EQ(augmentation({4, 6}, p), parse_position_set("3-6"));
}

TEST(Deficiency, Examples) {
  const auto p = parse_pairs(kFig2);
  EXPECT_TRUE(deficiency({1, 18}, p).empty());
  // 9 is paired with 11, not with 8
  EXPECT_EQ(deficiency({9, 9}, p), parse_position_set("9"));
  int total = 0;
  for (const auto& iv : parse_position_set("3-4,6-11,13-14,17-18").maximal_intervals())
    total += deficiency(iv, p).size();
  EXPECT_EQ(total, 8);
}

TEST(BracketIdentity, ExhaustiveUpToEight) {
  for (int k = 1; k <= 4; ++k)
    for (const auto& p : all_pair_partitions(k))
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (2 * k)); ++bits) {
        const auto s = PositionSet::from_mask(Subset{bits});
        const int b = bracket_count(s, p);
        ASSERT_EQ(bracket_count_via_aug_def(s, p), b) << to_string(p) << " S=" << to_string(s);
        int sum = 0;
        for (const auto& iv : s.maximal_intervals()) sum += bracket_count(PositionSet::from_intervals({iv}), p);
        ASSERT_EQ(sum, b);
        // (|S|+0)/(2[S|P]) >= 1/2
        if (b > 0) {
          ASSERT_LE(2 * b, 2 * s.size());
        }
      }
}

TEST(BracketIdentity, RandomizedUpToEighteen) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 3000; ++t) {
    const int k = 5 + static_cast<int>(rng() % 5);
    std::vector<int> order(static_cast<std::size_t>(2 * k));
    std::iota(order.begin(), order.end(), 1);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<PairPartition::Pair> pairs;
    for (int i = 0; i < k; ++i) pairs.emplace_back(order[2 * i], order[2 * i + 1]);
    const PairPartition p(pairs);
    const auto s = PositionSet::from_mask(Subset{rng() & Subset::full(2 * k).bits});
    ASSERT_EQ(bracket_count_via_aug_def(s, p), bracket_count(s, p));
  }
}
