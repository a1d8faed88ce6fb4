#include <gtest/gtest.h>

#include "sigpole/poles.hpp"

using namespace sigpole;

namespace {

RationalProgression prog(std::int64_t on, std::int64_t od, std::int64_t sn, std::int64_t sd) {
  return RationalProgression(make_rational(on, od), make_rational(sn, sd));
}

}  // namespace

TEST(CandidatePoles, EighteenPointProgressionsPresent) {
  const auto p = parse_pairs("1-7,2-8,3-5,4-6,9-11,10-18,12-17,13-14,15-16");
  const auto contributions = candidate_contributions(p);
  const std::vector<RationalProgression> want{prog(1, 8, 1, 16), prog(-2, 1, 1, 4), prog(-5, 6, 1, 6),
                                              prog(3, 8, 1, 8), prog(1, 14, 1, 14)};
  for (const auto& w : want) {
    const bool found = std::any_of(contributions.begin(), contributions.end(),
                                   [&](const auto& c) { return c.progression == w; });
    EXPECT_TRUE(found) << to_string(w);
  }
  const auto poles = pole_set_of(contributions);
  for (const auto& w : want) EXPECT_TRUE(poles.contains(w.offset()));
  EXPECT_EQ(*poles.max(), make_rational(1, 2));
}

TEST(CandidatePoles, SingleAdjacentPair) {
  const auto c = candidate_contributions(parse_pairs("1-2"));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].progression, prog(1, 2, 1, 2));
  EXPECT_EQ(to_string(c[0].witness), "2");
  EXPECT_EQ(c[1].progression, prog(0, 1, 1, 2));
  EXPECT_EQ(to_string(c[1].witness), "1-2");
  const auto set = pole_set_of(c);
  ASSERT_EQ(set.progressions().size(), 1u);
  for (int l = 0; l < 10; ++l) EXPECT_TRUE(set.contains(make_rational(1 - l, 2)));
}

TEST(CandidatePoles, BoundedByHalf) {
  for (int k = 1; k <= 4; ++k)
    for (const auto& p : all_pair_partitions(k)) {
      const auto poles = candidate_poles(p);
      ASSERT_FALSE(poles.empty());
      EXPECT_LE(*poles.max(), make_rational(1, 2));
      bool singleton = false;
      for (const auto& iv : interval_set(p)) singleton = singleton || iv.size() == 1;
      if (singleton) {
        EXPECT_EQ(*poles.max(), make_rational(1, 2));
      }
    }
}

TEST(CandidatePoles, CrossingPairsStayBelowHalf) {
  // no singleton interval: S = [2,4] gives 1 - 3/4
  EXPECT_EQ(*candidate_poles(parse_pairs("1-3,2-4")).max(), make_rational(1, 4));
}

TEST(CandidatePoles, StrategiesAgree) {
  for (int k = 1; k <= 4; ++k)
    for (const auto& p : all_pair_partitions(k))
      EXPECT_EQ(candidate_poles(p, EnumerationStrategy::exhaustive),
                candidate_poles(p, EnumerationStrategy::interval_families))
          << to_string(p);
  const auto big = parse_pairs("1-7,2-8,3-5,4-6,9-11,10-18,12-17,13-14,15-16");
  EXPECT_EQ(candidate_poles(big, EnumerationStrategy::exhaustive),
            candidate_poles(big, EnumerationStrategy::interval_families));
}

TEST(CandidatePoles, ReflectionInvariant) {
  for (int k = 1; k <= 3; ++k)
    for (const auto& p : all_pair_partitions(k)) EXPECT_EQ(candidate_poles(p), candidate_poles(p.reflected()));
}

TEST(CandidatePolesForWord, Examples) {
  EXPECT_EQ(candidate_poles_for_word(parse_word("1,2,1,2")), candidate_poles(parse_pairs("1-3,2-4")));
  EXPECT_TRUE(candidate_poles_for_word(parse_word("1,2,2,3")).empty());
  const auto k1 = candidate_poles_for_word(parse_word("1,1"));
  EXPECT_TRUE(k1.contains(make_rational(1, 2)));
  EXPECT_TRUE(k1.contains(make_rational(0)));
  EXPECT_TRUE(k1.contains(make_rational(-7, 2)));
  EXPECT_FALSE(k1.contains(make_rational(1, 4)));
}

TEST(IsCandidate, Examples) {
  const auto p = parse_pairs("1-2");
  const auto half = is_candidate(p, make_rational(1, 2));
  ASSERT_TRUE(half.member);
  EXPECT_EQ(to_string(half.witness->subset), "2");
  EXPECT_EQ(half.witness->l, 0);
  EXPECT_FALSE(is_candidate(p, make_rational(3, 4)).member);
  EXPECT_TRUE(is_candidate(parse_pairs("1-4,2-3,5-6"), make_rational(1, 2)).member);
  const auto minus = is_candidate(p, make_rational(-3, 2));
  ASSERT_TRUE(minus.member);
  EXPECT_EQ(minus.witness->l, 4);
}

TEST(Hyperplanes, SingleSupport) {
  const auto family = hyperplane_candidates(2, {Subset::of({2})});
  // {2} and {1,2} contain the support
  ASSERT_EQ(family.hyperplanes.size(), 2u);
  const auto poles = specialize_diagonal(family);
  for (int l = 0; l < 6; ++l) EXPECT_TRUE(poles.contains(make_rational(1 - l, 2)));
  EXPECT_FALSE(poles.contains(make_rational(1, 4)));
}

TEST(Hyperplanes, EmptySupportGivesEmptyFamily) {
  EXPECT_TRUE(hyperplane_candidates(3, {}).hyperplanes.empty());
  EXPECT_THROW(hyperplane_candidates(2, {Subset::of({3})}), DomainError);
}

TEST(Hyperplanes, DiagonalSpecializationMatchesCandidates) {
  for (int k = 1; k <= 3; ++k)
    for (const auto& p : all_pair_partitions(k))
      EXPECT_EQ(specialize_diagonal(hyperplane_candidates(p.size(), interval_support(p))), candidate_poles(p))
          << to_string(p);
}

TEST(GammaRatio, PolesContained) {
  for (int k = 1; k <= 3; ++k) {
    const auto poles = candidate_poles(PairPartition::all_adjacent(k));
    for (int m = 0; m <= 30; ++m) {
      const int order = k - (m >= 2 ? 1 : 0);
      if (order > 0) {
        EXPECT_TRUE(poles.contains(make_rational(1 - m, 2))) << "k=" << k << " m=" << m;
      }
    }
  }
}
