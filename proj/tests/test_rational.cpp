#include <gtest/gtest.h>

#include "sigpole/poles.hpp"
#include "sigpole/rational.hpp"

using namespace sigpole;

TEST(Rational, ParsesAndPrintsLowestTerms) {
  EXPECT_EQ(to_string(parse_rational("6/8")), "3/4");
  EXPECT_EQ(to_string(parse_rational(" -5/6 ")), "-5/6");
  EXPECT_EQ(to_string(parse_rational("4/2")), "2");
  EXPECT_EQ(parse_rational("+7"), make_rational(7));
}

TEST(Rational, RejectsMalformedInput) {
  EXPECT_THROW(parse_rational(""), ParseError);
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("1.5"), ParseError);
  EXPECT_THROW(parse_rational("-"), ParseError);
  EXPECT_THROW(make_rational(1, 0), DomainError);
}

TEST(Rational, IntegerTest) {
  EXPECT_TRUE(is_integer(make_rational(4, 2)));
  EXPECT_FALSE(is_integer(make_rational(1, 2)));
  EXPECT_DOUBLE_EQ(to_double(make_rational(-5, 6)), -5.0 / 6);
}

TEST(Progression, MembershipIsExact) {
  const RationalProgression p(make_rational(1, 8), make_rational(1, 16));
  EXPECT_TRUE(p.contains(make_rational(1, 8)));
  EXPECT_TRUE(p.contains(make_rational(-7, 8)));
  EXPECT_FALSE(p.contains(make_rational(3, 16)));
  EXPECT_FALSE(p.contains(make_rational(1, 17)));
  EXPECT_EQ(*p.index_of(make_rational(0)), 2);
}

TEST(Progression, ContainmentNeedsIntegerStepRatio) {
  const RationalProgression coarse(make_rational(0), make_rational(1));
  const RationalProgression fine(make_rational(1, 2), make_rational(1, 2));
  EXPECT_TRUE(fine.contains(coarse));
  EXPECT_FALSE(coarse.contains(fine));
  EXPECT_THROW(RationalProgression(make_rational(0), make_rational(0)), DomainError);
}

TEST(PoleSet, MergesContainedProgressions) {
  PoleSet s;
  s.add(RationalProgression(make_rational(0), make_rational(1, 2)));
  s.add(RationalProgression(make_rational(-1), make_rational(1)));
  EXPECT_EQ(s.progressions().size(), 1u);
  s.add(RationalProgression(make_rational(1, 2), make_rational(1, 2)));
  ASSERT_EQ(s.progressions().size(), 1u);
  EXPECT_EQ(s.progressions()[0].offset(), make_rational(1, 2));
  EXPECT_THROW(s.add(RationalProgression(make_rational(3, 4), make_rational(1))), DomainError);
}

TEST(PoleSet, OrderedByOffsetDescending) {
  PoleSet s;
  s.add(RationalProgression(make_rational(-2), make_rational(1, 4)));
  s.add(RationalProgression(make_rational(1, 8), make_rational(1, 16)));
  s.add(RationalProgression(make_rational(3, 8), make_rational(1, 7)));
  // -2 = 1/8 - 34/16 and 1/4 is a multiple of 1/16
  ASSERT_EQ(s.progressions().size(), 2u);
  EXPECT_EQ(*s.max(), make_rational(3, 8));
  EXPECT_EQ(s.progressions().back().offset(), make_rational(1, 8));
}
