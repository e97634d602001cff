#include <gtest/gtest.h>

#include "juliatwin/scalar.hpp"

using namespace juliatwin;

TEST(ParseRational, Fractions) {
  EXPECT_EQ(parse_rational("3/4"), mpq_class(3, 4));
  EXPECT_EQ(parse_rational("-6/8"), mpq_class(-3, 4));
  EXPECT_EQ(parse_rational("7"), mpq_class(7));
}

TEST(ParseRational, Decimals) {
  EXPECT_EQ(parse_rational("0.25"), mpq_class(1, 4));
  EXPECT_EQ(parse_rational("-1.5e2"), mpq_class(-150));
  EXPECT_EQ(parse_rational("2.5E-1"), mpq_class(1, 4));
}

TEST(ParseRational, RejectsGarbage) {
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("abc"), Error);
  EXPECT_THROW(parse_rational(""), Error);
}

TEST(GaussRational, FieldOps) {
  const GaussRational i(0, 1);
  EXPECT_EQ(i * i, GaussRational(-1));
  const GaussRational a(mpq_class(1, 2), mpq_class(3));
  EXPECT_EQ(a / a, GaussRational(1));
  EXPECT_EQ((a + i) - i, a);
  EXPECT_THROW(a / GaussRational(0), Error);
}

TEST(SnapToRational, ContinuedFractions) {
  auto q = snap_to_rational(0.75);
  ASSERT_TRUE(q);
  EXPECT_EQ(*q, mpq_class(3, 4));
  auto third = snap_to_rational(1.0 / 3.0);
  ASSERT_TRUE(third);
  EXPECT_EQ(*third, mpq_class(1, 3));
  EXPECT_FALSE(snap_to_rational(std::sqrt(2.0)).has_value());
}
