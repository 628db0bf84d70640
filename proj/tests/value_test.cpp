#include "tasksheaf/value.hpp"

#include <random>

#include <gtest/gtest.h>

namespace tasksheaf {
namespace {

TEST(ParseRational, IntegerForms) {
  EXPECT_EQ(parse_rational("3"), Rat(3));
  EXPECT_EQ(parse_rational("-12"), Rat(-12));
  EXPECT_EQ(parse_rational("0"), Rat(0));
  EXPECT_EQ(parse_rational("+7"), Rat(7));
}

TEST(ParseRational, FractionForms) {
  EXPECT_EQ(parse_rational("1/2"), Rat(1, 2));
  EXPECT_EQ(parse_rational("-7/2"), Rat(-7, 2));
  EXPECT_EQ(parse_rational("2/4"), Rat(1, 2));  // normalised
  EXPECT_EQ(parse_rational("0/9"), Rat(0));
}

TEST(ParseRational, DecimalFormsAreExact) {
  EXPECT_EQ(parse_rational("0.25"), Rat(1, 4));
  EXPECT_EQ(parse_rational("1.5"), Rat(3, 2));
  EXPECT_EQ(parse_rational("-0.125"), Rat(-1, 8));
  EXPECT_EQ(parse_rational(".5"), Rat(1, 2));
  EXPECT_EQ(parse_rational("0.1"), Rat(1, 10));
  EXPECT_EQ(parse_rational("2."), Rat(2));
}

TEST(ParseRational, Garbage) {
  EXPECT_THROW(parse_rational(""), ParseError);
  EXPECT_THROW(parse_rational("abc"), ParseError);
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("1.2.3"), ParseError);
  EXPECT_THROW(parse_rational("1/"), ParseError);
  EXPECT_THROW(parse_rational("--3"), ParseError);
  EXPECT_THROW(parse_rational("1 2"), ParseError);
}

TEST(RenderRational, DecimalWhenTerminating) {
  EXPECT_EQ(render_rational(Rat(1, 4)), "0.25");
  EXPECT_EQ(render_rational(Rat(3, 2)), "1.5");
  EXPECT_EQ(render_rational(Rat(-5, 4)), "-1.25");
  EXPECT_EQ(render_rational(Rat(1, 8)), "0.125");
  EXPECT_EQ(render_rational(Rat(1, 20)), "0.05");
  EXPECT_EQ(render_rational(Rat(1, 1000000)), "0.000001");
  EXPECT_EQ(render_rational(Rat(7)), "7");
  EXPECT_EQ(render_rational(Rat(-3)), "-3");
}

TEST(RenderRational, FractionWhenNotTerminating) {
  EXPECT_EQ(render_rational(Rat(1, 3)), "1/3");
  EXPECT_EQ(render_rational(Rat(-2, 7)), "-2/7");
  EXPECT_EQ(render_rational(Rat(5, 6)), "5/6");
}

TEST(RenderRational, RoundTripsThroughParse) {
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<int> num(-500, 500);
  std::uniform_int_distribution<int> den(1, 64);
  for (int i = 0; i < 500; ++i) {
    Rat q(num(rng), den(rng));
    EXPECT_EQ(parse_rational(render_rational(q)), q) << render_rational(q);
  }
}

TEST(Value, KindsAndAccessors) {
  Value q = rat_value(3, 4);
  Value s = Value::symbol("red");
  EXPECT_TRUE(q.is_rational());
  EXPECT_TRUE(s.is_symbol());
  EXPECT_EQ(q.rat(), Rat(3, 4));
  EXPECT_EQ(s.symbol(), "red");
  EXPECT_THROW(q.symbol(), InternalError);
  EXPECT_THROW(s.rat(), InternalError);
  EXPECT_THROW(Value::symbol(""), ValidationError);
}

TEST(Value, OrderingPutsRationalsBeforeSymbols) {
  Value a = rat_value(1), b = rat_value(2), s = Value::symbol("a");
  EXPECT_TRUE(a < b);
  EXPECT_TRUE(b < s);
  EXPECT_FALSE(s < a);
  EXPECT_TRUE(a == rat_value(1));
  EXPECT_FALSE(a == s);
}

TEST(Value, RenderVector) {
  ValueVector v{rat_value(0), rat_value(1, 4)};
  EXPECT_EQ(render_vector(v), "(0,0.25)");
}

}  // namespace
}  // namespace tasksheaf
