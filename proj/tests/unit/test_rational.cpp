#include <doctest.h>

#include "driftlab/rational.hpp"

using namespace driftlab;

TEST_SUITE("rational") {

TEST_CASE("parses fractions, integers and decimals exactly") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-6/8") == Rational(-3, 4));
  CHECK(parse_rational("7") == Rational(7));
  CHECK(parse_rational("0.6") == Rational(3, 5));
  CHECK(parse_rational("1e-2") == Rational(1, 100));
  CHECK(parse_rational("2.5e1") == Rational(25));
}

TEST_CASE("rejects malformed literals") {
  CHECK_THROWS_AS(parse_rational(""), InputError);
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("abc"), InputError);
  CHECK_THROWS_AS(parse_rational("1/2/3"), InputError);
  CHECK_THROWS_AS(parse_rational("0.5.1"), InputError);
}

TEST_CASE("formats in lowest terms with a denominator") {
  CHECK(format_rational(Rational(4)) == "4/1");
  CHECK(format_rational(parse_rational("6/8")) == "3/4");
  CHECK(format_rational(Rational(-1, 3)) == "-1/3");
  CHECK(parse_rational(format_rational(Rational(355, 113))) == Rational(355, 113));
}

TEST_CASE("doubles round-trip through the shortest form") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("scalar traits") {
  CHECK(ScalarTraits<Rational>::is_one(parse_rational("2/2")));
  CHECK(ScalarTraits<double>::near(0.1 + 0.2, 0.3));
  CHECK_FALSE(ScalarTraits<Rational>::near(Rational(1, 3), Rational(1, 3) + Rational(1, 1000000000)));
  CHECK(format_scalar(Rational(1, 2)) == "1/2");
  CHECK(mode_of<double>() == NumericMode::floating);
  CHECK(parse_mode("float") == NumericMode::floating);
  CHECK(to_string(NumericMode::rational) == "rational");
  CHECK_THROWS_AS(parse_mode("decimal"), InputError);
}

}
