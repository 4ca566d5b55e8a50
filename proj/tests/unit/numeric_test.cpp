#include "octacomp/error.hpp"
#include "octacomp/numeric.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace octacomp;

TEST_CASE("parse_rational reads fractions, integers and decimals exactly") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-6/8") == Rational(-3, 4));
  CHECK(parse_rational("12") == Rational(12));
  CHECK(parse_rational("1.25") == Rational(5, 4));
  CHECK(parse_rational("-3e-2") == Rational(-3, 100));
  CHECK(parse_rational("2.5E1") == Rational(25));
  CHECK(parse_rational("0.1") == Rational(1, 10));
}

TEST_CASE("parse_rational rejects malformed text") {
  for (const char* bad : {"", "abc", "1/0", "1.2.3", "3/", "1e", "--1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_rational(bad), Error);
  }
}

TEST_CASE("to_string drops unit denominators") {
  CHECK(to_string(Rational(7, 2)) == "7/2");
  CHECK(to_string(parse_rational("8/4")) == "2");
  CHECK(to_string(Rational(-1, 3)) == "-1/3");
}

TEST_CASE("exact_sqrt extracts square factors") {
  const QuadraticSurd a = exact_sqrt(Rational(12));
  CHECK(a.rational_part() == 0);
  CHECK(a.surd_coefficient() == 2);
  CHECK(a.radicand() == 3);
  const QuadraticSurd b = exact_sqrt(Rational(9, 4));
  CHECK(b.is_rational());
  CHECK(b.rational_part() == Rational(3, 2));
  CHECK(exact_sqrt(Rational(0)).to_double() == 0.0);
  CHECK(std::abs(exact_sqrt(Rational(3, 4)).to_double() - std::sqrt(0.75)) < 1e-15);
}

TEST_CASE("surd arithmetic matches doubles and squares back exactly") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-20, 20);
  std::uniform_int_distribution<int> den(1, 9);
  std::uniform_int_distribution<int> rad(2, 30);
  for (int trial = 0; trial < 500; ++trial) {
    const Rational k(rad(rng));
    auto draw = [&] {
      Rational r(num(rng), den(rng));
      r.canonicalize();
      return r;
    };
    const QuadraticSurd a(draw(), draw(), k);
    const QuadraticSurd b(draw(), draw(), k);
    const double da = a.to_double();
    const double db = b.to_double();
    CHECK(std::abs((a + b).to_double() - (da + db)) < 1e-9);
    CHECK(std::abs((a - b).to_double() - (da - db)) < 1e-9);
    CHECK(std::abs((a * b).to_double() - da * db) < 1e-8);
    // Exact sign against a high-margin float reading.
    if (std::abs(da) > 1e-9) CHECK(a.sign() == (da > 0 ? 1 : -1));
    const Rational x = draw();
    const QuadraticSurd root = exact_sqrt(Rational(x * x * k));
    const QuadraticSurd square = root * root;
    CHECK(square.is_rational());
    CHECK(square.rational_part() == x * x * k);
  }
}

TEST_CASE("surds from different fields do not combine") {
  const QuadraticSurd a(Rational(0), Rational(1), Rational(2));
  const QuadraticSurd b(Rational(0), Rational(1), Rational(3));
  CHECK_THROWS_AS(a + b, Error);
  CHECK_NOTHROW(a + QuadraticSurd(Rational(5)));
}

TEST_CASE("sign is exact near zero") {
  // Convergents of sqrt(2) from both sides, within 4e-7 and 2e-6.
  CHECK(QuadraticSurd(Rational(1393, 985), Rational(-1), Rational(2)).sign() == -1);
  CHECK(QuadraticSurd(Rational(577, 408), Rational(-1), Rational(2)).sign() == 1);
  CHECK(QuadraticSurd(Rational(2), Rational(-1), Rational(4)).sign() == 0);
}
