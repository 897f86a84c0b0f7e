#include <doctest.h>

#include <stdexcept>
#include <string>

#include "modenergy/xreal.hpp"
#include "test_util.hpp"

using namespace modenergy;
using modenergy::test::Rng;
using modenergy::test::pow10;

TEST_CASE("working precision defaults to 120 digits") {
  CHECK(working_precision() == 120);
}

TEST_CASE("set_working_precision accepts 16 and up, rejects less") {
  set_working_precision(120);
  CHECK(working_precision() == 120);
  set_working_precision(16);
  CHECK(working_precision() == 16);
  CHECK_THROWS_AS(set_working_precision(8), std::invalid_argument);
  CHECK(working_precision() == 16);  // failed call leaves the context alone
  set_working_precision(120);
}

TEST_CASE("parse_decimal basics") {
  set_working_precision(120);
  CHECK(parse_decimal("0.5") == XReal(1) / 2);
  CHECK(parse_decimal("-1e-3") == XReal(-1) / 1000);
  CHECK(parse_decimal("+2.5E1") == 25);
  CHECK(parse_decimal(".5") == XReal(1) / 2);
  CHECK_THROWS_AS(parse_decimal("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_decimal(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_decimal("1.2.3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_decimal("1e"), std::invalid_argument);
  CHECK_THROWS_AS(parse_decimal("1 "), std::invalid_argument);
}

TEST_CASE("format round-trips exactly at full precision") {
  set_working_precision(120);
  for (const char* text : {"0.1", "3.5", "-17", "1e-40", "0.33333333333333333333333333"}) {
    const XReal x = sqrt(abs(parse_decimal(text))) + parse_decimal(text);
    CHECK(parse_decimal(format_decimal(x)) == x);
  }
}

TEST_CASE("random decimal strings survive parse/format at P digits") {
  set_working_precision(120);
  Rng rng;
  for (int trial = 0; trial < 1000; ++trial) {
    const int digits = rng.uniform_int(1, 120);
    std::string s = rng.uniform(0, 1) < 0.5 ? "-" : "";
    s += static_cast<char>('1' + rng.uniform_int(0, 8));
    s += '.';
    for (int i = 1; i < digits; ++i) s += static_cast<char>('0' + rng.uniform_int(0, 9));
    s += 'e';
    s += std::to_string(rng.uniform_int(-40, 40));
    const XReal x = parse_decimal(s);
    // format at exactly P significant digits reproduces the decimal value
    CHECK(parse_decimal(format_decimal(x, 120)) == x);
    // full-precision format round-trips bit for bit
    CHECK(parse_decimal(format_decimal(x)) == x);
  }
}

TEST_CASE("fixed computation graphs are deterministic") {
  set_working_precision(120);
  auto run = [] {
    std::string out;
    XReal acc(0);
    for (int k = 1; k <= 50; ++k) {
      acc += sqrt(XReal(k)) * sin(XReal(1) / k) - log(XReal(k) + acc * acc / 7);
      out += format_decimal(acc);
    }
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("nth_root basics") {
  set_working_precision(120);
  CHECK(nth_root(XReal(4), 2) == 2);
  CHECK(nth_root(XReal(8), 3) == 2);
  CHECK(nth_root(XReal(-8), 3) == -2);
  CHECK(nth_root(XReal(0), 5) == 0);
  CHECK_THROWS_AS(nth_root(XReal(-1), 2), std::domain_error);
  CHECK_THROWS_AS(nth_root(XReal(2), 0), std::invalid_argument);
  // one-ulp contract on a non-exact case
  const XReal r = nth_root(XReal(2), 3);
  CHECK(abs(r * r * r - 2) < pow10(-117));
}

TEST_CASE("nth_root residual shrinks when precision grows") {
  for (const int value : {7, 10, 23}) {
    set_working_precision(60);
    const XReal low = abs(pow(nth_root(XReal(value), 3), 3) - value);
    set_working_precision(120);
    const XReal high = abs(pow(nth_root(XReal(value), 3), 3) - value);
    CHECK(high <= low);
  }
  set_working_precision(120);
}
