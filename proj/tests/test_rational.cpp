#include "doctest.h"
#include "hspsim/errors.hpp"
#include "hspsim/rational.hpp"

using namespace hspsim;

TEST_CASE("rational string form is always p/q") {
  CHECK(rat_str(rat(1)) == "1/1");
  CHECK(rat_str(rat(0)) == "0/1");
  CHECK(rat_str(rat(2, 8)) == "1/4");
  CHECK(rat_str(rat(-3, 6)) == "-1/2");
}

TEST_CASE("rational parsing") {
  CHECK(rat_parse("3/4") == rat(3, 4));
  CHECK(rat_parse("7") == rat(7));
  CHECK(rat_parse("-2/6") == rat(-1, 3));
  CHECK_THROWS_AS(rat_parse("1/0"), UsageError);
  CHECK_THROWS_AS(rat_parse("abc"), UsageError);
  CHECK_THROWS_AS(rat(1, 0), UsageError);
}

TEST_CASE("rational powers stay canonical") {
  CHECK(rat_pow(rat(2, 3), 0) == 1);
  CHECK(rat_pow(rat(2, 3), 3) == rat(8, 27));
  CHECK(rat_pow(rat(-1, 2), 5) == rat(-1, 32));
  // Exponents around 50 appear in the cascade; well past 64-bit range.
  const Rational big = rat_pow(rat(3, 8), 50);
  CHECK(big == Rational(BigInt("717897987691852588770249"), BigInt(1) << 150));
}

TEST_CASE("ceil_log2") {
  CHECK(ceil_log2(BigInt(1)) == 0);
  CHECK(ceil_log2(BigInt(2)) == 1);
  CHECK(ceil_log2(BigInt(3)) == 2);
  CHECK(ceil_log2(BigInt(1024)) == 10);
  CHECK(ceil_log2(BigInt(1025)) == 11);
  CHECK(pow2(20) == BigInt(1048576));
  CHECK_THROWS_AS(ceil_log2(BigInt(0)), UsageError);
}
