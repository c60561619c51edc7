#pragma once

#include <gmpxx.h>

#include <string>

namespace hspsim {

// All probability and amplitude arithmetic in this project is exact; GMP
// rationals are the single numeric type of the core.
using Rational = mpq_class;
using BigInt = mpz_class;

// Canonicalized num/den construction.
Rational rat(long num, long den = 1);

// base^exp with exp >= 0.
Rational rat_pow(const Rational& base, unsigned long exp);

// Serialized form is always "p/q", including "0/1" and "1/1".
std::string rat_str(const Rational& q);

// Accepts "p/q" or a bare integer "p".
Rational rat_parse(const std::string& text);

// Smallest k >= 0 with 2^k >= v.  Requires v >= 1.
int ceil_log2(const BigInt& v);

BigInt pow2(int k);

}  // namespace hspsim
