#include "hspsim/rational.hpp"

#include "hspsim/errors.hpp"

namespace hspsim {

Rational rat(long num, long den) {
  if (den == 0) throw UsageError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational rat_pow(const Rational& base, unsigned long exp) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exp);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exp);
  // base is canonical, so num^e / den^e is already in lowest terms.
  return out;
}

std::string rat_str(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational rat_parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    BigInt num(slash == std::string::npos ? text : text.substr(0, slash));
    BigInt den(slash == std::string::npos ? std::string("1") : text.substr(slash + 1));
    if (den == 0) throw UsageError("rational with zero denominator: " + text);
    Rational q(num, den);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw UsageError("malformed rational: " + text);
  }
}

int ceil_log2(const BigInt& v) {
  if (v < 1) throw UsageError("ceil_log2 requires a positive value");
  const size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);  // floor(log2 v) + 1
  const bool exact_power = mpz_popcount(v.get_mpz_t()) == 1;
  return exact_power ? static_cast<int>(bits) - 1 : static_cast<int>(bits);
}

BigInt pow2(int k) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, static_cast<unsigned long>(k));
  return out;
}

}  // namespace hspsim
