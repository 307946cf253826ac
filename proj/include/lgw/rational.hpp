#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace lgw {

using Rational = mpq_class;
using Integer = mpz_class;

// Accepts "a", "a/b" and "-a/b"; the result is canonicalized.
Rational parse_rational(std::string_view text);

// Always "num/den", including integers ("1/1").
std::string to_string(const Rational& value);

double to_double(const Rational& value);

// num/den in lowest terms (the two-argument mpq constructor does not reduce).
inline Rational ratio(const Integer& num, const Integer& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Integer binomial(long n, long k);

Rational pow(const Rational& base, long exponent);

// Cached exact binomial coefficients C(n, k) for 0 <= k <= n <= limit.
class BinomialTable {
 public:
  explicit BinomialTable(int limit = 0) { reserve(limit); }

  const Integer& operator()(int n, int k);
  void reserve(int limit);

 private:
  std::vector<std::vector<Integer>> rows_;
  Integer zero_{0};
};

}  // namespace lgw
