#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace secexp {

using Rational = mpq_class;
using BigInt = mpz_class;

// Recover a short fraction (denominator <= 2^20) that rounds to x, so that
// inputs like 1/3 or 0.1 compare exactly at type level. Falls back to the
// exact binary value of x.
Rational rationalize(double x);

// Accepts "p/q", decimal strings ("0.125", "1e-3") and integers.
Rational parse_rational(const std::string& s);

std::string to_string(const Rational& q);
double to_double(const Rational& q);

// log2 of a positive big integer or rational, without overflow.
double log2_big(const BigInt& z);
double log2_rational(const Rational& q);

BigInt factorial(unsigned n);
BigInt multinomial(const std::vector<int>& counts);

}  // namespace secexp
