#include "secexp/rational.hpp"

#include "secexp/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>

namespace secexp {

Rational rationalize(double x) {
  require(std::isfinite(x), "rationalize: non-finite value");
  Rational exact(x);
  if (exact.get_den() == 1) return exact;

  // Continued-fraction convergents of the exact binary value.
  const BigInt limit = BigInt(1) << 20;
  const double ax = std::fabs(x);
  const Rational half_ulp = Rational(std::nextafter(ax, INFINITY) - ax) / 2;
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  BigInt num = exact.get_num(), den = exact.get_den();
  while (den != 0) {
    BigInt a;
    mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    BigInt p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > limit) break;
    Rational cand(p2, q2);
    cand.canonicalize();
    if (abs(cand - exact) <= half_ulp) return cand;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    BigInt r = num - a * den;
    num = den;
    den = r;
  }
  return exact;
}

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  require(!s.empty(), "empty number");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational a = parse_rational(s.substr(0, slash));
    Rational b = parse_rational(s.substr(slash + 1));
    require(b != 0, "zero denominator in '" + raw + "'");
    return a / b;
  }
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  std::string digits;
  long exp10 = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      seen_digit = true;
      if (seen_dot) --exp10;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  require(seen_digit, "malformed number '" + raw + "'");
  if (i < s.size()) {
    require(s[i] == 'e' || s[i] == 'E', "malformed number '" + raw + "'");
    std::string e = s.substr(i + 1);
    require(!e.empty(), "malformed exponent in '" + raw + "'");
    size_t used = 0;
    long ev = std::stol(e, &used);
    require(used == e.size(), "malformed exponent in '" + raw + "'");
    exp10 += ev;
  }
  require(exp10 > -400 && exp10 < 400, "exponent out of range in '" + raw + "'");
  Rational q{BigInt(digits, 10)};
  BigInt pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  if (exp10 >= 0)
    q *= pow10;
  else
    q /= pow10;
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// get_d truncates; step one ulp away from zero when that is closer, so the
// result is the nearest double (ties to even).
double to_double(const Rational& q) {
  const double t = q.get_d();
  if (!std::isfinite(t) || Rational(t) == q) return t;
  const double u = std::nextafter(t, q > 0 ? INFINITY : -INFINITY);
  if (!std::isfinite(u)) return t;
  const Rational et = abs(q - Rational(t)), eu = abs(Rational(u) - q);
  if (et != eu) return eu < et ? u : t;
  std::uint64_t bits;
  std::memcpy(&bits, &t, sizeof bits);
  return bits & 1 ? u : t;
}

double log2_big(const BigInt& z) {
  if (z <= 0) return -INFINITY;
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log2(m) + static_cast<double>(e);
}

double log2_rational(const Rational& q) {
  if (q <= 0) return -INFINITY;
  return log2_big(q.get_num()) - log2_big(q.get_den());
}

BigInt factorial(unsigned n) {
  BigInt f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

BigInt multinomial(const std::vector<int>& counts) {
  int n = 0;
  for (int c : counts) {
    require(c >= 0, "multinomial: negative count");
    n += c;
  }
  BigInt r = factorial(static_cast<unsigned>(n));
  for (int c : counts) r /= factorial(static_cast<unsigned>(c));
  return r;
}

}  // namespace secexp
