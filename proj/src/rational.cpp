#include "rubricgrade/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace rubricgrade {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits64(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace

Rational Rational::make_checked(i128 n, i128 d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const i128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (!fits64(n) || !fits64(d))
    throw std::overflow_error("rational arithmetic overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  std::string s(text);
  const auto bad = [&] {
    return std::invalid_argument("invalid rational literal '" + s + "'");
  };

  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = s[pos] == '-';
    ++pos;
  }
  if (pos >= s.size()) throw bad();

  const auto digits = [&](std::size_t& p) {
    i128 v = 0;
    std::size_t start = p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
      v = v * 10 + (s[p] - '0');
      if (v > std::numeric_limits<std::int64_t>::max()) throw bad();
      ++p;
    }
    if (p == start) throw bad();
    return v;
  };

  i128 num = digits(pos);
  i128 den = 1;
  if (pos < s.size() && s[pos] == '/') {
    ++pos;
    den = digits(pos);
    if (den == 0) throw bad();
  } else if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    i128 frac = digits(pos);
    for (std::size_t i = start; i < pos; ++i) {
      den *= 10;
      if (den > std::numeric_limits<std::int64_t>::max()) throw bad();
    }
    num = num * den + frac;
  }
  if (pos != s.size()) throw bad();
  if (negative) num = -num;
  return make_checked(num, den);
}

Rational Rational::from_double_exact(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
  i128 den = 1;
  double v = x;
  int guard = 0;
  while (v != std::floor(v)) {
    v *= 2.0;
    den *= 2;
    // 20 fractional bits cover every deliberate binary value; decimals
    // like 0.1 that merely round to a double need 50+ and are rejected.
    if (++guard > 20)
      throw std::invalid_argument(
          "value has no short exact rational form; write it as 'n/d'");
  }
  if (std::abs(v) > 9.2e18) throw std::overflow_error("value out of range");
  return make_checked(static_cast<i128>(v), den);
}

}  // namespace rubricgrade
