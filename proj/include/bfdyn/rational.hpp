#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace bfdyn {

// Exact rational arithmetic on int64 numerator/denominator, normalized with
// positive denominator. Intermediate products run through __int128 and throw
// on overflow rather than silently wrapping.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num = g ? n / g : n;
    den = g ? d / g : d;
  }

  static Rational from_int(std::int64_t n) { return Rational(n, 1); }

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make128(i128(a.num) * b.den + i128(b.num) * a.den, i128(a.den) * b.den);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make128(i128(a.num) * b.den - i128(b.num) * a.den, i128(a.den) * b.den);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make128(i128(a.num) * b.num, i128(a.den) * b.den);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw std::invalid_argument("Rational: division by zero");
    return make128(i128(a.num) * b.den, i128(a.den) * b.num);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num) * b.den < i128(b.num) * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return i128(a.num) * b.den <= i128(b.num) * a.den;
  }

 private:
  using i128 = __int128;

  static Rational make128(i128 n, i128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rational: value exceeds 64-bit range");
    Rational r;
    r.num = static_cast<std::int64_t>(n);
    r.den = static_cast<std::int64_t>(d);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
};

}  // namespace bfdyn
