/*
   Copyright 2026 The hh-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

/**
 * @file rational.hpp
 * @brief Exact rational numbers over arbitrary-precision integers.
 *
 * Every value is kept in canonical form: gcd(|num|, den) = 1, den > 0, and
 * zero is 0/1. Canonicalization runs after every operation so equality is
 * structural.
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace hhlab {

using BigInt = boost::multiprecision::cpp_int;

class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  explicit Rational(BigInt n) : num_(std::move(n)), den_(1) {}
  Rational(long long num, long long den) : Rational(normalize(BigInt(num), BigInt(den))) {}
  Rational(BigInt num, BigInt den) : Rational(normalize(std::move(num), std::move(den))) {}

  /// Reduces num/den to canonical form. Throws std::invalid_argument on den == 0.
  static Rational normalize(BigInt num, BigInt den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r;
    r.num_ = std::move(num);
    r.den_ = std::move(den);
    r.reduce();
    return r;
  }

  /// Exact value of a finite double (every double is a dyadic rational).
  static Rational from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("cannot convert non-finite double to rational");
    if (x == 0.0) return Rational();
    int exp = 0;
    double m = std::frexp(x, &exp);
    auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    exp -= 53;
    BigInt num(mant);
    BigInt den(1);
    if (exp > 0)
      num <<= exp;
    else
      den <<= -exp;
    return normalize(std::move(num), std::move(den));
  }

  /// Accepts "p", "p/q" and decimal "d.ddd", each with an optional leading sign.
  static Rational parse(std::string_view text) {
    auto fail = [&] { throw std::invalid_argument("invalid rational literal '" + std::string(text) + "'"); };
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t end = text.size();
    while (end > i && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    std::string_view s = text.substr(i, end - i);
    if (s.empty()) fail();
    bool negative = false;
    if (s.front() == '-' || s.front() == '+') {
      negative = s.front() == '-';
      s.remove_prefix(1);
    }
    auto digits = [](std::string_view d) {
      return !d.empty() && std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    Rational r;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
      auto p = s.substr(0, slash), q = s.substr(slash + 1);
      if (!digits(p) || !digits(q)) fail();
      BigInt den{std::string(q)};
      if (den == 0) throw std::invalid_argument("rational with zero denominator");
      r = normalize(BigInt(std::string(p)), std::move(den));
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
      auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
      if (!digits(ip) || !digits(fp)) fail();
      BigInt den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(fp.size()));
      r = normalize(BigInt(std::string(ip)) * den + BigInt(std::string(fp)), std::move(den));
    } else {
      if (!digits(s)) fail();
      r = Rational(BigInt(std::string(s)));
    }
    return negative ? -r : r;
  }

  const BigInt& numerator() const noexcept { return num_; }
  const BigInt& denominator() const noexcept { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_.sign(); }

  /// Nearest value of type T (round half to even). Throws std::range_error
  /// when the magnitude exceeds the exponent range of T.
  template <std::floating_point T>
  T to_float() const {
    using limits = std::numeric_limits<T>;
    if (num_ == 0) return T(0);
    BigInt n = boost::multiprecision::abs(num_);
    const BigInt& d = den_;
    long e0 = static_cast<long>(boost::multiprecision::msb(n)) - static_cast<long>(boost::multiprecision::msb(d));
    // Adjust so 2^e0 <= n/d < 2^(e0+1).
    bool below = e0 >= 0 ? n < (d << e0) : (n << -e0) < d;
    if (below) --e0;
    if (e0 >= limits::max_exponent) throw std::range_error("rational " + str() + " overflows floating range");
    const long p = limits::digits;
    long s = p - 1 - std::max<long>(e0, limits::min_exponent - 1);
    BigInt num = n, den = d;
    if (s >= 0)
      num <<= s;
    else
      den <<= -s;
    BigInt q, r;
    boost::multiprecision::divide_qr(num, den, q, r);
    BigInt twice = r << 1;
    if (twice > den || (twice == den && boost::multiprecision::bit_test(q, 0))) ++q;
    if (q == 0) return num_.sign() < 0 ? -T(0) : T(0);
    if (boost::multiprecision::msb(q) >= static_cast<unsigned>(p)) {
      q >>= 1;
      --s;
    }
    T value = std::ldexp(static_cast<T>(q.convert_to<unsigned long long>()), static_cast<int>(-s));
    if (std::isinf(value)) throw std::range_error("rational " + str() + " overflows floating range");
    return num_.sign() < 0 ? -value : value;
  }

  double to_double() const { return to_float<double>(); }

  std::string str() const { return num_.str() + "/" + den_.str(); }

  Rational operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return normalize(a.num_ + b.num_, a.den_);
    return normalize(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return normalize(a.num_ - b.num_, a.den_);
    return normalize(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return normalize(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ArithmeticError("rational division by zero");
    return normalize(a.num_ * b.den_, a.den_ * b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    BigInt lhs = a.num_ * b.den_, rhs = b.num_ * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  void reduce() {
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    if (den_ == 1) return;
    BigInt g = boost::multiprecision::gcd(num_, den_);
    if (g != 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  BigInt num_;
  BigInt den_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

/// Integer power; negative exponents invert (0^-k is an ArithmeticError).
inline Rational pow(const Rational& base, long exponent) {
  if (exponent < 0) return Rational(1) / pow(base, -exponent);
  auto e = static_cast<unsigned>(exponent);
  return Rational::normalize(boost::multiprecision::pow(base.numerator(), e),
                             boost::multiprecision::pow(base.denominator(), e));
}

/// (p1+p2)/(q1+q2), which lies strictly between a and b when a < b.
inline Rational mediant(const Rational& a, const Rational& b) {
  if (!(a < b)) throw std::invalid_argument("mediant requires a < b, got " + a.str() + " and " + b.str());
  return Rational::normalize(a.numerator() + b.numerator(), a.denominator() + b.denominator());
}

}  // namespace hhlab
