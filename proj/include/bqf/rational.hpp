#pragma once

#include <compare>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bqf/arith.hpp"

namespace bqf {

inline std::string to_string(i128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

/// Exact rational with 128-bit numerator and positive denominator, always in
/// lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(i64 n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(i128 n, i128 d) : num_(n), den_(d) {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    normalize();
  }

  i128 num() const { return num_; }
  i128 den() const { return den_; }
  double to_double() const { return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_)); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const i128 g = gcd128(a.den_, b.den_);
    return {a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g), a.den_ / g * b.den_};
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num_, b.den_); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    const i128 g1 = gcd128(a.num_, b.den_);
    const i128 g2 = gcd128(b.num_, a.den_);
    return {(a.num_ / g1) * (b.num_ / g2), (a.den_ / g2) * (b.den_ / g1)};
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return a * Rational(b.den_, b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const i128 l = a.num_ * b.den_, r = b.num_ * a.den_;
    return l <=> r;
  }

  std::string str() const { return den_ == 1 ? to_string(num_) : to_string(num_) + "/" + to_string(den_); }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const i128 g = gcd128(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  i128 num_ = 0;
  i128 den_ = 1;
};

}  // namespace bqf
