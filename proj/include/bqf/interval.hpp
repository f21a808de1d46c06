#pragma once

// Outward-rounded interval arithmetic and certified Euler products.
//
// Each + - * / computes in round-to-nearest, recovers the exact rounding error
// (two-sum or fma) and moves the endpoint one ulp outward only when the error
// points that way, so exact results stay exact. libm calls (exp, log, sqrt)
// are widened by two ulps. The exact result of any composed computation lies
// inside the returned interval. No dependency tracking is attempted.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bqf/arith.hpp"

namespace bqf {

template <typename T>
class Interval {
 public:
  Interval() = default;
  Interval(T lo, T hi) : lo_(lo), hi_(hi) {
    if (!(lo_ <= hi_)) throw std::invalid_argument("Interval: lo > hi");
  }

  /// Exactly representable point.
  static Interval exact(T x) { return {x, x}; }
  /// A value known only to round-to-nearest precision.
  static Interval nearest(T x) { return {down(x), up(x)}; }
  /// Integer ratio num/den.
  static Interval ratio(i64 num, i64 den) {
    return exact(static_cast<T>(num)) / exact(static_cast<T>(den));
  }
  static Interval pi() {
    return {down(std::numbers::pi_v<T>), up(std::numbers::pi_v<T>)};
  }

  T lo() const { return lo_; }
  T hi() const { return hi_; }
  T mid() const { return lo_ / 2 + hi_ / 2; }
  T width() const { return hi_ - lo_; }
  T radius() const { return up(width() / 2); }
  bool contains(T x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool intersects(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }

  template <typename U>
  Interval<U> convert() const {
    const U lo = static_cast<U>(lo_), hi = static_cast<U>(hi_);
    return {static_cast<T>(lo) <= lo_ ? lo : Interval<U>::down(lo), static_cast<T>(hi) >= hi_ ? hi : Interval<U>::up(hi)};
  }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return {sum_lo(a.lo_, b.lo_), sum_hi(a.hi_, b.hi_)};
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    return {sum_lo(a.lo_, -b.hi_), sum_hi(a.hi_, -b.lo_)};
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    const T x[4][2] = {{a.lo_, b.lo_}, {a.lo_, b.hi_}, {a.hi_, b.lo_}, {a.hi_, b.hi_}};
    T lo = std::numeric_limits<T>::infinity(), hi = -lo;
    for (const auto& [u, v] : x) {
      const T p = u * v;
      const T r = product_error(u, v, p);  // u v = p + r exactly
      lo = std::min(lo, r < 0 ? down(p) : p);
      hi = std::max(hi, r > 0 ? up(p) : p);
    }
    return {lo, hi};
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.lo_ <= 0 && b.hi_ >= 0) throw std::domain_error("Interval: division by interval containing 0");
    const T x[4][2] = {{a.lo_, b.lo_}, {a.lo_, b.hi_}, {a.hi_, b.lo_}, {a.hi_, b.hi_}};
    T lo = std::numeric_limits<T>::infinity(), hi = -lo;
    for (const auto& [u, v] : x) {
      const T q = u / v;
      const T r = u - q * v - product_error(q, v, q * v);  // u / v = q + r / v exactly
      const bool above = (r > 0) == (v > 0) && r != 0;
      const bool below = (r < 0) == (v > 0) && r != 0;
      lo = std::min(lo, below ? down(q) : q);
      hi = std::max(hi, above ? up(q) : q);
    }
    return {lo, hi};
  }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator+=(const Interval& o) { return *this = *this + o; }

  friend Interval exp(const Interval& a) {
    using std::exp;
    return {down(down(exp(a.lo_))), up(up(exp(a.hi_)))};
  }
  friend Interval log(const Interval& a) {
    using std::log;
    if (a.lo_ <= 0) throw std::domain_error("Interval: log of non-positive interval");
    // log 1 = 0 exactly
    const T lo = a.lo_ == T(1) ? T(0) : down(down(log(a.lo_)));
    const T hi = a.hi_ == T(1) ? T(0) : up(up(log(a.hi_)));
    return {lo, hi};
  }
  friend Interval sqrt(const Interval& a) {
    using std::sqrt;
    if (a.lo_ < 0) throw std::domain_error("Interval: sqrt of negative interval");
    return {std::max(T(0), down(down(sqrt(a.lo_)))), up(up(sqrt(a.hi_)))};
  }

  /// Widen symmetrically by r (outward).
  Interval inflate(T r) const { return {down(lo_ - r), up(hi_ + r)}; }

  // Two-sum error term decides whether the rounded sum needs widening.
  static T sum_lo(T a, T b) {
    const T s = a + b;
    const T bb = s - a;
    const T err = (a - (s - bb)) + (b - bb);
    return err < 0 ? down(s) : s;
  }
  static T sum_hi(T a, T b) {
    const T s = a + b;
    const T bb = s - a;
    const T err = (a - (s - bb)) + (b - bb);
    return err > 0 ? up(s) : s;
  }

  // Exact error of the rounded product p = fl(u v). Hardware fma for double;
  // long double has no fma instruction, so Dekker's split product is used
  // (exact barring overflow or underflow, far outside the ranges used here).
  static T product_error(T u, T v, T p) {
    if constexpr (std::numeric_limits<T>::digits <= 53) {
      return std::fma(u, v, -p);
    } else {
      constexpr T split = T(4294967297.0L);  // 2^32 + 1
      const T cu = split * u, cv = split * v;
      const T uh = cu - (cu - u), ul = u - uh;
      const T vh = cv - (cv - v), vl = v - vh;
      return ((uh * vh - p) + uh * vl + ul * vh) + ul * vl;
    }
  }

  static T down(T x) { return std::nextafter(x, -std::numeric_limits<T>::infinity()); }
  static T up(T x) { return std::nextafter(x, std::numeric_limits<T>::infinity()); }

  friend std::ostream& operator<<(std::ostream& os, const Interval& v) {
    return os << '[' << v.lo_ << ", " << v.hi_ << ']';
  }

 private:
  T lo_ = 0;
  T hi_ = 0;
};

using IntervalValue = Interval<double>;
using WideInterval = Interval<long double>;

// ---------------------------------------------------------------------------
// Euler products

/// Caller-supplied bound on the tail of an Euler product.
///   per_prime(l) >= |log local_factor(l)| for every prime l beyond the cutoff;
///   beyond(P)    >= sum over primes l > P of per_prime(l), in closed form.
struct TailMajorant {
  std::function<double(u64)> per_prime;
  std::function<double(u64)> beyond;
};

/// Majorant c / l^s summed over primes l > P, using
/// pi(x) < 1.25506 x / log x (x > 1) in the Stieltjes integral.
inline TailMajorant prime_tail_majorant(double c, double s) {
  return {
      [c, s](u64 l) { return c / std::pow(static_cast<double>(l), s); },
      [c, s](u64 p) {
        if (s <= 1.0 || p < 2) return std::numeric_limits<double>::infinity();
        const double pd = static_cast<double>(p);
        return c * s * 1.25506 / ((s - 1.0) * std::pow(pd, s - 1.0) * std::log(pd));
      },
  };
}

/// Majorant c / n^s summed over all integers n > P.
inline TailMajorant integer_tail_majorant(double c, double s) {
  return {
      [c, s](u64 l) { return c / std::pow(static_cast<double>(l), s); },
      [c, s](u64 p) {
        if (s <= 1.0 || p < 1) return std::numeric_limits<double>::infinity();
        return c / ((s - 1.0) * std::pow(static_cast<double>(p), s - 1.0));
      },
  };
}

struct EulerProductOptions {
  u64 min_prime = 2;
  /// Primes beyond the cutoff on which the per-prime majorant is checked.
  unsigned majorant_checks = 64;
};

/// Certified enclosure of prod over primes l >= min_prime of local_factor(l).
/// local_factor returns a WideInterval enclosing the exact factor. The finite
/// product runs over l <= prime_cutoff; the rest is enclosed by
/// exp(+-tail.beyond(prime_cutoff)).
template <typename Factor>
IntervalValue euler_product(Factor&& local_factor, u64 prime_cutoff, const TailMajorant& tail,
                            const EulerProductOptions& opts = {}) {
  const double tail_log = tail.beyond(prime_cutoff);
  if (!std::isfinite(tail_log) || tail_log < 0.0) {
    throw std::invalid_argument("euler_product: tail majorant is negative or not summable");
  }
  WideInterval prod = WideInterval::exact(1);
  for_each_prime(opts.min_prime, prime_cutoff, [&](u64 l) {
    const WideInterval f = local_factor(l);
    if (!(f.lo() > 0)) throw std::invalid_argument("euler_product: local factor not positive");
    prod *= f;
  });
  // Spot-check the per-prime contract just beyond the cutoff.
  unsigned checked = 0;
  const u64 probe_lo = std::max(prime_cutoff + 1, opts.min_prime);
  for_each_prime(probe_lo, probe_lo + 20 * opts.majorant_checks + 200, [&](u64 l) {
    if (checked >= opts.majorant_checks) return;
    ++checked;
    const WideInterval lf = log(local_factor(l));
    const long double mag = std::max(std::fabs(lf.lo()), std::fabs(lf.hi()));
    if (mag > static_cast<long double>(tail.per_prime(l))) {
      throw std::invalid_argument("euler_product: tail majorant does not dominate |log factor| at " +
                                  std::to_string(l));
    }
  });
  if (tail_log == 0.0) return prod.template convert<double>();
  const WideInterval t{-static_cast<long double>(tail_log), static_cast<long double>(tail_log)};
  return (prod * exp(t)).template convert<double>();
}

}  // namespace bqf
