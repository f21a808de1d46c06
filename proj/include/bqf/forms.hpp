#pragma once

// Positive definite binary quadratic forms: Gauss reduction, enumeration of
// reduced representatives and class numbers h(D), H(D).

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "bqf/arith.hpp"

namespace bqf {

/// The form a x^2 + b x y + c y^2.
struct QuadForm {
  i64 a = 0;
  i64 b = 0;
  i64 c = 0;

  auto operator<=>(const QuadForm&) const = default;
  std::string str() const {
    return "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
  }
};

inline i128 discriminant(const QuadForm& f) {
  return static_cast<i128>(f.b) * f.b - static_cast<i128>(4) * f.a * f.c;
}

inline i64 content(const QuadForm& f) {
  return std::gcd(std::gcd(f.a, f.b), f.c);
}

/// Integer matrix [[r, s], [t, u]] with ru - st = 1, acting by
/// (x, y) -> (r x + s y, t x + u y).
struct UnimodularMap {
  i64 r = 1;
  i64 s = 0;
  i64 t = 0;
  i64 u = 1;

  i128 determinant() const { return static_cast<i128>(r) * u - static_cast<i128>(s) * t; }
  bool operator==(const UnimodularMap&) const = default;

  UnimodularMap then(const UnimodularMap& m) const {
    return {r * m.r + s * m.t, r * m.s + s * m.u, t * m.r + u * m.t, t * m.s + u * m.u};
  }
};

/// The form F(r x + s y, t x + u y).
inline QuadForm substitute(const QuadForm& f, const UnimodularMap& m) {
  const i128 a = f.a, b = f.b, c = f.c;
  const i128 na = a * m.r * m.r + b * m.r * m.t + c * m.t * m.t;
  const i128 nb = 2 * a * m.r * m.s + b * (static_cast<i128>(m.r) * m.u + static_cast<i128>(m.s) * m.t) +
                  2 * c * m.t * m.u;
  const i128 nc = a * m.s * m.s + b * m.s * m.u + c * m.u * m.u;
  return {static_cast<i64>(na), static_cast<i64>(nb), static_cast<i64>(nc)};
}

inline bool is_positive_definite(const QuadForm& f) { return f.a > 0 && discriminant(f) < 0; }

/// |b| <= a <= c, with b >= 0 whenever |b| = a or a = c.
inline bool is_reduced(const QuadForm& f) {
  const i64 ab = f.b < 0 ? -f.b : f.b;
  if (!(ab <= f.a && f.a <= f.c)) return false;
  if ((ab == f.a || f.a == f.c) && f.b < 0) return false;
  return true;
}

struct Reduction {
  QuadForm form;
  UnimodularMap map;
};

/// Gauss reduction to the unique boundary-normalized representative.
/// The returned map carries the input to the output: substitute(F, map) == form.
inline Reduction reduce(const QuadForm& input) {
  if (!is_positive_definite(input)) {
    throw std::invalid_argument("reduce: form " + input.str() + " is not positive definite");
  }
  QuadForm f = input;
  UnimodularMap m;
  const auto translate = [&] {
    const i64 two_a = 2 * f.a;
    i64 r = f.b % two_a;
    if (r < 0) r += two_a;
    if (r > f.a) r -= two_a;
    const i64 k = (r - f.b) / two_a;
    if (k != 0) {
      const UnimodularMap step{1, k, 0, 1};
      f = substitute(f, step);
      m = m.then(step);
    }
  };
  const UnimodularMap swap{0, -1, 1, 0};
  for (;;) {
    translate();
    if (f.a > f.c) {
      f = substitute(f, swap);
      m = m.then(swap);
      continue;
    }
    break;
  }
  if (f.b < 0 && (f.b == -f.a || f.a == f.c)) {
    if (f.a == f.c) {
      f = substitute(f, swap);
      m = m.then(swap);
    } else {
      const UnimodularMap step{1, 1, 0, 1};
      f = substitute(f, step);
      m = m.then(step);
    }
  }
  return {f, m};
}

inline void require_negative_discriminant(i64 d) {
  if (d >= 0) throw std::invalid_argument("discriminant must be negative, got " + std::to_string(d));
  const i64 r = ((d % 4) + 4) % 4;
  if (r != 0 && r != 1) {
    throw std::invalid_argument("discriminant must be 0 or 1 mod 4, got " + std::to_string(d));
  }
}

/// One reduced representative per SL2(Z)-class of positive definite forms of
/// discriminant d, sorted lexicographically.
inline std::vector<QuadForm> enumerate_reduced(i64 d) {
  require_negative_discriminant(d);
  const i64 n = -d;
  const i64 a_max = static_cast<i64>(isqrt(static_cast<u64>(n / 3)));
  std::vector<QuadForm> out;
  for (i64 a = 1; a <= a_max; ++a) {
    const i64 b0 = (n & 1) ? (a & 1 ? -a : -a + 1) : (a & 1 ? -a + 1 : -a);
    for (i64 b = b0; b <= a; b += 2) {
      const i64 num = b * b + n;
      if (num % (4 * a) != 0) continue;
      const i64 c = num / (4 * a);
      if (c < a) continue;
      if (b < 0 && (b == -a || a == c)) continue;
      out.push_back({a, b, c});
    }
  }
  return out;
}

struct ContentCount {
  u64 content;
  u64 count;
  bool operator==(const ContentCount&) const = default;
};

struct ClassNumbers {
  u64 h = 0;  ///< primitive classes
  u64 H = 0;  ///< all classes, unweighted
  std::vector<ContentCount> breakdown;  ///< ascending content, nonzero counts only
};

inline ClassNumbers class_numbers(i64 d) {
  const auto forms = enumerate_reduced(d);
  std::vector<u64> by_content;
  for (const auto& f : forms) {
    const auto g = static_cast<u64>(content(f));
    if (g >= by_content.size()) by_content.resize(g + 1, 0);
    ++by_content[g];
  }
  ClassNumbers out;
  out.H = forms.size();
  out.h = by_content.size() > 1 ? by_content[1] : 0;
  for (u64 g = 1; g < by_content.size(); ++g) {
    if (by_content[g] != 0) out.breakdown.push_back({g, by_content[g]});
  }
  return out;
}

/// h(D) by enumeration of primitive reduced forms.
inline u64 class_number_enumerated(i64 d) { return class_numbers(d).h; }

}  // namespace bqf
