#pragma once

// Roots of quadratic congruences f(v) = 0 (mod n), Weyl sums over those roots
// and the divisor-method census.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bqf/arith.hpp"
#include "bqf/census.hpp"
#include "bqf/parallel.hpp"

namespace bqf {

/// f(x) = A x^2 + B x + C.
struct QuadraticPoly {
  i64 A = 1;
  i64 B = 0;
  i64 C = 0;

  i128 disc() const { return static_cast<i128>(B) * B - static_cast<i128>(4) * A * C; }
  bool irreducible() const {
    const i128 d = disc();
    if (A == 0) return false;
    if (d < 0) return true;
    if (d > static_cast<i128>(INT64_MAX)) return !is_square_u128(static_cast<u128>(d));
    return !is_square(static_cast<i64>(d));
  }

  /// f(x) mod m for 0 <= x < m.
  u64 eval_mod(u64 x, u64 m) const {
    const u64 a = mod_floor(A, m), b = mod_floor(B, m), c = mod_floor(C, m);
    u64 r = mulmod(mulmod(a, x, m), x, m);
    r = (static_cast<u128>(r) + mulmod(b, x, m)) % m;
    return static_cast<u64>((static_cast<u128>(r) + c) % m);
  }
  u64 deriv_mod(u64 x, u64 m) const {
    return static_cast<u64>((static_cast<u128>(mulmod(mod_floor(2 * static_cast<i128>(A), m), x, m)) + mod_floor(B, m)) % m);
  }

  std::string str() const {
    return std::to_string(A) + "x^2+" + std::to_string(B) + "x+" + std::to_string(C);
  }

 private:
  static bool is_square_u128(u128 v) {
    auto r = static_cast<u128>(std::sqrt(static_cast<long double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r * r == v;
  }
};

/// The census polynomial x^2 + x + p.
inline QuadraticPoly census_poly(u64 p) { return {1, 1, static_cast<i64>(p)}; }

/// Sorted residues v in [0, n) with f(v) = 0 (mod n).
struct RootSet {
  u64 n = 1;
  std::vector<u64> roots;
};

namespace detail {

// Square root of a quadratic residue a modulo an odd prime l.
inline u64 sqrt_mod_prime(u64 a, u64 l) {
  a %= l;
  if (a == 0) return 0;
  if (l % 4 == 3) return powmod(a, (l + 1) / 4, l);
  u64 q = l - 1;
  unsigned s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u64 z = 2;
  while (powmod(z, (l - 1) / 2, l) != l - 1) ++z;
  u64 m = s, c = powmod(z, q, l), t = powmod(a, q, l), r = powmod(a, (q + 1) / 2, l);
  while (t != 1) {
    u64 i = 0, tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, l);
      ++i;
    }
    u64 b = c;
    for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, l);
    m = i;
    c = mulmod(b, b, l);
    t = mulmod(t, c, l);
    r = mulmod(r, b, l);
  }
  return r;
}

inline std::vector<u64> roots_mod_prime(const QuadraticPoly& f, u64 l) {
  std::vector<u64> out;
  if (l <= 64) {
    for (u64 v = 0; v < l; ++v) {
      if (f.eval_mod(v, l) == 0) out.push_back(v);
    }
    return out;
  }
  const u64 a = mod_floor(f.A, l), b = mod_floor(f.B, l), c = mod_floor(f.C, l);
  if (a == 0) {
    if (b != 0) {
      out.push_back(mulmod(l - c == l ? 0 : l - c, invmod(b, l), l));
    } else if (c == 0) {
      for (u64 v = 0; v < l; ++v) out.push_back(v);
    }
    return out;
  }
  const u64 disc = mod_floor(f.disc(), l);
  const u64 inv2a = invmod(mulmod(2, a, l), l);
  const u64 neg_b = (l - b) % l;
  if (disc == 0) {
    out.push_back(mulmod(neg_b, inv2a, l));
    return out;
  }
  if (powmod(disc, (l - 1) / 2, l) != 1) return out;
  const u64 s = sqrt_mod_prime(disc, l);
  u64 r1 = mulmod((neg_b + s) % l, inv2a, l);
  u64 r2 = mulmod((neg_b + l - s) % l, inv2a, l);
  if (r1 > r2) std::swap(r1, r2);
  out.push_back(r1);
  if (r2 != r1) out.push_back(r2);
  return out;
}

// Roots mod l^(k+1) from the roots mod l^k (modulus lk).
inline std::vector<u64> lift_roots(const QuadraticPoly& f, std::span<const u64> roots, u64 l, u64 lk) {
  const u64 next = lk * l;
  std::vector<u64> out;
  for (const u64 x : roots) {
    if (f.deriv_mod(x % l, l) != 0) {
      // Nonsingular: unique Newton lift.
      const u64 fx = f.eval_mod(x, next);
      const u64 t = mulmod(fx / lk, invmod(f.deriv_mod(x % l, l), l), l);
      out.push_back((x + (l - t) % l * lk) % next);
    } else {
      for (u64 j = 0; j < l; ++j) {
        const u64 cand = x + j * lk;
        if (f.eval_mod(cand, next) == 0) out.push_back(cand);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<u64> crt_combine(std::span<const u64> r1, u64 m1, std::span<const u64> r2, u64 m2) {
  std::vector<u64> out;
  out.reserve(r1.size() * r2.size());
  if (m1 == 1) return {r2.begin(), r2.end()};
  if (m2 == 1) return {r1.begin(), r1.end()};
  const u64 m = m1 * m2;
  const u64 inv = invmod(m1 % m2, m2);
  for (const u64 x : r1) {
    for (const u64 y : r2) {
      const u64 t = mulmod(mod_floor(static_cast<i128>(y) - static_cast<i128>(x % m2), m2), inv, m2);
      out.push_back(static_cast<u64>((static_cast<u128>(t) * m1 + x) % m));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

inline std::vector<u64> roots_mod_prime_power(const QuadraticPoly& f, u64 l, unsigned e) {
  std::vector<u64> roots = detail::roots_mod_prime(f, l);
  u64 lk = l;
  for (unsigned k = 1; k < e && !roots.empty(); ++k) {
    roots = detail::lift_roots(f, roots, l, lk);
    lk *= l;
  }
  return roots;
}

/// Complete root set of f modulo n: solve at each prime power (Hensel lifting,
/// enumerating lifts at singular roots) and recombine by CRT.
inline RootSet roots_mod_n(const QuadraticPoly& f, const Factorization& nf) {
  RootSet out{nf.value, {0}};
  u64 m = 1;
  for (const auto& [l, e] : nf.factors) {
    u64 q = 1;
    for (unsigned i = 0; i < e; ++i) q *= l;
    const auto local = roots_mod_prime_power(f, l, e);
    out.roots = detail::crt_combine(out.roots, m, local, q);
    m *= q;
    if (out.roots.empty()) break;
  }
  return out;
}

inline RootSet roots_mod_n(const QuadraticPoly& f, u64 n) {
  if (n == 0) throw std::invalid_argument("roots_mod_n: modulus must be positive");
  if (n > (u64{1} << 50)) throw std::invalid_argument("roots_mod_n: modulus above 2^50");
  return roots_mod_n(f, factorize(n));
}

/// Root sets of f for every modulus 1..x, stored contiguously.
class RootTable {
 public:
  RootTable(const QuadraticPoly& f, u64 x) : RootTable(f, x, SpfTable(x)) {}

  RootTable(const QuadraticPoly& f, u64 x, const SpfTable& spf) : x_(x), offsets_(x + 2, 0) {
    if (spf.limit() < x) throw std::invalid_argument("RootTable: SPF table too small");
    offsets_[1] = 0;
    if (x >= 1) {
      values_.push_back(0);
      offsets_[2] = 1;
    }
    for (u64 n = 2; n <= x; ++n) {
      const u64 l = spf[n];
      u64 q = 1;
      u64 m = n;
      while (m % l == 0) {
        m /= l;
        q *= l;
      }
      std::vector<u64> r;
      if (m == 1) {
        r = q == l ? detail::roots_mod_prime(f, l) : detail::lift_roots(f, get(q / l), l, q / l);
      } else {
        r = detail::crt_combine(get(q), q, get(m), m);
      }
      for (const u64 v : r) values_.push_back(static_cast<std::uint32_t>(v));
      offsets_[n + 1] = values_.size();
    }
  }

  u64 limit() const { return x_; }
  std::size_t count(u64 n) const { return offsets_[n + 1] - offsets_[n]; }
  std::vector<u64> get(u64 n) const {
    return {values_.begin() + static_cast<std::ptrdiff_t>(offsets_[n]),
            values_.begin() + static_cast<std::ptrdiff_t>(offsets_[n + 1])};
  }
  std::span<const std::uint32_t> view(u64 n) const {
    return std::span<const std::uint32_t>(values_).subspan(offsets_[n], count(n));
  }
  std::size_t total() const { return values_.size(); }

 private:
  u64 x_;
  std::vector<u64> offsets_;
  std::vector<std::uint32_t> values_;
};

/// sum_{m | a} (D | m); equals the root count of x^2 + x + (1 - D)/4 modulo a
/// when a is odd and squarefree (the identity fails otherwise, e.g. a = 49,
/// D = -7).
inline u64 count_roots_jacobi(u64 a, i64 d) {
  if (a == 0 || (a & 1) == 0) throw std::invalid_argument("count_roots_jacobi: a must be odd and positive");
  if (d >= 0 || ((d % 4) + 4) % 4 != 1) throw std::invalid_argument("count_roots_jacobi: D must be negative, 1 mod 4");
  const auto fa = factorize(a);
  if (!is_squarefree(fa)) throw std::invalid_argument("count_roots_jacobi: a must be squarefree");
  i64 sum = 0;
  for (const u64 m : divisors(fa)) sum += kronecker(d, m);
  return static_cast<u64>(sum);
}

/// Number of roots v with alpha*n <= v <= beta*n.
inline u64 s_f_window(const RootSet& rs, double alpha, double beta) {
  if (!(0.0 <= alpha && alpha <= beta && beta <= 1.0)) {
    throw std::invalid_argument("s_f_window: need 0 <= alpha <= beta <= 1");
  }
  // Same rounded point v/n as the discrepancy scan, so a window at a point hits it.
  const double n = static_cast<double>(rs.n);
  return static_cast<u64>(std::count_if(rs.roots.begin(), rs.roots.end(), [&](u64 v) {
    const double x = static_cast<double>(v) / n;
    return alpha <= x && x <= beta;
  }));
}

inline u64 s_f_window(const QuadraticPoly& f, u64 n, double alpha, double beta) {
  return s_f_window(roots_mod_n(f, n), alpha, beta);
}

namespace detail {

// e(h v / n), with h v reduced mod n exactly first.
inline std::complex<double> unit_root(i64 h, u64 v, u64 n) {
  const u64 hv = static_cast<u64>(mod_floor(static_cast<i128>(h) * v, n));
  const double angle = 2.0 * std::numbers::pi * (static_cast<double>(hv) / static_cast<double>(n));
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace detail

/// rho_h(n) = sum over roots v of f mod n of e(h v / n).
template <typename Roots>
std::complex<double> rho_h(const Roots& roots, u64 n, i64 h) {
  std::vector<double> re, im;
  for (const auto v : roots) {
    const auto z = detail::unit_root(h, static_cast<u64>(v), n);
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {pairwise_sum<double>(re), pairwise_sum<double>(im)};
}

inline std::complex<double> rho_h(const QuadraticPoly& f, u64 n, i64 h) {
  return rho_h(roots_mod_n(f, n).roots, n, h);
}

struct WeylSum {
  u64 x = 0;
  i64 h = 0;
  std::complex<double> value;
  /// |sum| / (|h|^{4/5} sigma_{-1/2}(h)^2 x^{4/5} (log x)^2); empty when h = 0 or x < 2.
  std::optional<double> bound_ratio;
};

inline std::optional<double> weyl_bound_ratio(double magnitude, i64 h, u64 x) {
  if (h == 0 || x < 2) return std::nullopt;
  const u64 ah = static_cast<u64>(h < 0 ? -h : h);
  const double sig = sigma_z(factorize(ah), -0.5);
  const double lx = std::log(static_cast<double>(x));
  const double denom = std::pow(static_cast<double>(ah), 0.8) * sig * sig * std::pow(static_cast<double>(x), 0.8) * lx * lx;
  return magnitude / denom;
}

inline WeylSum weyl_partial_sum(const RootTable& table, i64 h, u64 x) {
  if (x < 1 || x > table.limit()) throw std::invalid_argument("weyl_partial_sum: x outside table");
  std::vector<double> re(x), im(x);
  for (u64 n = 1; n <= x; ++n) {
    const auto z = rho_h(table.view(n), n, h);
    re[n - 1] = z.real();
    im[n - 1] = z.imag();
  }
  WeylSum out{x, h, {pairwise_sum<double>(re), pairwise_sum<double>(im)}, std::nullopt};
  out.bound_ratio = weyl_bound_ratio(std::abs(out.value), h, x);
  return out;
}

inline WeylSum weyl_partial_sum(const QuadraticPoly& f, i64 h, u64 x) {
  return weyl_partial_sum(RootTable(f, x), h, x);
}

// ---------------------------------------------------------------------------
// Divisor-method census

namespace detail {

// Reduced forms of discriminant 1 - 4p via ac = k^2 + k + p, b = 2k + 1.
inline CensusRow divisor_row(u64 p, const SpfTable& spf) {
  const u64 a_max = isqrt((4 * p - 1) / 3);
  const RootTable roots(census_poly(p), a_max, spf);
  CensusRow row{p, 0, {}};
  std::vector<u64> by_content;
  const auto ip = static_cast<i64>(p);
  for (u64 au = 1; au <= a_max; ++au) {
    const auto a = static_cast<i64>(au);
    // |2k + 1| <= a  <=>  ceil((-a - 1) / 2) <= k <= floor((a - 1) / 2)
    const i64 k_hi = (a - 1) / 2;
    const i64 k_lo = -(a + 1) / 2;
    for (const auto r : roots.view(au)) {
      i64 k = static_cast<i64>(r);
      while (k > k_hi) k -= a;
      for (; k >= k_lo; k -= a) {
        const i64 b = 2 * k + 1;
        const i64 c = (k * k + k + ip) / a;
        if (c < a) continue;
        if (b < 0 && (b == -a || a == c)) continue;
        ++row.H;
        const auto g = static_cast<u64>(std::gcd(std::gcd(a, b), c));
        if (g >= by_content.size()) by_content.resize(g + 1, 0);
        ++by_content[g];
      }
    }
  }
  for (u64 g = 1; g < by_content.size(); ++g) {
    if (by_content[g] != 0) row.breakdown.push_back({g, by_content[g]});
  }
  return row;
}

}  // namespace detail

/// Q(X) by counting roots k of k^2 + k + p = 0 (mod a) in the window
/// |2k + 1| <= a for every a <= sqrt((4p - 1) / 3).
inline CensusTable census_divisor(u64 x, unsigned workers = 1) {
  if (x < 2) return {};
  const SpfTable spf(isqrt((4 * x - 1) / 3) + 1);
  const auto blocks = census_blocks(x);
  auto parts = run_blocks(blocks.size(), workers, [&](std::size_t i) {
    std::vector<CensusRow> rows;
    for_each_prime(blocks[i].first + 1, blocks[i].second,
                   [&](u64 p) { rows.push_back(detail::divisor_row(p, spf)); });
    return rows;
  });
  CensusTable table;
  for (auto& part : parts) {
    for (auto& row : part) append_row(table, std::move(row));
  }
  return table;
}

/// Divisor-method rows for an explicit list of primes.
inline CensusTable census_divisor_primes(std::span<const u64> primes) {
  u64 pmax = 2;
  for (const u64 p : primes) pmax = std::max(pmax, p);
  const SpfTable spf(isqrt((4 * pmax - 1) / 3) + 1);
  CensusTable table;
  for (const u64 p : primes) append_row(table, detail::divisor_row(p, spf));
  return table;
}

}  // namespace bqf
