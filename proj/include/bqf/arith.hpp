#pragma once

// Exact integer arithmetic: primes, factorization, Kronecker symbols and
// multiplicative functions. Everything here is a pure function of its inputs.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace bqf {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

inline u64 isqrt(u64 n) {
  u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return static_cast<u64>(r);
}

inline bool is_square(i64 n) {
  if (n < 0) return false;
  const u64 r = isqrt(static_cast<u64>(n));
  return r * r == static_cast<u64>(n);
}

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 powmod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

// Non-negative residue of a (possibly negative) value.
inline u64 mod_floor(i128 a, u64 m) {
  i128 r = a % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<u64>(r);
}

// Inverse of a modulo m; requires gcd(a, m) = 1.
inline u64 invmod(u64 a, u64 m) {
  i128 old_r = a % m, r = m, old_s = 1, s = 0;
  while (r != 0) {
    const i128 q = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - q * r};
    std::tie(old_s, s) = std::pair{s, old_s - q * s};
  }
  if (old_r != 1) throw std::domain_error("invmod: not invertible");
  return mod_floor(old_s, m);
}

// ---------------------------------------------------------------------------
// Kronecker symbol

#ifdef BQF_FAULT_INJECTION
namespace testing {
// When set, kronecker(D, n) for exactly this pair returns a corrupted value.
inline std::optional<std::pair<i64, u64>> kronecker_fault;
}  // namespace testing
#endif

namespace detail {

// Jacobi symbol (a | n) for odd n >= 1 and 0 <= a.
inline int jacobi(u64 a, u64 n) {
  a %= n;
  int t = 1;
  while (a != 0) {
    const int tz = std::countr_zero(a);
    a >>= tz;
    if ((tz & 1) && ((n & 7) == 3 || (n & 7) == 5)) t = -t;
    if ((a & 3) == 3 && (n & 3) == 3) t = -t;
    std::swap(a, n);
    a %= n;
  }
  return n == 1 ? t : 0;
}

inline int kronecker_impl(i64 d, u64 n) {
  if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
  int result = 1;
  if ((n & 1) == 0) {
    if ((d & 1) == 0) return 0;
    const int v = std::countr_zero(n);
    n >>= v;
    const int r8 = static_cast<int>(mod_floor(d, 8));
    if ((v & 1) && (r8 == 3 || r8 == 5)) result = -1;
  }
  if (n == 1) return result;
  return result * jacobi(mod_floor(d, n), n);
}

}  // namespace detail

/// Kronecker symbol (D | n), completely multiplicative in n.
/// (D | 2) follows D mod 8 and (D | 0) = [|D| = 1].
inline int kronecker(i64 d, u64 n) {
  const int k = detail::kronecker_impl(d, n);
#ifdef BQF_FAULT_INJECTION
  if (testing::kronecker_fault && testing::kronecker_fault->first == d &&
      testing::kronecker_fault->second == n) {
    return k == 0 ? 1 : -k;
  }
#endif
  return k;
}

// ---------------------------------------------------------------------------
// Sieving

/// Primes in [lo, hi] in ascending order.
struct PrimeRange {
  u64 lo = 0;
  u64 hi = 0;
  std::vector<u64> primes;
};

namespace detail {

inline std::vector<std::uint32_t> small_primes_upto(std::uint32_t n) {
  std::vector<std::uint32_t> out;
  if (n < 2) return out;
  std::vector<bool> composite(n + 1, false);
  for (std::uint32_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (u64 j = static_cast<u64>(i) * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

}  // namespace detail

/// Calls fn(p) for every prime p in [lo, hi], ascending, segment by segment.
template <typename Fn>
void for_each_prime(u64 lo, u64 hi, Fn&& fn) {
  if (hi < 2 || lo > hi) return;
  const u64 start = std::max<u64>(lo, 2);
  const auto base = detail::small_primes_upto(static_cast<std::uint32_t>(isqrt(hi)));
  constexpr u64 kSegment = 1u << 18;
  std::vector<std::uint8_t> mark(kSegment);
  for (u64 seg = start; seg <= hi; seg += kSegment) {
    const u64 seg_hi = std::min(hi, seg + kSegment - 1);
    const u64 len = seg_hi - seg + 1;
    std::fill(mark.begin(), mark.begin() + static_cast<std::ptrdiff_t>(len), 1);
    for (const u64 p : base) {
      if (p * p > seg_hi) break;
      u64 j = std::max(p * p, (seg + p - 1) / p * p);
      for (; j <= seg_hi; j += p) mark[j - seg] = 0;
    }
    for (u64 i = 0; i < len; ++i) {
      if (mark[i]) fn(seg + i);
    }
    if (seg_hi == hi) break;
  }
}

/// Segmented sieve of Eratosthenes over [lo, hi].
inline PrimeRange sieve_primes(u64 lo, u64 hi) {
  PrimeRange out{lo, hi, {}};
  for_each_prime(lo, hi, [&](u64 p) { out.primes.push_back(p); });
  return out;
}

/// Primality lookup table for [0, n].
class PrimeTable {
 public:
  explicit PrimeTable(u64 n) : bits_(n + 1, 0) {
    for (const u64 p : sieve_primes(0, n).primes) bits_[p] = 1;
  }
  bool operator()(u64 n) const { return n < bits_.size() && bits_[n] != 0; }
  u64 limit() const { return bits_.empty() ? 0 : bits_.size() - 1; }

 private:
  std::vector<std::uint8_t> bits_;
};

/// Smallest-prime-factor table on [0, n] (linear sieve).
class SpfTable {
 public:
  explicit SpfTable(u64 n) : spf_(n + 1, 0) {
    std::vector<std::uint32_t> primes;
    for (u64 i = 2; i <= n; ++i) {
      if (spf_[i] == 0) {
        spf_[i] = static_cast<std::uint32_t>(i);
        primes.push_back(static_cast<std::uint32_t>(i));
      }
      for (const std::uint32_t p : primes) {
        const u64 m = i * p;
        if (p > spf_[i] || m > n) break;
        spf_[m] = p;
      }
    }
  }
  u64 limit() const { return spf_.size() - 1; }
  u64 operator[](u64 n) const { return spf_[n]; }

 private:
  std::vector<std::uint32_t> spf_;
};

// ---------------------------------------------------------------------------
// Primality and factorization

inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (const u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic for all 64-bit n.
  for (const u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

struct PrimePower {
  u64 prime;
  unsigned exponent;
  bool operator==(const PrimePower&) const = default;
};

/// n = prod prime^exponent, primes strictly increasing.
struct Factorization {
  u64 value = 1;
  std::vector<PrimePower> factors;

  u64 radical() const {
    u64 r = 1;
    for (const auto& f : factors) r *= f.prime;
    return r;
  }
};

namespace detail {

// Brent's variant of Pollard rho; n composite, odd.
inline u64 rho_split(u64 n) {
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    constexpr u64 kBatch = 128;
    u64 r = 1;
    auto step = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = step(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(kBatch, r - k); ++i) {
          y = step(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += kBatch;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = step(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void split_large(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  const u64 d = rho_split(n);
  split_large(d, out);
  split_large(n / d, out);
}

inline const std::vector<std::uint32_t>& trial_primes() {
  static const std::vector<std::uint32_t> primes = small_primes_upto(1000000);
  return primes;
}

inline Factorization collect(u64 value, std::vector<u64> primes) {
  std::sort(primes.begin(), primes.end());
  Factorization f{value, {}};
  for (const u64 p : primes) {
    if (!f.factors.empty() && f.factors.back().prime == p) {
      ++f.factors.back().exponent;
    } else {
      f.factors.push_back({p, 1});
    }
  }
  return f;
}

}  // namespace detail

/// Trial division by primes below 10^6, then Miller-Rabin and Pollard rho.
inline Factorization factorize(u64 n) {
  if (n == 0) throw std::invalid_argument("factorize: input must be positive");
  std::vector<u64> primes;
  u64 m = n;
  for (const std::uint32_t p : detail::trial_primes()) {
    if (static_cast<u64>(p) * p > m) break;
    while (m % p == 0) {
      primes.push_back(p);
      m /= p;
    }
  }
  detail::split_large(m, primes);
  return detail::collect(n, std::move(primes));
}

/// Factorization through a smallest-prime-factor table; n <= spf.limit().
inline Factorization factorize(u64 n, const SpfTable& spf) {
  if (n == 0) throw std::invalid_argument("factorize: input must be positive");
  if (n > spf.limit()) return factorize(n);
  Factorization f{n, {}};
  while (n > 1) {
    const u64 p = spf[n];
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.factors.push_back({p, e});
  }
  return f;
}

inline u64 expand(const Factorization& f) {
  u64 v = 1;
  for (const auto& [p, e] : f.factors) {
    for (unsigned i = 0; i < e; ++i) v *= p;
  }
  return v;
}

struct MuPhi {
  int mu;
  u64 phi;
};

inline MuPhi mu_phi(const Factorization& f) {
  MuPhi r{1, 1};
  for (const auto& [p, e] : f.factors) {
    r.mu = e > 1 ? 0 : -r.mu;
    r.phi *= p - 1;
    for (unsigned i = 1; i < e; ++i) r.phi *= p;
  }
  return r;
}

/// n = squarefree * root^2 with squarefree squarefree.
struct SquarefreeParts {
  u64 squarefree;
  u64 root;
};

inline SquarefreeParts squarefree_decompose(u64 n) {
  if (n == 0) throw std::invalid_argument("squarefree_decompose: input must be positive");
  SquarefreeParts out{1, 1};
  for (const auto& [p, e] : factorize(n).factors) {
    if (e & 1) out.squarefree *= p;
    for (unsigned i = 0; i < e / 2; ++i) out.root *= p;
  }
  return out;
}

inline bool is_squarefree(const Factorization& f) {
  return std::all_of(f.factors.begin(), f.factors.end(),
                     [](const PrimePower& pp) { return pp.exponent == 1; });
}

/// All positive divisors, ascending.
inline std::vector<u64> divisors(const Factorization& f) {
  std::vector<u64> out{1};
  for (const auto& [p, e] : f.factors) {
    const std::size_t n = out.size();
    u64 pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// sigma_z(n) = sum_{m | n} m^z, evaluated multiplicatively.
inline double sigma_z(const Factorization& f, double z) {
  double total = 1.0;
  for (const auto& [p, e] : f.factors) {
    const double pz = std::pow(static_cast<double>(p), z);
    double local = 1.0, term = 1.0;
    for (unsigned k = 0; k < e; ++k) {
      term *= pz;
      local += term;
    }
    total *= local;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Reproducible summation

/// Pairwise summation with a fixed leaf size, so the result depends only on
/// the input order.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
  constexpr std::size_t kLeaf = 64;
  if (xs.size() <= kLeaf) {
    T s{};
    for (const T& x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace bqf
