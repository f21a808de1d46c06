#pragma once

// Census tables Q(X) = sum_{p <= X} H(1 - 4p) and the direct count of
// reduced forms in the fundamental domain.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bqf/arith.hpp"
#include "bqf/forms.hpp"
#include "bqf/parallel.hpp"

namespace bqf {

struct CensusRow {
  u64 p = 0;
  u64 H = 0;
  std::vector<ContentCount> breakdown;  ///< (content d, h((1-4p)/d^2)), ascending d

  u64 h_primitive() const {
    return !breakdown.empty() && breakdown.front().content == 1 ? breakdown.front().count : 0;
  }
  bool operator==(const CensusRow&) const = default;
};

/// Per-prime rows in prime order plus the running total.
struct CensusTable {
  std::vector<CensusRow> rows;
  u64 total = 0;

  bool operator==(const CensusTable&) const = default;

  /// Q(x) for x up to the last row.
  u64 total_upto(u64 x) const {
    u64 t = 0;
    for (const auto& r : rows) {
      if (r.p > x) break;
      t += r.H;
    }
    return t;
  }

  /// First prime whose row differs, if any.
  friend std::optional<u64> first_difference(const CensusTable& a, const CensusTable& b) {
    const std::size_t n = std::min(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!(a.rows[i] == b.rows[i])) return std::min(a.rows[i].p, b.rows[i].p);
    }
    if (a.rows.size() != b.rows.size()) {
      return a.rows.size() > n ? a.rows[n].p : b.rows[n].p;
    }
    return std::nullopt;
  }
};

inline void append_row(CensusTable& table, CensusRow row) {
  table.total += row.H;
  table.rows.push_back(std::move(row));
}

inline bool table_consistent(const CensusTable& t) {
  u64 sum = 0;
  u64 prev = 0;
  for (const auto& r : t.rows) {
    u64 h = 0;
    for (const auto& b : r.breakdown) h += b.count;
    if (h != r.H || r.p <= prev) return false;
    prev = r.p;
    sum += r.H;
  }
  return sum == t.total;
}

/// Fixed prime-range blocks (lo, hi] covering (0, x]; the partition does not
/// depend on the worker count.
inline std::vector<std::pair<u64, u64>> census_blocks(u64 x, u64 from = 0, u64 block = 1u << 16) {
  std::vector<std::pair<u64, u64>> out;
  for (u64 lo = from; lo < x; lo += block) out.emplace_back(lo, std::min(x, lo + block));
  return out;
}

namespace detail {

struct BlockCounts {
  u64 lo = 0, hi = 0;
  std::vector<std::uint32_t> H;             // index p - lo - 1
  std::vector<std::pair<u64, u64>> extra;   // (p, content) for content > 1
};

inline CensusTable merge_blocks(std::vector<BlockCounts>& blocks, const PrimeTable& is_prime) {
  CensusTable table;
  for (auto& blk : blocks) {
    std::sort(blk.extra.begin(), blk.extra.end());
    std::size_t e = 0;
    for (u64 p = blk.lo + 1; p <= blk.hi; ++p) {
      if (!is_prime(p)) continue;
      CensusRow row{p, blk.H[p - blk.lo - 1], {}};
      u64 imprimitive = 0;
      std::map<u64, u64> contents;
      while (e < blk.extra.size() && blk.extra[e].first == p) {
        ++contents[blk.extra[e].second];
        ++imprimitive;
        ++e;
      }
      if (row.H > imprimitive) row.breakdown.push_back({1, row.H - imprimitive});
      for (const auto& [d, n] : contents) row.breakdown.push_back({d, n});
      append_row(table, std::move(row));
    }
  }
  return table;
}

// Counts reduced forms (a, b, c) with 4ac - b^2 = 4p - 1 and p prime in (lo, hi].
inline BlockCounts sweep_fundamental_domain(u64 lo, u64 hi, const PrimeTable& is_prime) {
  BlockCounts out{lo, hi, std::vector<std::uint32_t>(hi - lo, 0), {}};
  if (hi < 2) return out;
  const auto a_max = static_cast<i64>(isqrt((4 * hi - 1) / 3));
  for (i64 a = 1; a <= a_max; ++a) {
    // b odd, |b| <= a, b = -a excluded by the boundary rule.
    const i64 b_first = (a & 1) ? -a + 2 : -a + 1;
    for (i64 b = b_first; b <= a; b += 2) {
      const i64 s = (b * b - 1) / 4;  // k(k+1) with b = 2k+1
      const i64 c_lo = std::max<i64>(a, (static_cast<i64>(lo) + 1 + s + a - 1) / a);
      const i64 c_hi = (static_cast<i64>(hi) + s) / a;
      for (i64 c = c_lo; c <= c_hi; ++c) {
        if (c == a && b < 0) continue;
        const u64 p = static_cast<u64>(a * c - s);
        if (!is_prime(p)) continue;
        ++out.H[p - lo - 1];
        const i64 g = std::gcd(std::gcd(a, b), c);
        if (g > 1) out.extra.emplace_back(p, static_cast<u64>(g));
      }
    }
  }
  return out;
}

}  // namespace detail

/// Q(X) by direct enumeration of the fundamental domain |b| <= a <= c,
/// 4ac - b^2 = 4p - 1 (boundary-normalized), one row per prime p <= x.
inline CensusTable census_enumeration(u64 x, unsigned workers = 1) {
  if (x < 2) return {};
  const PrimeTable is_prime(x);
  const auto blocks = census_blocks(x);
  auto counts = run_blocks(blocks.size(), workers, [&](std::size_t i) {
    return detail::sweep_fundamental_domain(blocks[i].first, blocks[i].second, is_prime);
  });
  return detail::merge_blocks(counts, is_prime);
}

/// Same count restricted to primes in (from, x]; used to extend a cached table.
inline CensusTable census_enumeration_range(u64 from, u64 x, unsigned workers = 1) {
  if (x < 2 || from >= x) return {};
  const PrimeTable is_prime(x);
  const auto blocks = census_blocks(x, from);
  auto counts = run_blocks(blocks.size(), workers, [&](std::size_t i) {
    return detail::sweep_fundamental_domain(blocks[i].first, blocks[i].second, is_prime);
  });
  return detail::merge_blocks(counts, is_prime);
}

/// Per-prime rows from enumerate_reduced(1 - 4p), one discriminant at a time.
/// Quadratic in x; the reference route for small x.
inline CensusTable census_per_discriminant(u64 x) {
  CensusTable table;
  if (x < 2) return table;
  for (const u64 p : sieve_primes(2, x).primes) {
    const auto cn = class_numbers(1 - 4 * static_cast<i64>(p));
    append_row(table, {p, cn.H, cn.breakdown});
  }
  return table;
}

}  // namespace bqf
