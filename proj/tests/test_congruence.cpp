#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "bqf/census.hpp"
#include "bqf/congruence.hpp"

using namespace bqf;

namespace {

std::vector<u64> brute_roots(const QuadraticPoly& f, u64 n) {
  std::vector<u64> out;
  for (u64 v = 0; v < n; ++v) {
    const i128 val = static_cast<i128>(f.A) * v * v + static_cast<i128>(f.B) * v + f.C;
    if (val % static_cast<i128>(n) == 0) out.push_back(v);
  }
  return out;
}

const QuadraticPoly kF2 = census_poly(2);

}  // namespace

TEST(Poly, Irreducibility) {
  EXPECT_TRUE(kF2.irreducible());
  EXPECT_EQ(static_cast<i64>(kF2.disc()), -7);
  EXPECT_FALSE((QuadraticPoly{1, 0, -1}).irreducible());
  EXPECT_FALSE((QuadraticPoly{1, 2, 1}).irreducible());
  EXPECT_TRUE((QuadraticPoly{1, 0, -2}).irreducible());
  EXPECT_FALSE((QuadraticPoly{0, 1, 1}).irreducible());
}

TEST(RootsModN, Examples) {
  EXPECT_EQ(roots_mod_n(kF2, 1).roots, (std::vector<u64>{0}));
  EXPECT_EQ(roots_mod_n(kF2, 7).roots, (std::vector<u64>{3}));
  EXPECT_EQ(roots_mod_n(kF2, 11).roots, (std::vector<u64>{4, 6}));
  EXPECT_TRUE(roots_mod_n(kF2, 49).roots.empty());
  EXPECT_THROW(roots_mod_n(kF2, 0), std::invalid_argument);
}

TEST(RootsModN, MatchesBruteForce) {
  for (const u64 p : {2u, 3u, 5u, 7u, 11u, 17u}) {
    const auto f = census_poly(p);
    const RootTable table(f, 10000);
    for (u64 n = 1; n <= 10000; ++n) {
      const auto brute = brute_roots(f, n);
      ASSERT_EQ(roots_mod_n(f, n).roots, brute) << p << " " << n;
      ASSERT_EQ(table.get(n), brute) << p << " " << n;
    }
  }
}

TEST(RootsModN, OtherPolynomialsAndPrimePowers) {
  const std::vector<QuadraticPoly> polys = {{1, 0, 1}, {2, 3, 5}, {3, 0, -2}, {1, 1, 41}, {4, 4, 5}};
  for (const auto& f : polys) {
    for (u64 n = 1; n <= 3000; ++n) ASSERT_EQ(roots_mod_n(f, n).roots, brute_roots(f, n)) << f.str() << " " << n;
    for (const u64 q : {1024u, 2187u, 3125u, 2401u, 14641u, 28561u}) {
      ASSERT_EQ(roots_mod_n(f, q).roots, brute_roots(f, q)) << f.str() << " " << q;
    }
  }
}

TEST(RootsModN, LargePrimeModulus) {
  // Tonelli-Shanks path: check each root directly.
  for (const u64 l : {1000003u, 998244353u, 1000000007u}) {
    const auto rs = roots_mod_n(census_poly(17), l);
    for (const u64 v : rs.roots) EXPECT_EQ(census_poly(17).eval_mod(v, l), 0u);
    EXPECT_EQ(rs.roots.size(), static_cast<std::size_t>(1 + kronecker(-67, l)));
  }
}

TEST(RootsModN, CrtMultiplicativity) {
  std::mt19937_64 rng(5);
  const auto f = census_poly(17);
  for (int t = 0; t < 3000; ++t) {
    const u64 m = 1 + rng() % 3000, n = 1 + rng() % 3000;
    if (std::gcd(m, n) != 1) continue;
    EXPECT_EQ(roots_mod_n(f, m * n).roots.size(), roots_mod_n(f, m).roots.size() * roots_mod_n(f, n).roots.size());
  }
}

TEST(Jacobi, Examples) {
  EXPECT_EQ(count_roots_jacobi(7, -7), 1u);
  EXPECT_EQ(count_roots_jacobi(11, -7), 2u);
  EXPECT_EQ(count_roots_jacobi(15, -7), 0u);
  EXPECT_THROW(count_roots_jacobi(49, -7), std::invalid_argument);
  EXPECT_THROW(count_roots_jacobi(4, -7), std::invalid_argument);
  EXPECT_THROW(count_roots_jacobi(7, -8), std::invalid_argument);
}

TEST(Jacobi, IdentityOnSquarefreeOddModuli) {
  for (const u64 p : sieve_primes(2, 100).primes) {
    const auto f = census_poly(p);
    const RootTable table(f, 10000);
    for (u64 a = 1; a <= 10000; a += 2) {
      if (!is_squarefree(factorize(a))) continue;
      ASSERT_EQ(count_roots_jacobi(a, 1 - 4 * static_cast<i64>(p)), table.count(a)) << p << " " << a;
    }
  }
}

TEST(Jacobi, FailsOffSquarefreeDomain) {
  // The divisor sum gives 1 at a = 49, D = -7 but there are no roots.
  i64 sum = 0;
  for (const u64 m : {1u, 7u, 49u}) sum += kronecker(-7, m);
  EXPECT_EQ(sum, 1);
  EXPECT_TRUE(roots_mod_n(kF2, 49).roots.empty());
}

TEST(Window, Examples) {
  EXPECT_EQ(s_f_window(kF2, 11, 0, 1), 2u);
  EXPECT_EQ(s_f_window(kF2, 11, 0, 0.5), 1u);
  EXPECT_EQ(s_f_window(kF2, 49, 0, 1), 0u);
  EXPECT_EQ(s_f_window(kF2, 11, 4.0 / 11, 4.0 / 11), 1u);
  EXPECT_THROW(s_f_window(kF2, 11, 0.6, 0.5), std::invalid_argument);
  EXPECT_THROW(s_f_window(kF2, 11, -0.1, 0.5), std::invalid_argument);
}

TEST(Rho, Examples) {
  const auto z = rho_h(kF2, 7, 1);
  EXPECT_NEAR(z.real(), std::cos(6 * std::numbers::pi / 7), 1e-14);
  EXPECT_NEAR(z.imag(), std::sin(6 * std::numbers::pi / 7), 1e-14);
  EXPECT_EQ(rho_h(kF2, 1, 5), std::complex<double>(1, 0));
  for (u64 n = 1; n <= 2000; ++n) {
    const auto r0 = rho_h(kF2, n, 0);
    ASSERT_NEAR(r0.real(), static_cast<double>(roots_mod_n(kF2, n).roots.size()), 1e-12);
    ASSERT_EQ(r0.imag(), 0.0);
  }
}

TEST(Weyl, Examples) {
  const auto one = weyl_partial_sum(kF2, 3, 1);
  EXPECT_EQ(one.value, std::complex<double>(1, 0));
  EXPECT_FALSE(one.bound_ratio.has_value());

  const RootTable table(kF2, 1000);
  const auto w0 = weyl_partial_sum(table, 0, 1000);
  EXPECT_EQ(w0.value.real(), static_cast<double>(table.total()));
  EXPECT_FALSE(w0.bound_ratio.has_value());
}

TEST(Weyl, MatchesDirectSummation) {
  // Independent oracle: brute-force roots and long double exponentials.
  for (const i64 h : {1, -2, 7}) {
    long double re = 0, im = 0;
    for (u64 n = 1; n <= 1000; ++n) {
      for (const u64 v : brute_roots(kF2, n)) {
        const long double ang = 2 * std::numbers::pi_v<long double> * static_cast<long double>(h) * v / n;
        re += std::cos(ang);
        im += std::sin(ang);
      }
    }
    const auto w = weyl_partial_sum(kF2, h, 1000);
    EXPECT_NEAR(w.value.real(), static_cast<double>(re), 1e-9);
    EXPECT_NEAR(w.value.imag(), static_cast<double>(im), 1e-9);
    ASSERT_TRUE(w.bound_ratio.has_value());
    EXPECT_TRUE(std::isfinite(*w.bound_ratio));
    EXPECT_GT(*w.bound_ratio, 0.0);
  }
}

TEST(DivisorCensus, Examples) {
  EXPECT_EQ(census_divisor(1).total, 0u);
  EXPECT_EQ(census_divisor(2).total, 1u);
  EXPECT_EQ(census_divisor(10).total, 5u);
}

TEST(DivisorCensus, MatchesEnumeration) {
  for (const u64 x : {3u, 100u, 5000u, 100000u}) EXPECT_EQ(census_divisor(x), census_enumeration(x)) << x;
  EXPECT_EQ(census_divisor(100000, 4), census_divisor(100000, 1));
}

TEST(DivisorCensus, PrimeSubset) {
  const auto full = census_enumeration(20000);
  std::vector<u64> ps;
  for (const auto& r : full.rows) {
    if (r.p > 15000) ps.push_back(r.p);
  }
  const auto part = census_divisor_primes(ps);
  ASSERT_EQ(part.rows.size(), ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(part.rows[i], full.rows[full.rows.size() - ps.size() + i]);
}
