#include <gtest/gtest.h>

#include <random>

#include "bqf/arith.hpp"
#include "bqf/rational.hpp"

using namespace bqf;

namespace {

bool is_prime_naive(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// Legendre symbol by listing the squares mod p.
int legendre_by_squares(i64 a, u64 p) {
  const u64 r = mod_floor(a, p);
  if (r == 0) return 0;
  for (u64 x = 1; x < p; ++x) {
    if (x * x % p == r) return 1;
  }
  return -1;
}

// Kronecker symbol straight from its definition.
int kronecker_naive(i64 d, u64 n) {
  if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
  int r = 1;
  u64 m = n;
  for (u64 p = 2; p <= m; ++p) {
    while (m % p == 0) {
      m /= p;
      if (p == 2) {
        if (d % 2 == 0) return 0;
        const i64 d8 = ((d % 8) + 8) % 8;
        r *= (d8 == 1 || d8 == 7) ? 1 : -1;
      } else {
        r *= legendre_by_squares(d, p);
      }
      if (r == 0) return 0;
    }
  }
  return r;
}

}  // namespace

TEST(Kronecker, KnownValues) {
  EXPECT_EQ(kronecker(-7, 1), 1);
  EXPECT_EQ(kronecker(-7, 7), 0);
  EXPECT_EQ(kronecker(-7, 11), 1);
}

TEST(Kronecker, OneMinusFourPAtTwo) {
  for (u64 p = 3; p < 1000; ++p) {
    if (!is_prime_naive(p)) continue;
    EXPECT_EQ(kronecker(1 - 4 * static_cast<i64>(p), 2), -1) << p;
  }
}

TEST(Kronecker, MatchesDefinition) {
  for (i64 d = -200; d <= 200; ++d) {
    for (u64 n = 0; n <= 120; ++n) ASSERT_EQ(kronecker(d, n), kronecker_naive(d, n)) << d << " " << n;
  }
}

TEST(Kronecker, LegendreForOddPrimes) {
  for (u64 p = 3; p < 1000; p += 2) {
    if (!is_prime_naive(p)) continue;
    for (i64 a = -30; a <= 30; ++a) ASSERT_EQ(kronecker(a, p), legendre_by_squares(a, p)) << a << " " << p;
  }
}

TEST(Kronecker, CompletelyMultiplicative) {
  for (i64 d = -200; d <= 200; ++d) {
    for (u64 m = 1; m <= 200; ++m) {
      const int km = kronecker(d, m);
      for (u64 n = 1; n <= 200; ++n) ASSERT_EQ(kronecker(d, m * n), km * kronecker(d, n)) << d << " " << m << " " << n;
    }
  }
}

TEST(Kronecker, ZeroIffCommonFactor) {
  for (i64 d = -100; d <= 100; ++d) {
    for (u64 n = 1; n <= 100; ++n) {
      const u64 ad = static_cast<u64>(d < 0 ? -d : d);
      EXPECT_EQ(kronecker(d, n) == 0, std::gcd(ad, n) != 1) << d << " " << n;
    }
  }
}

TEST(Sieve, Examples) {
  EXPECT_EQ(sieve_primes(1, 10).primes, (std::vector<u64>{2, 3, 5, 7}));
  EXPECT_EQ(sieve_primes(1, 100).primes.size(), 25u);
  EXPECT_EQ(sieve_primes(90, 100).primes, (std::vector<u64>{97}));
  EXPECT_TRUE(sieve_primes(0, 1).primes.empty());
  EXPECT_EQ(sieve_primes(2, 2).primes, (std::vector<u64>{2}));
}

TEST(Sieve, MatchesTrialDivision) {
  const auto r = sieve_primes(0, 200000);
  std::vector<u64> naive;
  for (u64 n = 0; n <= 200000; ++n) {
    if (is_prime_naive(n)) naive.push_back(n);
  }
  EXPECT_EQ(r.primes, naive);
  EXPECT_EQ(sieve_primes(0, 1000000).primes.size(), 78498u);
}

TEST(Sieve, SegmentBoundaries) {
  // Windows straddling the 2^18 segment size.
  const u64 seg = 1u << 18;
  for (const u64 lo : {seg - 50, 2 * seg - 7, 3 * seg + 1}) {
    std::vector<u64> naive;
    for (u64 n = lo; n <= lo + 300; ++n) {
      if (is_prime_naive(n)) naive.push_back(n);
    }
    EXPECT_EQ(sieve_primes(lo, lo + 300).primes, naive);
  }
}

TEST(Tables, PrimeAndSpf) {
  const PrimeTable pt(10000);
  const SpfTable spf(10000);
  for (u64 n = 0; n <= 10000; ++n) {
    EXPECT_EQ(pt(n), is_prime_naive(n));
    if (n >= 2) {
      u64 d = 2;
      while (n % d != 0) ++d;
      EXPECT_EQ(spf[n], d);
    }
  }
}

TEST(Factorize, Examples) {
  EXPECT_TRUE(factorize(1).factors.empty());
  EXPECT_EQ(factorize(360).factors, (std::vector<PrimePower>{{2, 3}, {3, 2}, {5, 1}}));
  EXPECT_EQ(factorize(10403).factors, (std::vector<PrimePower>{{101, 1}, {103, 1}}));
  EXPECT_THROW(factorize(0), std::invalid_argument);
}

TEST(Factorize, RandomProductsRoundTrip) {
  std::mt19937_64 rng(12345);
  const auto primes = sieve_primes(2, 5000).primes;
  const std::vector<u64> big = {1000003, 998244353, 4294967291ull, 1000000007};
  for (int trial = 0; trial < 2000; ++trial) {
    u128 prod = 1;
    std::vector<u64> parts;
    for (int k = 0; k < 12; ++k) {
      const u64 p = (trial % 3 == 0 && k < 2) ? big[rng() % big.size()] : primes[rng() % primes.size()];
      if (prod * p > (u128{1} << 63) - 1) break;
      prod *= p;
      parts.push_back(p);
    }
    const auto n = static_cast<u64>(prod);
    const auto f = factorize(n);
    EXPECT_EQ(f.value, n);
    EXPECT_EQ(expand(f), n);
    u64 prev = 0;
    for (const auto& [p, e] : f.factors) {
      EXPECT_GT(p, prev);
      EXPECT_TRUE(is_prime_u64(p));
      EXPECT_GE(e, 1u);
      prev = p;
    }
    std::sort(parts.begin(), parts.end());
    std::vector<u64> flat;
    for (const auto& [p, e] : f.factors) flat.insert(flat.end(), e, p);
    EXPECT_EQ(flat, parts);
  }
}

TEST(Factorize, LargeSemiprimes) {
  const u64 a = 4294967291ull, b = 4294967279ull;  // both prime
  const auto f = factorize(a * b);
  EXPECT_EQ(f.factors, (std::vector<PrimePower>{{b, 1}, {a, 1}}));
  const u64 p = 9223372036854775783ull;  // largest prime below 2^63
  EXPECT_EQ(factorize(p).factors, (std::vector<PrimePower>{{p, 1}}));
}

TEST(Factorize, SpfOverloadAgrees) {
  const SpfTable spf(100000);
  for (u64 n = 1; n <= 100000; n += 7) EXPECT_EQ(factorize(n, spf).factors, factorize(n).factors);
}

TEST(MuPhi, Examples) {
  EXPECT_EQ(mu_phi(factorize(1)).mu, 1);
  EXPECT_EQ(mu_phi(factorize(1)).phi, 1u);
  EXPECT_EQ(mu_phi(factorize(12)).mu, 0);
  EXPECT_EQ(mu_phi(factorize(12)).phi, 4u);
  EXPECT_EQ(mu_phi(factorize(15)).mu, 1);
  EXPECT_EQ(mu_phi(factorize(15)).phi, 8u);
}

TEST(MuPhi, PhiCountsUnits) {
  for (u64 n = 1; n <= 500; ++n) {
    u64 units = 0;
    for (u64 k = 1; k <= n; ++k) units += std::gcd(k, n) == 1;
    EXPECT_EQ(mu_phi(factorize(n)).phi, units) << n;
  }
}

TEST(Squarefree, Examples) {
  const auto a = squarefree_decompose(1), b = squarefree_decompose(12), c = squarefree_decompose(51);
  EXPECT_EQ(a.squarefree, 1u);
  EXPECT_EQ(a.root, 1u);
  EXPECT_EQ(b.squarefree, 3u);
  EXPECT_EQ(b.root, 2u);
  EXPECT_EQ(c.squarefree, 51u);
  EXPECT_EQ(c.root, 1u);
}

TEST(Squarefree, DecomposesEverythingToOneMillion) {
  const SpfTable spf(1000000);
  for (u64 n = 1; n <= 1000000; ++n) {
    const auto parts = squarefree_decompose(n);
    ASSERT_EQ(parts.squarefree * parts.root * parts.root, n);
    // squarefree: no prime squared divides it
    u64 s = parts.squarefree;
    while (s > 1) {
      const u64 p = spf[s];
      s /= p;
      ASSERT_NE(s % p, 0u) << n;
    }
  }
}

TEST(Sigma, Examples) {
  EXPECT_DOUBLE_EQ(sigma_z(factorize(1), 0.7), 1.0);
  EXPECT_DOUBLE_EQ(sigma_z(factorize(12), 0.0), 6.0);
  EXPECT_NEAR(sigma_z(factorize(4), -0.5), 1.0 + 1.0 / std::sqrt(2.0) + 0.5, 1e-15);
}

TEST(Sigma, MatchesDivisorSumAndMultiplicative) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 2000; ++t) {
    const u64 m = 1 + rng() % 5000, n = 1 + rng() % 5000;
    const double z = -1.0 + static_cast<double>(rng() % 300) / 100.0;
    double direct = 0;
    for (const u64 dv : divisors(factorize(m))) direct += std::pow(static_cast<double>(dv), z);
    EXPECT_NEAR(sigma_z(factorize(m), z), direct, 1e-12 * direct);
    if (std::gcd(m, n) != 1) continue;
    const double lhs = sigma_z(factorize(m * n), z);
    const double rhs = sigma_z(factorize(m), z) * sigma_z(factorize(n), z);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::fabs(rhs));
  }
}

TEST(Modular, InverseAndPow) {
  for (u64 m = 2; m < 300; ++m) {
    for (u64 a = 1; a < m; ++a) {
      if (std::gcd(a, m) != 1) continue;
      EXPECT_EQ(mulmod(a, invmod(a, m), m), 1u % m);
    }
  }
  EXPECT_EQ(powmod(3, 1000000006, 1000000007), 1u);
  EXPECT_EQ(isqrt(0), 0u);
  EXPECT_EQ(isqrt(99), 9u);
  EXPECT_EQ(isqrt(100), 10u);
  EXPECT_EQ(isqrt(~u64{0}), 4294967295u);
}

TEST(Rational, Arithmetic) {
  const Rational a(1, 3), b(-1, 6);
  EXPECT_EQ(a + b, Rational(1, 6));
  EXPECT_EQ(a * b, Rational(-1, 18));
  EXPECT_EQ(a / b, Rational(-2));
  EXPECT_EQ(Rational(4, -8).str(), "-1/2");
  EXPECT_LT(b, a);
  EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(PairwiseSum, FixedShape) {
  std::vector<double> xs(10000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / static_cast<double>(i + 1);
  const double s = pairwise_sum<double>(xs);
  EXPECT_NEAR(s, 9.787606036044382, 1e-12);
  EXPECT_EQ(s, pairwise_sum<double>(xs));
}
