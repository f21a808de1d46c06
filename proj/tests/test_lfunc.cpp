#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "bqf/asymptotics.hpp"
#include "bqf/census.hpp"
#include "bqf/forms.hpp"
#include "bqf/lfunc.hpp"

using namespace bqf;

namespace {

// sum_{n <= N} (D|n)/n, Kahan-compensated long double.
long double direct_series(i64 d, u64 n) {
  long double s = 0, comp = 0;
  for (u64 k = 1; k <= n; ++k) {
    const long double term = static_cast<long double>(kronecker(d, k)) / k - comp;
    const long double t = s + term;
    comp = (t - s) - term;
    s = t;
  }
  return s;
}

i64 random_discriminant(std::mt19937_64& rng, i64 lo) {
  for (;;) {
    const i64 d = -7 - static_cast<i64>(rng() % static_cast<u64>(-lo - 6));
    const i64 r = ((d % 4) + 4) % 4;
    if (r == 0 || r == 1) return d;
  }
}

}  // namespace

TEST(LOne, MinusSevenConvergesToPiOverRootSeven) {
  const double target = std::numbers::pi / std::sqrt(7.0);
  double prev_width = 1e9;
  for (const u64 n : {1000u, 100000u, 10000000u}) {
    const auto l = l_one_truncated(-7, n);
    EXPECT_TRUE(l.enclosure().contains(target)) << n;
    EXPECT_LT(l.enclosure().width(), prev_width);
    prev_width = l.enclosure().width();
  }
  EXPECT_NEAR(static_cast<double>(direct_series(-7, 10000000)), target, 1e-5);
  EXPECT_EQ(h_from_formula(-7), 1u);
}

TEST(LOne, MinusThree) {
  const auto l = l_one_truncated(-3, 1000000);
  EXPECT_TRUE(l.enclosure().contains(0.6045997880780726));
  EXPECT_TRUE(l.enclosure().contains(static_cast<double>(direct_series(-3, 1000000))));
}

TEST(LOne, MatchesDirectSummation) {
  // Both the short direct path and the closed-form path against an independent sum.
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    const i64 d = random_discriminant(rng, -3000);
    const CharacterTable chi(d);
    for (const u64 n : {static_cast<u64>(-d) * 3 + 5, static_cast<u64>(-d) * 40 + 17}) {
      const auto l = chi.truncated(n);
      EXPECT_NEAR(l.value, static_cast<double>(direct_series(d, n)), l.rounding_radius + 1e-13) << d << " " << n;
    }
  }
}

TEST(LOne, PolyaVinogradovConstantHoldsEmpirically) {
  // |L - S(N)| <= tail_radius(N) on 1000 random discriminants and N.
  std::mt19937_64 rng(23);
  for (int t = 0; t < 1000; ++t) {
    const i64 d = random_discriminant(rng, -5000);
    const CharacterTable chi(d);
    const u64 q = static_cast<u64>(-d);
    EXPECT_LE(static_cast<double>(chi.max_partial_sum()), polya_vinogradov_bound(q));
    const u64 n = 1 + rng() % (3 * q);
    const double gap = std::fabs(chi.l_value() - static_cast<double>(direct_series(d, n)));
    ASSERT_LE(gap, chi.tail_radius(n) + chi.l_rounding()) << d << " " << n;
  }
}

TEST(LOne, EnclosuresAtNAndTenNOverlap) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    const i64 d = random_discriminant(rng, -100000);
    const CharacterTable chi(d);
    const u64 n = 1000 + rng() % 100000;
    const auto a = chi.truncated(n), b = chi.truncated(10 * n);
    ASSERT_TRUE(a.enclosure().intersects(b.enclosure())) << d << " " << n;
    EXPECT_LE(b.tail_radius, a.tail_radius);
    EXPECT_TRUE(a.enclosure().contains(chi.l_value()));
  }
}

TEST(ClassNumberFormula, Examples) {
  EXPECT_EQ(h_from_formula(-7), 1u);
  EXPECT_EQ(h_from_formula(-23), 3u);
  EXPECT_EQ(h_from_formula(-163), 1u);
  EXPECT_EQ(h_from_formula(-27), 1u);
  EXPECT_THROW(h_from_formula(-4), std::invalid_argument);
  EXPECT_THROW(h_from_formula(-3), std::invalid_argument);
  EXPECT_EQ(class_number(-3), 1u);
  EXPECT_EQ(class_number(-4), 1u);
}

TEST(ClassNumberFormula, MatchesEnumerationOnRandomDiscriminants) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 200; ++t) {
    const i64 d = random_discriminant(rng, -100000);
    ASSERT_EQ(h_from_formula(d), class_number_enumerated(d)) << d;
  }
}

TEST(ClassNumberFormula, MatchesEnumerationExhaustively) {
  const SpfTable spf(2000);
  for (i64 d = -7; d >= -4000; --d) {
    const i64 r = ((d % 4) + 4) % 4;
    if (r != 0 && r != 1) continue;
    ASSERT_EQ(h_from_formula(d, &spf), class_number_enumerated(d)) << d;
  }
}

TEST(ClassNumberCensus, Examples) {
  EXPECT_EQ(census_classnumber(1).total, 0u);
  EXPECT_EQ(census_classnumber(10).total, 5u);
  const auto seven = census_classnumber(7);
  ASSERT_EQ(seven.rows.back().p, 7u);
  EXPECT_EQ(seven.rows.back().H, 2u);
  EXPECT_EQ(seven.rows.back().breakdown, (std::vector<ContentCount>{{1, 1}, {3, 1}}));
}

TEST(ClassNumberCensus, MatchesEnumeration) {
  EXPECT_EQ(census_classnumber(20000), census_enumeration(20000));
  EXPECT_EQ(census_classnumber(20000, 3), census_classnumber(20000, 1));
  const std::vector<u64> ps = {99991, 99989, 99971};
  const auto part = census_classnumber_primes(ps);
  for (const auto& row : part.rows) {
    const auto cn = class_numbers(1 - 4 * static_cast<i64>(row.p));
    EXPECT_EQ(row.H, cn.H);
    EXPECT_EQ(row.breakdown, cn.breakdown);
  }
}

TEST(TdQd, Examples) {
  const auto t1 = t_d_exact(1, 10);
  EXPECT_EQ(t1.terms, 4u);
  long double oracle = 0;
  for (const i64 d : {-7, -11, -19, -27}) oracle += direct_series(d, 2000000);
  // direct series tail at N = 2e6 is below 1e-4 for these moduli
  EXPECT_NEAR(t1.value, static_cast<double>(oracle), 1e-4);
  EXPECT_LT(t1.radius, 1e-7);

  const auto t3 = t_d_exact(3, 10);
  EXPECT_EQ(t3.terms, 1u);
  EXPECT_NEAR(t3.value, std::numbers::pi / (3 * std::sqrt(3.0)), 1e-8);
  EXPECT_EQ(t_d_exact(5, 10).terms, 0u);
  EXPECT_EQ(t_d_exact(5, 10).value, 0.0);
  EXPECT_THROW(t_d_exact(2, 10), std::invalid_argument);

  EXPECT_EQ(q_d_exact(1, 10).exact, 4u);
  EXPECT_EQ(q_d_exact(3, 10).exact, 1u);
  EXPECT_EQ(q_d_exact(2, 10).exact, 0u);
  EXPECT_EQ(q_d_exact(2, 100000).exact, 0u);
}

TEST(TdQd, PartialSummationReproducesExact) {
  for (const u64 x : {10u, 1000u, 5000u}) {
    for (const u64 d : {1u, 3u, 5u}) {
      const auto q = q_d_exact(d, x);
      EXPECT_NEAR(q.from_t, static_cast<double>(q.exact), q.radius + 1e-6) << d << " " << x;
    }
  }
}

TEST(TdQd, ContentSumsToCensusTotal) {
  for (const u64 x : {10u, 1000u, 20000u}) {
    u64 total = 0;
    for (u64 d = 1; d * d <= 4 * x; d += 2) total += q_d_exact(d, x).exact;
    EXPECT_EQ(total, census_enumeration(x).total) << x;
  }
}

TEST(ACoeff, Examples) {
  for (const u64 d : {1u, 3u, 5u, 9u, 15u}) EXPECT_EQ(a_coeff(1, d), Rational(1));
  EXPECT_EQ(a_coeff(2, 1), Rational(-1));
  EXPECT_EQ(a_coeff(3, 1), Rational(-1, 2));
  EXPECT_EQ(a_coeff(9, 1), Rational(1, 2));
  EXPECT_EQ(a_coeff(3, 3), Rational(0));
  EXPECT_THROW(a_coeff(3, 2), std::invalid_argument);
}

TEST(ACoeff, ResidueMatchesEulerUpTo500) {
  for (const u64 d : {1u, 3u, 5u, 9u, 15u}) {
    for (u64 n = 1; n <= 500; ++n) ASSERT_EQ(a_coeff_residue(n, d), a_coeff_euler(n, d)) << n << " " << d;
  }
}

TEST(ACoeff, MultiplicativeOnCoprimePairs) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 1500; ++t) {
    const u64 m = 1 + rng() % 200, n = 1 + rng() % 200;
    const u64 d = (t & 1) ? 1 : 3;
    if (std::gcd(m, n) != 1) continue;
    ASSERT_EQ(a_coeff_residue(m * n, d), a_coeff_residue(m, d) * a_coeff_residue(n, d)) << m << " " << n;
  }
}

TEST(FdValue, ClosedFormAgreesWithContentConstant) {
  // f_d(1) = (1/2) zeta(2) d^3 c(d) prod_{l | d} (l - 1)/l * prod_{l odd} P_l.
  const auto f1 = f_d_value(1);
  const double zeta2 = std::numbers::pi * std::numbers::pi / 6;
  const auto p = p_product();
  EXPECT_NEAR(f1.mid(), 0.5 * zeta2 * p.mid(), f1.radius() + p.width());
  for (const u64 d : {3u, 5u, 9u, 15u, 21u}) {
    double local = 1;
    for (const auto& [l, e] : factorize(d).factors) local *= static_cast<double>(l - 1) / static_cast<double>(l);
    const double expected = f1.mid() * std::pow(static_cast<double>(d), 3) * c_of_d(d).to_double() * local;
    EXPECT_NEAR(f_d_value(d).mid(), expected, 1e-8) << d;
  }
}

TEST(FdValue, PositiveAndMatchesCoefficientSum) {
  for (u64 d = 1; d <= 45; d += 2) EXPECT_GT(f_d_value(d).lo(), 0.0) << d;
  for (const u64 d : {1u, 3u, 15u}) {
    const auto sum = f_d_coefficient_sum(d, 100000);
    const auto v = f_d_value(d);
    EXPECT_LE(std::fabs(sum.value - v.mid()), sum.tail + v.width()) << d;
  }
  // independent product for f_1: (pi^2/12) prod_{3 <= l <= 1e6} (l^3 - l^2 - l - 1)/(l^3 - l^2)
  long double prod = std::numbers::pi_v<long double> * std::numbers::pi_v<long double> / 12;
  for_each_prime(3, 1000000, [&](u64 l) {
    const long double x = static_cast<long double>(l);
    prod *= (x * x * x - x * x - x - 1) / (x * x * x - x * x);
  });
  EXPECT_NEAR(f_d_value(1).mid(), static_cast<double>(prod), 1e-6);
}

TEST(CharacterSums, SiegelWalfiszSmallModuli) {
  for (const u64 m : {3u, 5u, 7u, 15u}) {
    const auto r = prime_character_sum(m, 1000000);
    EXPECT_LT(r.deviation, 0.05 * r.li) << m;
  }
  EXPECT_EQ(real_primitive_character(3, 2), -1);
  EXPECT_EQ(real_primitive_character(5, 2), -1);
  EXPECT_EQ(real_primitive_character(5, 4), 1);
  EXPECT_THROW(prime_character_sum(9, 100), std::invalid_argument);
}
