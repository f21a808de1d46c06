#include <gtest/gtest.h>

#include <random>

#include "bqf/discrepancy.hpp"

using namespace bqf;

namespace {

// O(N^2) scan over every candidate interval: all four closed/open variants,
// endpoints drawn from the points plus 0 and 1, counts by binary search.
double brute_discrepancy(std::vector<double> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<double> v = pts;
  v.push_back(0.0);
  v.push_back(1.0);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  const auto n = static_cast<double>(pts.size());
  const auto below = [&](double t) { return static_cast<double>(std::lower_bound(pts.begin(), pts.end(), t) - pts.begin()); };
  const auto upto = [&](double t) { return static_cast<double>(std::upper_bound(pts.begin(), pts.end(), t) - pts.begin()); };
  double best = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i; j < v.size(); ++j) {
      const double len = n * (v[j] - v[i]);
      const double closed = upto(v[j]) - below(v[i]);
      const double open = std::max(0.0, below(v[j]) - upto(v[i]));
      const double lo_open = upto(v[j]) - upto(v[i]);
      const double hi_open = below(v[j]) - below(v[i]);
      best = std::max({best, std::fabs(closed - len), std::fabs(open - len), std::fabs(lo_open - len),
                       std::fabs(hi_open - len)});
    }
  }
  return best;
}

}  // namespace

TEST(Discrepancy, SinglePointAtZero) {
  const auto r = discrepancy_exact(census_poly(2), 1);
  EXPECT_EQ(r.total_points, 1u);
  EXPECT_DOUBLE_EQ(r.sup_discrepancy, 1.0);
  EXPECT_EQ(r.alpha, 0.0);
  EXPECT_EQ(r.beta, 0.0);
  EXPECT_TRUE(r.excess);
}

TEST(Discrepancy, UniformMultisetIsAtMostOne) {
  for (const int k : {1, 2, 5, 64, 1000}) {
    std::vector<double> pts;
    for (int i = 0; i < k; ++i) pts.push_back(static_cast<double>(i) / k);
    EXPECT_LE(discrepancy_of_points(pts).sup_discrepancy, 1.0 + 1e-12) << k;
  }
}

TEST(Discrepancy, EmptyAndInvalid) {
  EXPECT_EQ(discrepancy_of_points({}).sup_discrepancy, 0.0);
  EXPECT_THROW(discrepancy_of_points({1.5}), std::invalid_argument);
  EXPECT_THROW(discrepancy_exact(census_poly(2), 0), std::invalid_argument);
}

TEST(Discrepancy, MatchesBruteForceOnRootPoints) {
  for (const u64 p : {2u, 3u, 17u}) {
    const RootTable table(census_poly(p), 200);
    for (u64 x = 1; x <= 200; x += (x < 20 ? 1 : 17)) {
      const auto pts = root_points(table, x);
      const auto r = discrepancy_exact(table, x);
      ASSERT_NEAR(r.sup_discrepancy, brute_discrepancy(pts), 1e-9) << p << " " << x;
      EXPECT_LE(r.sup_discrepancy, static_cast<double>(r.total_points));
    }
  }
}

TEST(Discrepancy, MatchesBruteForceAtOneThousand) {
  const RootTable table(census_poly(17), 1000);
  const auto pts = root_points(table, 1000);
  EXPECT_NEAR(discrepancy_exact(table, 1000).sup_discrepancy, brute_discrepancy(pts), 1e-9);
}

TEST(Discrepancy, MatchesBruteForceOnRandomMultisets) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> pts;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) pts.push_back(static_cast<double>(rng() % 9) / 8);  // many ties
    const auto r = discrepancy_of_points(pts);
    ASSERT_NEAR(r.sup_discrepancy, brute_discrepancy(pts), 1e-9);
  }
}

TEST(Discrepancy, ReportedIntervalAttainsSup) {
  const RootTable table(census_poly(5), 300);
  const auto pts = root_points(table, 300);
  const auto r = discrepancy_exact(table, 300);
  double count = 0;
  for (const double p : pts) {
    count += r.excess ? (r.alpha <= p && p <= r.beta) : (r.alpha < p && p < r.beta);
  }
  const double dev = count - static_cast<double>(pts.size()) * (r.beta - r.alpha);
  EXPECT_NEAR(std::fabs(dev), r.sup_discrepancy, 1e-9);
}

TEST(Discrepancy, SlopeOfPowerLaw) {
  const std::vector<double> xs = {10, 100, 1000}, ys = {3, 30, 300};
  EXPECT_NEAR(loglog_slope(xs, ys), 1.0, 1e-12);
  EXPECT_THROW(loglog_slope(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
}
