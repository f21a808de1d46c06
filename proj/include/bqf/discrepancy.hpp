#pragma once

// Exact discrepancy of the points v/n, f(v) = 0 (mod n), n <= X.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "bqf/congruence.hpp"

namespace bqf {

struct DiscrepancyReport {
  u64 x = 0;
  u64 total_points = 0;
  double sup_discrepancy = 0;
  double alpha = 0;  ///< argmax interval; for the deficit side the interval is open
  double beta = 0;
  bool excess = true;  ///< true when the sup is an excess count over [alpha, beta]
};

/// Exact sup over 0 <= alpha <= beta <= 1 of |#{x in [alpha, beta]} - (beta - alpha) N|.
///
/// With F(v) = #{x <= v}, F-(v) = #{x < v} and G = F - N v, the excess side is
/// max over v_i <= v_j of G(v_j) - G-(v_i), and the deficit side (open
/// intervals, reached as limits) is max over v_i < v_j of G(v_i) - G-(v_j);
/// v ranges over the sample values together with 0 and 1.
inline DiscrepancyReport discrepancy_of_points(std::vector<double> points) {
  for (const double p : points) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("discrepancy: point outside [0, 1]");
  }
  std::sort(points.begin(), points.end());
  const auto n = static_cast<double>(points.size());
  std::vector<double> v;
  std::vector<double> le, lt;  // F(v), F-(v)
  v.reserve(points.size() + 2);
  const auto push = [&](double value, std::size_t below, std::size_t upto) {
    v.push_back(value);
    lt.push_back(static_cast<double>(below));
    le.push_back(static_cast<double>(upto));
  };
  std::size_t i = 0;
  if (points.empty() || points.front() > 0.0) push(0.0, 0, 0);
  while (i < points.size()) {
    std::size_t j = i;
    while (j < points.size() && points[j] == points[i]) ++j;
    push(points[i], i, j);
    i = j;
  }
  if (v.back() < 1.0) push(1.0, points.size(), points.size());

  DiscrepancyReport out;
  out.total_points = points.size();
  const auto value = [&](std::size_t a, std::size_t b, bool excess) {
    return excess ? (le[b] - lt[a]) - n * (v[b] - v[a]) : n * (v[b] - v[a]) - (lt[b] - le[a]);
  };
  std::size_t best_a = 0, best_b = 0;
  bool best_excess = true;
  double best = value(0, 0, true);
  // Excess: running minimum of G-(v_i) over i <= j.
  std::size_t arg_min = 0;
  double min_gm = lt[0] - n * v[0];
  // Deficit: running maximum of G(v_i) over i < j.
  std::size_t arg_max = 0;
  double max_g = le[0] - n * v[0];
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double gm = lt[j] - n * v[j];
    if (gm < min_gm) {
      min_gm = gm;
      arg_min = j;
    }
    if (j > 0) {
      const double def = value(arg_max, j, false);
      if (def > best) {
        best = def;
        best_a = arg_max;
        best_b = j;
        best_excess = false;
      }
    }
    const double exc = value(arg_min, j, true);
    if (exc > best || (exc == best && !best_excess)) {
      best = exc;
      best_a = arg_min;
      best_b = j;
      best_excess = true;
    }
    const double g = le[j] - n * v[j];
    if (g > max_g) {
      max_g = g;
      arg_max = j;
    }
  }
  out.sup_discrepancy = std::max(0.0, best);
  out.alpha = v[best_a];
  out.beta = v[best_b];
  out.excess = best_excess;
  return out;
}

/// The multiset {v/n : n <= x, v in RootSet(n)}.
inline std::vector<double> root_points(const RootTable& table, u64 x) {
  if (x > table.limit()) throw std::invalid_argument("root_points: x beyond table");
  std::vector<double> pts;
  for (u64 n = 1; n <= x; ++n) {
    for (const auto r : table.view(n)) pts.push_back(static_cast<double>(r) / static_cast<double>(n));
  }
  return pts;
}

inline DiscrepancyReport discrepancy_exact(const RootTable& table, u64 x) {
  if (x < 1) throw std::invalid_argument("discrepancy_exact: X must be >= 1");
  auto rep = discrepancy_of_points(root_points(table, x));
  rep.x = x;
  return rep;
}

inline DiscrepancyReport discrepancy_exact(const QuadraticPoly& f, u64 x) {
  if (x < 1) throw std::invalid_argument("discrepancy_exact: X must be >= 1");
  return discrepancy_exact(RootTable(f, x), x);
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0 && ys[i] > 0)) throw std::invalid_argument("loglog_slope: values must be positive");
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace bqf
