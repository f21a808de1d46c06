#pragma once

// Constants and main terms: Artin's constant, c(d), the odd-prime products,
// Li(X), the sqrt(t)/log t integral and the predicted sizes of Q(X), Q_d, T_d.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bqf/arith.hpp"
#include "bqf/interval.hpp"
#include "bqf/rational.hpp"

namespace bqf {

/// c(d) = d^-3 prod_{l | d} (l^3 - 1)/(l^3 - l^2 - l - 1) for odd d, 0 for even d.
inline Rational c_of_d(u64 d) {
  if (d == 0) throw std::invalid_argument("c_of_d: d must be positive");
  if ((d & 1) == 0) return Rational(0);
  const i128 d3 = static_cast<i128>(d) * d * d;
  Rational r(1, d3);
  for (const auto& [l, e] : factorize(d).factors) {
    const i128 l3 = static_cast<i128>(l) * l * l;
    r *= Rational(l3 - 1, l3 - static_cast<i128>(l) * l - l - 1);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Euler products over primes

namespace detail {

inline WideInterval one_minus(const WideInterval& x) { return WideInterval::exact(1) - x; }

// 1 - 1/(l(l-1))
inline WideInterval artin_factor(u64 l) {
  const WideInterval ll = WideInterval::exact(static_cast<long double>(l));
  return one_minus(WideInterval::exact(1) / (ll * (ll - WideInterval::exact(1))));
}

// (l^3 - l^2 - l - 1)/(l^3 - l^2) = 1 - (l + 1)/(l^2 (l - 1))
inline WideInterval p_factor(u64 l) {
  const WideInterval ll = WideInterval::exact(static_cast<long double>(l));
  const WideInterval one = WideInterval::exact(1);
  return one_minus((ll + one) / (ll * ll * (ll - one)));
}

// 1 + 1/(l^3 - l^2 - l - 1)
inline WideInterval csum_factor(u64 l) {
  const WideInterval ll = WideInterval::exact(static_cast<long double>(l));
  const WideInterval one = WideInterval::exact(1);
  return one + one / (ll * ll * ll - ll * ll - ll - one);
}

// Smallest tabulated cutoff whose tail keeps the enclosure width under target.
inline u64 cutoff_for(double target, const TailMajorant& tail, double magnitude, u64 budget) {
  if (!(target > 0)) throw std::invalid_argument("target width must be positive");
  u64 p = 10000;
  while (2.0 * magnitude * std::expm1(tail.beyond(p)) * 1.05 > target) {
    if (p > budget) {
      throw std::runtime_error("budget exceeded: width " + std::to_string(target) + " needs primes beyond " +
                               std::to_string(budget));
    }
    p = p + p / 2;
  }
  return p;
}

// Products are cached by (kind, cutoff); cutoffs are deterministic in the target.
template <typename Factor>
IntervalValue cached_product(const std::string& kind, Factor factor, u64 cutoff, const TailMajorant& tail,
                             u64 min_prime) {
  static std::mutex mutex;
  static std::map<std::pair<std::string, u64>, IntervalValue> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({kind, cutoff}); it != cache.end()) return it->second;
  }
  const auto value = euler_product(factor, cutoff, tail, {min_prime, 64});
  std::lock_guard lock(mutex);
  cache.emplace(std::make_pair(kind, cutoff), value);
  return value;
}

}  // namespace detail

/// Largest prime cutoff the constant routines will sieve to.
inline constexpr u64 kProductBudget = 400'000'000;

/// C_Art = prod_l (1 - 1/(l(l-1))), enclosed with width below target.
inline IntervalValue artin_constant(double target = 1e-9) {
  if (target < 1e-12) throw std::invalid_argument("artin_constant: target width below 1e-12");
  const auto tail = prime_tail_majorant(1.1, 2.0);
  const u64 cutoff = detail::cutoff_for(target, tail, 0.38, kProductBudget);
  return detail::cached_product("artin", detail::artin_factor, cutoff, tail, 2);
}

/// prod_{l odd} (1 - 1/(l^2 - l)).
inline IntervalValue odd_artin_product(double target = 1e-9) {
  if (target < 1e-12) throw std::invalid_argument("odd_artin_product: target width below 1e-12");
  const auto tail = prime_tail_majorant(1.1, 2.0);
  const u64 cutoff = detail::cutoff_for(target, tail, 0.75, kProductBudget);
  return detail::cached_product("odd_artin", detail::artin_factor, cutoff, tail, 3);
}

/// prod_{l odd} (l^3 - l^2 - l - 1)/(l^3 - l^2).
inline IntervalValue p_product(double target = 1e-9) {
  const auto tail = prime_tail_majorant(1.1, 2.0);
  const u64 cutoff = detail::cutoff_for(target, tail, 0.6, kProductBudget);
  return detail::cached_product("p", detail::p_factor, cutoff, tail, 3);
}

/// prod_{l odd} (l^3 - l^2 - l)/(l^3 - l^2 - l - 1), the closed form of sum_d c(d).
inline IntervalValue csum_product(double target = 1e-9) {
  const auto tail = prime_tail_majorant(1.001, 3.0);
  const u64 cutoff = detail::cutoff_for(target, tail, 1.2, kProductBudget);
  return detail::cached_product("csum", detail::csum_factor, cutoff, tail, 3);
}

/// (l^3 - l^2 - l - 1)/(l^3 - l^2) at a single prime.
inline double p_factor_value(u64 l) { return detail::p_factor(l).mid(); }

// ---------------------------------------------------------------------------
// Quadrature

struct Quadrature {
  double value = 0;
  double error = 0;  ///< accumulated |S2 - S1| / 15 over accepted panels
};

namespace detail {

template <typename F>
void simpson_panel(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth, long double& sum, long double& err) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    sum += left + right + delta / 15.0;
    err += std::fabs(delta) / 15.0;
    return;
  }
  simpson_panel(f, a, m, fa, flm, fm, left, tol / 2, depth - 1, sum, err);
  simpson_panel(f, m, b, fm, frm, fb, right, tol / 2, depth - 1, sum, err);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction; tol is absolute.
template <typename F>
Quadrature adaptive_simpson(const F& f, double a, double b, double tol) {
  if (b < a) throw std::invalid_argument("adaptive_simpson: b < a");
  if (a == b) return {};
  // Pre-split into panels so the recursion depth stays modest on long ranges.
  const int panels = std::max(1, static_cast<int>(std::ceil(std::log2(b / std::max(a, 1.0)) * 4)));
  long double sum = 0, err = 0;
  double lo = a;
  const double ratio = std::pow(b / a, 1.0 / panels);
  for (int i = 0; i < panels; ++i) {
    const double hi = i + 1 == panels ? b : lo * ratio;
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    detail::simpson_panel(f, lo, hi, fa, fm, fb, whole, tol / panels, 48, sum, err);
    lo = hi;
  }
  return {static_cast<double>(sum), static_cast<double>(err)};
}

/// Li(x) = integral_2^x dt / log t.
inline Quadrature li(double x, double rel_tol = 1e-10) {
  if (x < 2) throw std::invalid_argument("li: x must be >= 2");
  const double scale = x / std::log(x);
  return adaptive_simpson([](double t) { return 1.0 / std::log(t); }, 2.0, x, rel_tol * scale);
}

/// integral_a^b sqrt(t) / log t dt (a >= 2).
inline Quadrature sqrtlog_integral(double a, double b, double rel_tol = 1e-10) {
  if (a < 2 || b < a) throw std::invalid_argument("sqrtlog_integral: need 2 <= a <= b");
  const double scale = std::max(1.0, (b - a) * std::sqrt(b) / std::log(b));
  return adaptive_simpson([](double t) { return std::sqrt(t) / std::log(t); }, a, b, rel_tol * scale);
}

inline Quadrature sqrtlog_integral(double x) { return sqrtlog_integral(2.0, x); }

/// integral_2^x sqrt(t) / (log t)^2 dt.
inline Quadrature sqrtlog2_integral(double x, double rel_tol = 1e-10) {
  if (x < 2) throw std::invalid_argument("sqrtlog2_integral: x must be >= 2");
  const double scale = std::max(1.0, x * std::sqrt(x) / std::pow(std::log(x), 2));
  return adaptive_simpson([](double t) { return std::sqrt(t) / (std::log(t) * std::log(t)); }, 2.0, x,
                          rel_tol * scale);
}

/// Integration by parts: the residual
///   J(x) - [2 x^{3/2} / (3 log x) + (2/3) integral_2^x sqrt(t)/(log t)^2 dt]
/// equals this boundary term exactly.
inline double ibp_boundary_term() { return -2.0 * std::pow(2.0, 1.5) / (3.0 * std::numbers::ln2); }

// ---------------------------------------------------------------------------
// Main terms

struct ContentMainTerm {
  u64 d = 0;
  Rational c;
  double t_main = 0;          ///< (pi^2/12) d c(d) P X / log X
  double q_main_simple = 0;   ///< (pi/9) c(d) P X^{3/2} / log X
  double q_main_integral = 0; ///< (pi/6) c(d) P integral_2^X sqrt(t)/log t
};

struct MainTermBundle {
  u64 x = 0;
  IntervalValue c_art;
  IntervalValue p_prod;
  double sqrtlog = 0;
  double quadrature_error = 0;
  double mt_simple = 0;    ///< C_Art (2 pi / 9) X^{3/2} / log X
  double mt_integral = 0;  ///< C_Art (pi / 3) integral_2^X sqrt(t)/log t
  std::vector<ContentMainTerm> per_d;
};

inline double mt_simple_value(double c_art, double x) {
  return c_art * (2.0 * std::numbers::pi / 9.0) * std::pow(x, 1.5) / std::log(x);
}

inline double mt_integral_value(double c_art, double sqrtlog) { return c_art * (std::numbers::pi / 3.0) * sqrtlog; }

inline ContentMainTerm content_main_term(u64 d, double x, double sqrtlog, double p_prod) {
  ContentMainTerm t{d, c_of_d(d)};
  const double c = t.c.to_double();
  const double lx = std::log(x);
  t.t_main = std::numbers::pi * std::numbers::pi / 12.0 * static_cast<double>(d) * c * p_prod * x / lx;
  t.q_main_simple = std::numbers::pi / 9.0 * c * p_prod * std::pow(x, 1.5) / lx;
  t.q_main_integral = std::numbers::pi / 6.0 * c * p_prod * sqrtlog;
  return t;
}

/// Predictions at X; per-d terms for odd d <= d_max.
inline MainTermBundle main_terms(u64 x, u64 d_max = 15) {
  if (x < 10) throw std::invalid_argument("main_terms: X must be >= 10");
  MainTermBundle b;
  b.x = x;
  b.c_art = artin_constant(1e-8);
  b.p_prod = p_product(1e-8);
  const auto q = sqrtlog_integral(static_cast<double>(x));
  b.sqrtlog = q.value;
  b.quadrature_error = q.error;
  b.mt_simple = mt_simple_value(b.c_art.mid(), static_cast<double>(x));
  b.mt_integral = mt_integral_value(b.c_art.mid(), q.value);
  for (u64 d = 1; d <= d_max; d += 2) b.per_d.push_back(content_main_term(d, static_cast<double>(x), q.value, b.p_prod.mid()));
  return b;
}

// ---------------------------------------------------------------------------
// Constant identities

struct ConstantCheck {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double gap = 0;
  double allowed = 0;  ///< certified tail plus interval widths
  double tolerance = 0;
  bool pass = false;
};

struct ConstantReport {
  IntervalValue c_art;
  IntervalValue two_c_art;
  IntervalValue odd_artin;
  IntervalValue p_prod;
  IntervalValue csum_closed;
  double mu_sum = 0;
  double mu_tail = 0;
  double c_sum = 0;
  double c_tail = 0;
  u64 truncation = 0;
  std::vector<ConstantCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return !checks.empty();
  }
};

/// Sum over m > z of 1/(m phi(m)), using phi(m) > m / (e^gamma loglog m + 2.50637 / loglog m).
inline double mu_phi_tail(double z) {
  if (z < 100) throw std::invalid_argument("mu_phi_tail: z must be >= 100");
  const double eg = std::exp(std::numbers::egamma);
  const double ll = std::log(std::log(z));
  return eg * (ll / z + 1.0 / (z * std::log(z))) + 2.50637 / (ll * z);
}

/// Sum over odd d > z of c(d), using c(d) <= (2/sqrt 3) d^{-5/2}.
inline double c_tail(double z) { return 2.0 / std::sqrt(3.0) * (2.0 / 3.0) * std::pow(z, -1.5); }

struct TruncatedSums {
  double mu_sum = 0;  ///< sum_{m <= z, m odd} mu(m) / (m phi(m))
  double c_sum = 0;   ///< sum_{d <= z} c(d)
};

inline TruncatedSums truncated_sums(u64 z) {
  const SpfTable spf(z);
  std::vector<long double> mu_terms, c_terms;
  mu_terms.reserve(z / 2 + 1);
  c_terms.reserve(z / 2 + 1);
  for (u64 m = 1; m <= z; m += 2) {
    long double c = 1.0L / (static_cast<long double>(m) * m * m);
    int mu = 1;
    long double phi = 1;
    u64 n = m;
    while (n > 1) {
      const u64 l = spf[n];
      unsigned e = 0;
      while (n % l == 0) {
        n /= l;
        ++e;
      }
      const long double l3 = static_cast<long double>(l) * l * l;
      c *= (l3 - 1) / (l3 - static_cast<long double>(l) * l - l - 1);
      mu = e > 1 ? 0 : -mu;
      phi *= l - 1;
      for (unsigned i = 1; i < e; ++i) phi *= l;
    }
    if (mu != 0) mu_terms.push_back(mu / (static_cast<long double>(m) * phi));
    c_terms.push_back(c);
  }
  return {static_cast<double>(pairwise_sum<long double>(mu_terms)),
          static_cast<double>(pairwise_sum<long double>(c_terms))};
}

inline ConstantCheck make_check(std::string name, double lhs, double rhs, double allowed, double tolerance) {
  ConstantCheck c{std::move(name), lhs, rhs, std::fabs(lhs - rhs), allowed, tolerance, false};
  c.pass = c.gap <= allowed && c.gap < tolerance;
  return c;
}

/// Every identity between the constants, checked against certified tails.
inline ConstantReport constant_suite(u64 truncation = 1'000'000, double width = 5e-9) {
  ConstantReport r;
  r.truncation = truncation;
  r.c_art = artin_constant(width / 2);
  r.two_c_art = IntervalValue::exact(2) * r.c_art;
  r.odd_artin = odd_artin_product(width);
  r.p_prod = p_product(width);
  r.csum_closed = csum_product(width);
  const auto sums = truncated_sums(truncation);
  r.mu_sum = sums.mu_sum;
  r.c_sum = sums.c_sum;
  r.mu_tail = mu_phi_tail(static_cast<double>(truncation));
  r.c_tail = c_tail(static_cast<double>(truncation));
  const double rounding = 1e-12;

  {
    ConstantCheck c{"two_c_art_vs_odd_product", r.two_c_art.mid(), r.odd_artin.mid(),
                    std::fabs(r.two_c_art.mid() - r.odd_artin.mid()),
                    r.two_c_art.width() + r.odd_artin.width(), 1e-8, false};
    c.pass = r.two_c_art.intersects(r.odd_artin) && r.two_c_art.width() < 1e-8 && r.odd_artin.width() < 1e-8;
    r.checks.push_back(c);
  }
  r.checks.push_back(make_check("mu_phi_sum_vs_two_c_art", r.mu_sum, r.two_c_art.mid(),
                                r.mu_tail + r.two_c_art.width() + rounding, 1e-4));
  r.checks.push_back(make_check("c_sum_vs_product", r.c_sum, r.csum_closed.mid(),
                                r.c_tail + r.csum_closed.width() + rounding, 1e-4));
  {
    const auto lhs = IntervalValue::pi() / IntervalValue::exact(9) * r.odd_artin;
    const auto rhs = IntervalValue::exact(2) * IntervalValue::pi() / IntervalValue::exact(9) * r.c_art;
    ConstantCheck c{"collapse_pi_over_9", lhs.mid(), rhs.mid(), std::fabs(lhs.mid() - rhs.mid()),
                    lhs.width() + rhs.width(), 1e-8, false};
    c.pass = lhs.intersects(rhs);
    r.checks.push_back(c);
  }
  {
    // sum_d c(d) * prod P collapses to 2 C_Art.
    const auto lhs = r.csum_closed * r.p_prod;
    ConstantCheck c{"c_sum_times_p_product", lhs.mid(), r.two_c_art.mid(), std::fabs(lhs.mid() - r.two_c_art.mid()),
                    lhs.width() + r.two_c_art.width(), 1e-8, false};
    c.pass = lhs.intersects(r.two_c_art);
    r.checks.push_back(c);
  }
  return r;
}

inline void write_constants_csv(std::ostream& os, const ConstantReport& r) {
  os << "check,lhs,rhs,gap,allowed,tolerance,pass\n";
  os.precision(17);
  for (const auto& c : r.checks) {
    os << c.name << ',' << c.lhs << ',' << c.rhs << ',' << c.gap << ',' << c.allowed << ',' << c.tolerance << ','
       << (c.pass ? "PASS" : "FAIL") << '\n';
  }
}

inline void write_constants_text(std::ostream& os, const ConstantReport& r) {
  os.precision(15);
  os << "C_Art                    " << r.c_art << '\n'
     << "2 C_Art                  " << r.two_c_art << '\n'
     << "prod odd (1-1/(l^2-l))   " << r.odd_artin << '\n'
     << "prod odd P_l             " << r.p_prod << '\n'
     << "prod odd sum_k c(l^k)    " << r.csum_closed << '\n'
     << "sum mu/(m phi), m<=" << r.truncation << "  " << r.mu_sum << "  (tail <= " << r.mu_tail << ")\n"
     << "sum c(d), d<=" << r.truncation << "        " << r.c_sum << "  (tail <= " << r.c_tail << ")\n";
  for (const auto& c : r.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << "  gap " << c.gap << "  allowed " << c.allowed << '\n';
  }
}

inline void write_main_terms_csv(std::ostream& os, const MainTermBundle& b) {
  os.precision(17);
  os << "X,mt_simple,mt_integral,sqrtlog_integral,quadrature_error\n"
     << b.x << ',' << b.mt_simple << ',' << b.mt_integral << ',' << b.sqrtlog << ',' << b.quadrature_error << '\n';
  os << "d,c_d,t_main,q_main_simple,q_main_integral\n";
  for (const auto& t : b.per_d) {
    os << t.d << ',' << t.c.str() << ',' << t.t_main << ',' << t.q_main_simple << ',' << t.q_main_integral << '\n';
  }
}

}  // namespace bqf
