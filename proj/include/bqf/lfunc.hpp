#pragma once

// L(1, chi_D) with explicit truncation radii, class numbers from the class
// number formula, the T_d / Q_d sums and the coefficients a_{n,d}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/polygamma.hpp>

#include "bqf/arith.hpp"
#include "bqf/asymptotics.hpp"
#include "bqf/census.hpp"
#include "bqf/forms.hpp"
#include "bqf/interval.hpp"
#include "bqf/parallel.hpp"
#include "bqf/rational.hpp"

namespace bqf {

/// Polya-Vinogradov constant: |sum_{n > N} chi(n)/n| <= 2 M / (N + 1) with
/// M = max |partial sum| <= sqrt(4|D|) log(4|D|).
inline constexpr double kPolyaVinogradovConstant = 2.0;

struct TruncatedL {
  i64 D = 0;
  u64 terms_used = 0;
  double value = 0;             ///< sum_{n <= N} (D|n)/n
  double tail_radius = 0;       ///< C_PV sqrt(4|D|) log(4|D|) / N
  double rounding_radius = 0;   ///< floating-point error in value

  double radius() const { return tail_radius + rounding_radius; }
  IntervalValue enclosure() const { return IntervalValue(value - radius(), value + radius()).inflate(0); }
};

inline double polya_vinogradov_bound(u64 q) {
  const double f = 4.0 * static_cast<double>(q);
  return std::sqrt(f) * std::log(f);
}

/// chi_D(n) = (D|n) for a negative discriminant D, tabulated on half a period.
///
/// chi_D is odd and periodic mod q = |D|, so every truncated sum at N = K q
/// splits into the exact value
///   L(1, chi) = (pi/q) sum_{r < q/2} chi(r) cot(pi r / q)
/// and a closed-form remainder in polygamma values at K + 1/2.
class CharacterTable {
 public:
  explicit CharacterTable(i64 d, const SpfTable* spf = nullptr) : d_(d) {
    require_negative_discriminant(d);
    q_ = static_cast<u64>(-d);
    const u64 half = q_ / 2;
    std::unique_ptr<SpfTable> local;
    if (spf == nullptr || spf->limit() < half) {
      local = std::make_unique<SpfTable>(std::max<u64>(half, 2));
      spf = local.get();
    }
    chi_.assign(half + 1, 0);
    if (half >= 1) chi_[1] = 1;
    for (u64 r = 2; r <= half; ++r) {
      const u64 l = (*spf)[r];
      chi_[r] = static_cast<std::int8_t>(l == r ? kronecker(d, r) : chi_[l] * chi_[r / l]);
    }
    // Partial sums are symmetric about the half period.
    i64 s = 0;
    long double cot_sum = 0, cot_abs = 0;
    long double m[4] = {0, 0, 0, 0};
    const long double qd = static_cast<long double>(q_);
    for (u64 r = 1; r <= half; ++r) {
      const int c = chi_[r];
      s += c;
      max_partial_ = std::max<u64>(max_partial_, static_cast<u64>(s < 0 ? -s : s));
      if (c == 0) continue;
      const double cot = 1.0 / std::tan(std::numbers::pi * (static_cast<double>(r) / static_cast<double>(q_)));
      cot_sum += c * static_cast<long double>(cot);
      cot_abs += std::fabs(cot);
      const long double t = static_cast<long double>(r) / qd - 0.5L;
      const long double t2 = t * t;
      long double p = c * t;
      for (auto& mk : m) {
        mk += p;
        p *= t2;
      }
    }
    if (static_cast<double>(max_partial_) > polya_vinogradov_bound(q_)) {
      throw std::runtime_error("character sum bound violated for D = " + std::to_string(d));
    }
    for (int k = 0; k < 4; ++k) moments_[k] = m[k];
    const double scale = std::numbers::pi / static_cast<double>(q_);
    l_exact_ = static_cast<double>(scale * cot_sum);
    // cot within 4 ulp per term, long double accumulation, final scaling.
    l_rounding_ = scale * (static_cast<double>(cot_abs) * 1e-15 + static_cast<double>(half) * 1e-18) +
                  std::fabs(l_exact_) * 1e-15;
  }

  i64 discriminant() const { return d_; }
  u64 modulus() const { return q_; }
  u64 max_partial_sum() const { return max_partial_; }
  double l_value() const { return l_exact_; }
  double l_rounding() const { return l_rounding_; }

  int operator()(u64 n) const {
    const u64 r = n % q_;
    if (r == 0) return q_ == 1 ? 1 : 0;
    return r < chi_.size() ? chi_[r] : -chi_[q_ - r];
  }

  double tail_radius(u64 n) const {
    return kPolyaVinogradovConstant * polya_vinogradov_bound(q_) / static_cast<double>(n);
  }

  /// sum_{n <= N} chi(n)/n with its tail and rounding radii.
  TruncatedL truncated(u64 n) const {
    if (n < 1) throw std::invalid_argument("truncated L: N must be >= 1");
    TruncatedL out{d_, n, 0, tail_radius(n), 0};
    const u64 k = n / q_;
    if (k < kClosedFormPeriods) {
      std::vector<long double> terms(n);
      for (u64 i = 1; i <= n; ++i) terms[i - 1] = static_cast<long double>((*this)(i)) / static_cast<long double>(i);
      out.value = static_cast<double>(pairwise_sum<long double>(terms));
      out.rounding_radius = (std::log(static_cast<double>(n)) + 1.0) * 1e-17 * 4.0 + std::fabs(out.value) * 2e-16;
      return out;
    }
    const double y = static_cast<double>(k) + 0.5;
    const double psi[4] = {boost::math::polygamma(1, y), boost::math::polygamma(3, y), boost::math::polygamma(5, y),
                           boost::math::polygamma(7, y)};
    const long double u = 2.0L * (psi[0] * moments_[0] + psi[1] * moments_[1] / 6.0L +
                                  psi[2] * moments_[2] / 120.0L + psi[3] * moments_[3] / 5040.0L);
    const long double qd = static_cast<long double>(q_);
    long double extra = 0;
    const u64 s = n - k * q_;
    const long double base = static_cast<long double>(k) * qd;
    for (u64 r = 1; r <= s; ++r) extra += (*this)(r) / (base + static_cast<long double>(r));
    out.value = static_cast<double>(static_cast<long double>(l_exact_) + u / qd + extra);
    const double kd = static_cast<double>(k);
    const double taylor = (1.0 / (9.0 * std::pow(kd, 9)) + 1.0 / std::pow(kd, 10)) / 512.0;
    out.rounding_radius = l_rounding_ + taylor + static_cast<double>(std::fabs(u / qd)) * 1e-13 +
                          static_cast<double>(s) * 1e-18 / static_cast<double>(base) + std::fabs(out.value) * 2e-16;
    return out;
  }

  static constexpr u64 kClosedFormPeriods = 16;

 private:
  i64 d_;
  u64 q_ = 0;
  std::vector<std::int8_t> chi_;
  u64 max_partial_ = 0;
  long double moments_[4] = {0, 0, 0, 0};
  double l_exact_ = 0;
  double l_rounding_ = 0;
};

inline TruncatedL l_one_truncated(i64 d, u64 n) { return CharacterTable(d).truncated(n); }

struct FormulaClassNumber {
  u64 h = 0;
  TruncatedL l;
  IntervalValue h_enclosure;
};

/// Largest number of periods h_from_formula will try.
inline constexpr u64 kFormulaPeriodBudget = u64{1} << 24;

/// h(D) = sqrt|D| L(1, chi_D) / pi, doubling N until the enclosure is narrower
/// than 1/2 and rounding to the integer inside.
inline FormulaClassNumber h_from_formula_detail(const CharacterTable& chi, u64 period_budget = kFormulaPeriodBudget) {
  const i64 d = chi.discriminant();
  if (d >= -4) throw std::invalid_argument("h_from_formula: needs D < -4, got " + std::to_string(d));
  const u64 q = chi.modulus();
  const IntervalValue scale = sqrt(IntervalValue::exact(static_cast<double>(q))) / IntervalValue::pi();
  for (u64 k = CharacterTable::kClosedFormPeriods; k <= period_budget; k *= 2) {
    const auto l = chi.truncated(k * q);
    const IntervalValue hv = scale * l.enclosure();
    if (hv.width() >= 0.5) continue;
    const double h = std::round(hv.mid());
    if (!hv.contains(h) || h < 1) {
      throw std::runtime_error("h_from_formula: no integer in enclosure for D = " + std::to_string(d));
    }
    return {static_cast<u64>(h), l, hv};
  }
  throw std::runtime_error("h_from_formula: N budget exceeded for D = " + std::to_string(d));
}

inline u64 h_from_formula(i64 d, const SpfTable* spf = nullptr) {
  if (d >= -4) throw std::invalid_argument("h_from_formula: needs D < -4, got " + std::to_string(d));
  return h_from_formula_detail(CharacterTable(d, spf)).h;
}

/// h(D) by the formula when D < -4, by enumeration otherwise.
inline u64 class_number(i64 d, const SpfTable* spf = nullptr) {
  return d < -4 ? h_from_formula(d, spf) : class_number_enumerated(d);
}

/// Odd d with d^2 | n (n odd), ascending.
inline std::vector<u64> square_divisor_roots(const Factorization& f) {
  Factorization half{1, {}};
  for (const auto& [l, e] : f.factors) {
    if (e >= 2) {
      half.factors.push_back({l, e / 2});
      for (unsigned i = 0; i < e / 2; ++i) half.value *= l;
    }
  }
  return divisors(half);
}

namespace detail {

inline CensusRow classnumber_row(u64 p, const SpfTable& spf) {
  const u64 n = 4 * p - 1;
  const auto f = n <= spf.limit() ? factorize(n, spf) : factorize(n);
  CensusRow row{p, 0, {}};
  for (const u64 d : square_divisor_roots(f)) {
    const i64 disc = -static_cast<i64>(n / (d * d));
    const u64 h = class_number(disc, &spf);
    row.H += h;
    row.breakdown.push_back({d, h});
  }
  return row;
}

}  // namespace detail

/// Q(X) with H(1 - 4p) = sum over odd d, d^2 | 4p - 1, of h((1 - 4p)/d^2).
inline CensusTable census_classnumber(u64 x, unsigned workers = 1) {
  if (x < 2) return {};
  const SpfTable spf(4 * x);
  const auto blocks = census_blocks(x);
  auto parts = run_blocks(blocks.size(), workers, [&](std::size_t i) {
    std::vector<CensusRow> rows;
    for_each_prime(blocks[i].first + 1, blocks[i].second,
                   [&](u64 p) { rows.push_back(detail::classnumber_row(p, spf)); });
    return rows;
  });
  CensusTable table;
  for (auto& part : parts) {
    for (auto& row : part) append_row(table, std::move(row));
  }
  return table;
}

/// Class-number rows for an explicit ascending list of primes.
inline CensusTable census_classnumber_primes(std::span<const u64> primes, unsigned workers = 1) {
  u64 pmax = 2;
  for (const u64 p : primes) pmax = std::max(pmax, p);
  const SpfTable spf(4 * pmax);
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (primes.size() + kChunk - 1) / kChunk;
  auto parts = run_blocks(chunks, workers, [&](std::size_t i) {
    std::vector<CensusRow> rows;
    for (std::size_t j = i * kChunk; j < std::min(primes.size(), (i + 1) * kChunk); ++j) {
      rows.push_back(detail::classnumber_row(primes[j], spf));
    }
    return rows;
  });
  CensusTable table;
  for (auto& part : parts) {
    for (auto& row : part) append_row(table, std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// T_d and Q_d

struct LTableRow {
  u64 p = 0;
  u64 d = 0;
  i64 D = 0;  ///< (1 - 4p) / d^2
  TruncatedL l;
  u64 h = 0;
};

/// Radius target for the L-values summed into T_d.
inline constexpr double kTdRadius = 1e-9;

inline TruncatedL l_one_enclosure(const CharacterTable& chi, double radius = kTdRadius) {
  const u64 q = chi.modulus();
  const double n_needed = kPolyaVinogradovConstant * polya_vinogradov_bound(q) / radius;
  const u64 k = std::max<u64>(CharacterTable::kClosedFormPeriods,
                              static_cast<u64>(std::ceil(n_needed / static_cast<double>(q))));
  return chi.truncated(k * q);
}

/// One row per (p, d) with p <= x and d^2 | 4p - 1; d = 0 selects every d.
inline std::vector<LTableRow> l_table(u64 x, u64 d_only = 0) {
  std::vector<LTableRow> rows;
  if (x < 2) return rows;
  const SpfTable spf(4 * x);
  for_each_prime(2, x, [&](u64 p) {
    for (const u64 d : square_divisor_roots(factorize(4 * p - 1, spf))) {
      if (d_only != 0 && d != d_only) continue;
      const i64 disc = (1 - 4 * static_cast<i64>(p)) / static_cast<i64>(d * d);
      const CharacterTable chi(disc, &spf);
      rows.push_back({p, d, disc, l_one_enclosure(chi), disc < -4 ? h_from_formula_detail(chi).h
                                                                  : class_number_enumerated(disc)});
    }
  });
  return rows;
}

struct TdValue {
  double value = 0;
  double radius = 0;
  u64 terms = 0;
};

/// T_d(x) = sum_{p <= x, d^2 | 1 - 4p} L(1, chi_{(1-4p)/d^2}).
inline TdValue t_d_exact(u64 d, u64 x) {
  if ((d & 1) == 0) throw std::invalid_argument("t_d_exact: d must be odd");
  TdValue out;
  std::vector<double> mids;
  for (const auto& row : l_table(x, d)) {
    mids.push_back(row.l.value);
    out.radius += row.l.radius();
    ++out.terms;
  }
  out.value = pairwise_sum<double>(mids);
  out.radius += static_cast<double>(mids.size()) * std::fabs(out.value) * 1e-16;
  return out;
}

struct QdValue {
  u64 exact = 0;        ///< sum of h((1 - 4p)/d^2)
  double from_t = 0;    ///< partial summation from T_d
  double radius = 0;
};

/// Q_d(x), with the partial-summation reconstruction
///   Q_d = (1/(pi d)) [sqrt(4x - 1) T_d(x) + sum_{t < x} (sqrt(4t - 1) - sqrt(4t + 3)) T_d(t)].
/// sqrt|D| L / pi counts forms with weight 2/w, so D = -3 (p = (3d^2 + 1)/4)
/// contributes 1/3 there; the missing 2/3 is added back.
inline QdValue q_d_exact(u64 d, u64 x) {
  QdValue out;
  if ((d & 1) == 0 || x < 2) return out;
  const auto rows = l_table(x, d);
  std::vector<long double> terms;
  long double t = 0, t_radius = 0;
  std::size_t next = 0;
  long double unit_fix = 0;
  for (const auto& row : rows) {
    if (row.D == -3) unit_fix += 2.0L / 3;
  }
  for (u64 s = 1; s < x; ++s) {
    while (next < rows.size() && rows[next].p == s) {
      t += rows[next].l.value;
      t_radius += rows[next].l.radius();
      out.exact += rows[next].h;
      ++next;
    }
    const long double w = std::sqrt(4.0L * s - 1) - std::sqrt(4.0L * s + 3);
    terms.push_back(w * t);
  }
  while (next < rows.size()) {
    t += rows[next].l.value;
    t_radius += rows[next].l.radius();
    out.exact += rows[next].h;
    ++next;
  }
  const long double head = std::sqrt(4.0L * x - 1) * t;
  const long double scale = 1.0L / (std::numbers::pi_v<long double> * d);
  out.from_t = static_cast<double>(scale * (head + pairwise_sum<long double>(terms)) + unit_fix);
  // Each L radius enters with weight sqrt(4p - 1) / (pi d) <= sqrt(4x) / (pi d).
  out.radius = static_cast<double>(scale * std::sqrt(4.0L * x) * t_radius) + std::fabs(out.from_t) * 1e-12;
  return out;
}

// ---------------------------------------------------------------------------
// a_{n,d}

/// Average of ((1 - 4r)/d^2 | n) over residues r mod d^2 n coprime to d^2 n
/// with d^2 | 1 - 4r.
inline Rational a_coeff_residue(u64 n, u64 d) {
  if (n < 1 || d < 1 || (d & 1) == 0) throw std::invalid_argument("a_coeff: need n >= 1 and odd d >= 1");
  const u64 d2 = d * d;
  const u64 m = d2 * n;
  const u64 r0 = d2 == 1 ? 0 : invmod(4 % d2, d2);
  i64 sum = 0;
  i64 count = 0;
  for (u64 j = 0; j < n; ++j) {
    const u64 r = r0 + d2 * j;
    if (std::gcd(r, m) != 1) continue;
    const i64 disc = (1 - 4 * static_cast<i64>(r)) / static_cast<i64>(d2);
    sum += kronecker(disc, n);
    ++count;
  }
  const auto pm = mu_phi(factorize(m)).phi, pd = mu_phi(factorize(d2)).phi;
  if (static_cast<u64>(count) * pd != pm) throw std::logic_error("a_coeff: residue count mismatch");
  return Rational(sum, count);
}

/// Coefficient of l^{-ks} in the local factor of f_d(s).
inline Rational a_local(u64 l, unsigned k, bool divides_d) {
  if (k == 0) return Rational(1);
  if (l == 2) return Rational((k & 1) ? -1 : 1);
  const i64 li = static_cast<i64>(l);
  if (divides_d) return (k & 1) ? Rational(0) : Rational(li - 1, li);
  return (k & 1) ? Rational(-1, li - 1) : Rational(li - 2, li - 1);
}

inline Rational a_coeff_euler(u64 n, u64 d) {
  if (n < 1 || d < 1 || (d & 1) == 0) throw std::invalid_argument("a_coeff: need n >= 1 and odd d >= 1");
  Rational r(1);
  for (const auto& [l, e] : factorize(n).factors) r *= a_local(l, e, d % l == 0);
  return r;
}

/// a_{n,d}; the residue average and the Euler coefficient must agree.
inline Rational a_coeff(u64 n, u64 d) {
  const Rational a = a_coeff_residue(n, d);
  const Rational b = a_coeff_euler(n, d);
  if (!(a == b)) {
    throw std::logic_error("a_coeff(" + std::to_string(n) + "," + std::to_string(d) + "): residue " + a.str() +
                           " != Euler " + b.str());
  }
  return a;
}

/// f_d(1) = (pi^2/12) prod_{l odd} P_l prod_{l | d} (1 - l^-3)/P_l.
inline IntervalValue f_d_value(u64 d, double width = 1e-8) {
  if (d < 1 || (d & 1) == 0 || d > 100000) throw std::invalid_argument("f_d_value: need odd d <= 1e5");
  const auto pi = IntervalValue::pi();
  IntervalValue v = pi * pi / IntervalValue::exact(12) * p_product(width);
  for (const auto& [l, e] : factorize(d).factors) {
    const WideInterval ll = WideInterval::exact(static_cast<long double>(l));
    const WideInterval one = WideInterval::exact(1);
    v = v * ((one - one / (ll * ll * ll)) / detail::p_factor(l)).convert<double>();
  }
  return v;
}

struct CoefficientSum {
  double value = 0;  ///< sum_{n <= N} a_{n,d}/n
  double tail = 0;   ///< bound on |f_d(1) - value|
};

/// Truncated Dirichlet series at s = 1. Writing f_d(s) = zeta(2s) G(s), the
/// tail is at most (2 / sqrt N) sum_m |g_m| m^{-1/2}, taken as an Euler product.
inline CoefficientSum f_d_coefficient_sum(u64 d, u64 n_max) {
  if (d < 1 || (d & 1) == 0) throw std::invalid_argument("f_d_coefficient_sum: d must be odd");
  const SpfTable spf(n_max);
  std::vector<double> terms(n_max);
  const auto divides_d = [&](u64 l) { return d % l == 0; };
  for (u64 n = 1; n <= n_max; ++n) {
    double a = 1;
    u64 m = n;
    while (m > 1 && a != 0) {
      const u64 l = spf[m];
      unsigned e = 0;
      while (m % l == 0) {
        m /= l;
        ++e;
      }
      a *= a_local(l, e, divides_d(l)).to_double();
    }
    terms[n - 1] = a / static_cast<double>(n);
  }
  CoefficientSum out;
  out.value = pairwise_sum<double>(terms);
  const auto g = [&](u64 l) {
    const WideInterval ll = WideInterval::exact(static_cast<long double>(l));
    const WideInterval one = WideInterval::exact(1);
    if (divides_d(l)) return one + one / (ll * ll);
    return one + one / (sqrt(ll) * (ll - one)) + one / (ll * (ll - one));
  };
  const auto odd = euler_product(g, 1'000'000, prime_tail_majorant(1.02, 1.5), {3, 64});
  const double two = 1.0 + 1.0 / std::sqrt(2.0);
  out.tail = 2.0 / std::sqrt(static_cast<double>(n_max)) * two * odd.hi() * (1 + 1e-12) +
             static_cast<double>(n_max) * 1e-17;
  return out;
}

// ---------------------------------------------------------------------------
// Prime character sums

struct CharacterSumReport {
  u64 m = 0;
  u64 x = 0;
  i64 sum = 0;        ///< sum_{p <= x} chi_m(1 - 4p)
  double main = 0;    ///< mu(m)/phi(m) Li(x)
  double li = 0;
  double deviation = 0;
};

/// The real primitive character mod m (odd squarefree m): (m*|n) with m* = +-m = 1 (mod 4).
inline int real_primitive_character(u64 m, i64 n) {
  const i64 mstar = (m % 4 == 1) ? static_cast<i64>(m) : -static_cast<i64>(m);
  return kronecker(mstar, mod_floor(n, m));
}

inline CharacterSumReport prime_character_sum(u64 m, u64 x) {
  const auto f = factorize(m);
  if ((m & 1) == 0 || m < 3 || !is_squarefree(f)) throw std::invalid_argument("prime_character_sum: m odd squarefree > 1");
  std::vector<int> chi(m);
  for (u64 r = 0; r < m; ++r) chi[r] = real_primitive_character(m, static_cast<i64>(r));
  CharacterSumReport out{m, x, 0, 0, 0, 0};
  for_each_prime(2, x, [&](u64 p) { out.sum += chi[mod_floor(1 - 4 * static_cast<i128>(p), m)]; });
  const auto mp = mu_phi(f);
  out.li = li(static_cast<double>(x)).value;
  out.main = static_cast<double>(mp.mu) / static_cast<double>(mp.phi) * out.li;
  out.deviation = std::fabs(static_cast<double>(out.sum) - out.main);
  return out;
}

inline void write_l_table_csv(std::ostream& os, std::span<const LTableRow> rows) {
  os.precision(17);
  os << "p,d,D,N,L,tail_radius,rounding_radius,h\n";
  for (const auto& r : rows) {
    os << r.p << ',' << r.d << ',' << r.D << ',' << r.l.terms_used << ',' << r.l.value << ',' << r.l.tail_radius
       << ',' << r.l.rounding_radius << ',' << r.h << '\n';
  }
}

}  // namespace bqf
