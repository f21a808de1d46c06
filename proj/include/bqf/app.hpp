#pragma once

// The bqf command-line application: argument and config handling plus the
// count, verify, discrepancy, lsum, constants and sweep commands.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bqf/arith.hpp"
#include "bqf/asymptotics.hpp"
#include "bqf/census.hpp"
#include "bqf/census_io.hpp"
#include "bqf/congruence.hpp"
#include "bqf/discrepancy.hpp"
#include "bqf/forms.hpp"
#include "bqf/lfunc.hpp"

namespace bqf {

enum class ExitCode : int { ok = 0, failed = 1, usage = 2, mismatch = 3, corrupt_cache = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  u64 x = 10;
  std::string method = "enumerate";
  unsigned workers = 1;
  std::string cache;
  std::string output = "-";
  std::string format = "text";
  u64 x_max = 1'000'000;
  std::string only;
  i64 a = 1, b = 1, c = 17;
  std::string x_list = "1000,10000";
  std::optional<i64> weyl_h;
  u64 d = 0;
};

/// Plain key=value lines; '#' starts a comment.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(n) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

inline u64 parse_count(const std::string& s) {
  // Accepts 100000, 1e5, 1e6.
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: " + s);
  }
  if (used != s.size() || v < 0 || v != std::floor(v) || v > 1e15) throw UsageError("not a count: " + s);
  return static_cast<u64>(v);
}

inline std::vector<u64> parse_list(const std::string& s) {
  std::vector<u64> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_count(item));
  }
  return out;
}

/// Output stream for cfg.output; "-" is the caller's stream. BQF_OUTPUT_DIR
/// redirects file outputs into that directory.
class OutputSink {
 public:
  OutputSink(const std::string& output, std::ostream& fallback) {
    if (output.empty() || output == "-") {
      os_ = &fallback;
      return;
    }
    std::filesystem::path path(output);
    if (const char* dir = std::getenv("BQF_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
      path = std::filesystem::path(dir) / path.filename();
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw std::runtime_error("cannot open output " + path.string());
    os_ = &file_;
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

inline CensusTable run_census(const std::string& method, u64 x, unsigned workers) {
  if (method == "enumerate") return census_enumeration(x, workers);
  if (method == "divisor") return census_divisor(x, workers);
  if (method == "classnumber") return census_classnumber(x, workers);
  throw UsageError("unknown method " + method);
}

// ---------------------------------------------------------------------------
// count

using CensusRunner = std::function<CensusTable(const std::string& method, u64 x, unsigned workers)>;

inline int run_count(const RunConfig& cfg, std::ostream& out, std::ostream& err,
                     const CensusRunner& runner = run_census) {
  CensusTable table;
  if (cfg.method == "all") {
    const std::vector<std::string> methods = {"enumerate", "divisor", "classnumber"};
    std::vector<CensusTable> tables;
    for (const auto& m : methods) tables.push_back(runner(m, cfg.x, cfg.workers));
    for (std::size_t i = 1; i < tables.size(); ++i) {
      if (const auto p = first_difference(tables[0], tables[i]); p || tables[0].total != tables[i].total) {
        err << "mismatch between " << methods[0] << " and " << methods[i] << " at p=" << (p ? *p : 0) << '\n';
        return static_cast<int>(ExitCode::mismatch);
      }
    }
    table = std::move(tables[0]);
    err << "all methods agree\n";
  } else {
    table = runner(cfg.method, cfg.x, cfg.workers);
  }
  if (!cfg.cache.empty()) write_cache(cfg.cache, cache_from_table(table, cfg.x));
  OutputSink sink(cfg.output, out);
  write_count_csv(sink.stream(), table, artin_constant(1e-8).mid());
  err << "total=" << table.total << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyItem {
  std::string name;
  bool pass = false;
  std::string detail;
};

using VerifyCheck = std::function<VerifyItem()>;

inline VerifyItem verify_divisor_identity(u64 a_max = 10000, u64 p_max = 100) {
  VerifyItem item{"divisor_identity", true, ""};
  u64 checked = 0;
  for (const u64 p : sieve_primes(2, p_max).primes) {
    const auto f = census_poly(p);
    const i64 disc = 1 - 4 * static_cast<i64>(p);
    for (u64 a = 1; a <= a_max; a += 2) {
      const auto fa = factorize(a);
      if (!is_squarefree(fa)) continue;
      ++checked;
      const u64 lhs = count_roots_jacobi(a, disc);
      const u64 rhs = roots_mod_n(f, fa).roots.size();
      if (lhs != rhs) {
        item.pass = false;
        item.detail = "p=" + std::to_string(p) + " a=" + std::to_string(a) + ": divisor sum " + std::to_string(lhs) +
                      " vs roots " + std::to_string(rhs);
        return item;
      }
    }
  }
  item.detail = std::to_string(checked) + " pairs";
  return item;
}

inline VerifyItem verify_hurwitz(u64 p_max = 3000) {
  VerifyItem item{"hurwitz_decomposition", true, ""};
  u64 checked = 0;
  for (const u64 p : sieve_primes(2, p_max).primes) {
    const i64 disc = 1 - 4 * static_cast<i64>(p);
    const auto cn = class_numbers(disc);
    u64 sum = 0;
    for (const u64 d : square_divisor_roots(factorize(4 * p - 1))) {
      sum += class_number_enumerated(disc / static_cast<i64>(d * d));
    }
    ++checked;
    if (sum != cn.H) {
      item.pass = false;
      item.detail = "p=" + std::to_string(p) + ": H=" + std::to_string(cn.H) + " sum h=" + std::to_string(sum);
      return item;
    }
  }
  item.detail = std::to_string(checked) + " primes";
  return item;
}

inline VerifyItem verify_h_formula(i64 d_min = -10000) {
  VerifyItem item{"h_formula", true, ""};
  u64 checked = 0;
  const SpfTable spf(static_cast<u64>(-d_min));
  for (i64 d = -7; d >= d_min; --d) {
    const i64 r = ((d % 4) + 4) % 4;
    if (r != 0 && r != 1) continue;
    ++checked;
    const u64 hf = h_from_formula(d, &spf);
    const u64 he = class_number_enumerated(d);
    if (hf != he) {
      item.pass = false;
      item.detail = "D=" + std::to_string(d) + ": formula " + std::to_string(hf) + " enumeration " + std::to_string(he);
      return item;
    }
  }
  item.detail = std::to_string(checked) + " discriminants";
  return item;
}

inline VerifyItem verify_constants() {
  VerifyItem item{"constants", true, ""};
  const auto r = constant_suite();
  for (const auto& c : r.checks) {
    if (!c.pass) {
      item.pass = false;
      item.detail += c.name + " gap " + std::to_string(c.gap) + "; ";
    }
  }
  if (item.pass) item.detail = std::to_string(r.checks.size()) + " identities";
  return item;
}

inline VerifyItem verify_a_coeff(u64 n_max = 500) {
  VerifyItem item{"a_coeff", true, ""};
  for (const u64 d : {1, 3, 5, 9, 15}) {
    for (u64 n = 1; n <= n_max; ++n) {
      const auto a = a_coeff_residue(n, d);
      const auto b = a_coeff_euler(n, d);
      if (!(a == b)) {
        item.pass = false;
        item.detail = "n=" + std::to_string(n) + " d=" + std::to_string(d) + ": " + a.str() + " vs " + b.str();
        return item;
      }
    }
  }
  item.detail = "n<=" + std::to_string(n_max) + ", d in {1,3,5,9,15}";
  return item;
}

inline VerifyItem verify_census(u64 x = 3000) {
  VerifyItem item{"census", true, ""};
  const auto e = census_enumeration(x);
  const auto dv = census_divisor(x);
  const auto cn = census_classnumber(x);
  const auto ref = census_per_discriminant(x);
  for (const auto* t : {&dv, &cn, &ref}) {
    if (const auto p = first_difference(e, *t)) {
      item.pass = false;
      item.detail = "first difference at p=" + std::to_string(*p);
      return item;
    }
  }
  item.detail = "X=" + std::to_string(x) + " total " + std::to_string(e.total);
  return item;
}

inline const std::vector<std::pair<std::string, VerifyCheck>>& verify_registry() {
  static const std::vector<std::pair<std::string, VerifyCheck>> items = {
      {"divisor_identity", [] { return verify_divisor_identity(); }},
      {"hurwitz_decomposition", [] { return verify_hurwitz(); }},
      {"h_formula", [] { return verify_h_formula(); }},
      {"constants", [] { return verify_constants(); }},
      {"a_coeff", [] { return verify_a_coeff(); }},
      {"census", [] { return verify_census(); }},
  };
  return items;
}

inline int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<std::string> wanted;
  if (!cfg.only.empty()) {
    std::stringstream ss(cfg.only);
    std::string s;
    while (std::getline(ss, s, ',')) {
      if (s.empty()) continue;
      const bool known = std::any_of(verify_registry().begin(), verify_registry().end(),
                                     [&](const auto& kv) { return kv.first == s; });
      if (!known) throw UsageError("unknown verify item " + s);
      wanted.push_back(s);
    }
  }
  OutputSink sink(cfg.output, out);
  bool all = true;
  for (const auto& [name, check] : verify_registry()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
    VerifyItem item;
    try {
      item = check();
    } catch (const std::exception& e) {
      item = {name, false, std::string("exception: ") + e.what()};
    }
    all = all && item.pass;
    sink.stream() << (item.pass ? "PASS " : "FAIL ") << item.name << "  " << item.detail << '\n';
    sink.stream().flush();
  }
  if (!all) err << "verify: failures\n";
  return all ? 0 : static_cast<int>(ExitCode::failed);
}

// ---------------------------------------------------------------------------
// discrepancy

inline int run_discrepancy(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const QuadraticPoly f{cfg.a, cfg.b, cfg.c};
  if (!f.irreducible()) throw UsageError("polynomial " + f.str() + " is reducible");
  const auto xs = parse_list(cfg.x_list);
  if (xs.empty()) throw UsageError("empty --x-list");
  for (const u64 x : xs) {
    if (x < 1) throw UsageError("X must be >= 1");
  }
  const u64 x_max = *std::max_element(xs.begin(), xs.end());
  const RootTable table(f, x_max);
  OutputSink sink(cfg.output, out);
  auto& os = sink.stream();
  if (cfg.weyl_h) {
    os << "X,h,re,im,abs,bound_ratio\n";
    for (const u64 x : xs) {
      const auto w = weyl_partial_sum(table, *cfg.weyl_h, x);
      os << x << ',' << w.h << ',' << format_fixed(w.value.real(), 9) << ',' << format_fixed(w.value.imag(), 9) << ','
         << format_fixed(std::abs(w.value), 9) << ',' << (w.bound_ratio ? format_fixed(*w.bound_ratio, 9) : "") << '\n';
    }
    return 0;
  }
  os << "X,points,discrepancy,ratio\n";
  std::vector<double> lx, ly;
  for (const u64 x : xs) {
    const auto rep = discrepancy_exact(table, x);
    const double l = std::log(static_cast<double>(x));
    const double scale = std::pow(static_cast<double>(x), 8.0 / 9.0) * l * l * l;
    os << x << ',' << rep.total_points << ',' << format_fixed(rep.sup_discrepancy, 6) << ','
       << (x >= 2 ? format_fixed(rep.sup_discrepancy / scale, 9) : "") << '\n';
    lx.push_back(static_cast<double>(x));
    ly.push_back(std::max(rep.sup_discrepancy, 1e-300));
  }
  if (xs.size() >= 2) err << "slope=" << format_fixed(loglog_slope(lx, ly), 6) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// lsum

inline int run_lsum(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.d != 0 && (cfg.d & 1) == 0) throw UsageError("--d must be odd");
  const auto rows = l_table(cfg.x, cfg.d);
  OutputSink sink(cfg.output, out);
  write_l_table_csv(sink.stream(), rows);
  std::map<u64, std::pair<long double, u64>> per_d;
  for (const auto& r : rows) {
    per_d[r.d].first += r.l.value;
    per_d[r.d].second += r.h;
  }
  for (const auto& [d, v] : per_d) {
    err << "d=" << d << " T_d=" << format_fixed(static_cast<double>(v.first), 9) << " Q_d=" << v.second << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// constants

inline int run_constants(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto report = constant_suite();
  OutputSink sink(cfg.output, out);
  if (cfg.format == "csv") {
    write_constants_csv(sink.stream(), report);
    if (cfg.x >= 10) write_main_terms_csv(sink.stream(), main_terms(cfg.x));
  } else if (cfg.format == "text") {
    write_constants_text(sink.stream(), report);
  } else {
    throw UsageError("unknown format " + cfg.format);
  }
  if (!report.all_pass()) {
    err << "constant identities failed\n";
    return static_cast<int>(ExitCode::failed);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

/// round(10^{3 + i/2}) up to x_max.
inline std::vector<u64> sweep_checkpoints(u64 x_max) {
  std::vector<u64> out;
  for (int i = 0;; ++i) {
    const auto x = static_cast<u64>(std::llround(std::pow(10.0, 3.0 + i / 2.0)));
    if (x > x_max) break;
    out.push_back(x);
  }
  return out;
}

inline int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.x_max < 1000) throw UsageError("--x-max must be >= 1000");
  const auto checkpoints = sweep_checkpoints(cfg.x_max);
  CacheData data;
  if (!cfg.cache.empty() && std::filesystem::exists(cfg.cache)) {
    data = read_cache(cfg.cache);
    err << "resuming from X=" << data.x_covered << '\n';
  }
  // Extend checkpoint by checkpoint so an interrupted run keeps its progress.
  for (const u64 x : checkpoints) {
    if (x <= data.x_covered) continue;
    const auto ext = census_enumeration_range(data.x_covered, x, cfg.workers);
    for (const auto& r : ext.rows) data.records.push_back({r.p, static_cast<std::uint32_t>(r.H)});
    data.x_covered = x;
    if (!cfg.cache.empty()) write_cache(cfg.cache, data);
  }
  const double c_art = artin_constant(1e-8).mid();
  OutputSink sink(cfg.output, out);
  auto& os = sink.stream();
  os << "X,Q,mt_simple,mt_integral,ratio_simple,ratio_integral\n";
  u64 q = 0;
  std::size_t i = 0;
  double integral = 0, prev = 2.0;
  for (const u64 x : checkpoints) {
    while (i < data.records.size() && data.records[i].p <= x) q += data.records[i++].H;
    integral += sqrtlog_integral(prev, static_cast<double>(x), 1e-12).value;
    prev = static_cast<double>(x);
    const double ms = mt_simple_value(c_art, static_cast<double>(x));
    const double mi = mt_integral_value(c_art, integral);
    os << x << ',' << q << ',' << format_fixed(ms, 3) << ',' << format_fixed(mi, 3) << ','
       << format_fixed(static_cast<double>(q) / ms, 8) << ',' << format_fixed(static_cast<double>(q) / mi, 8) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// entry point

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Class numbers of binary quadratic forms at prime discriminants 1 - 4p"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "key=value file; flags take precedence");

  std::string x_text = "10", x_max_text = "1000000";
  const auto add_x = [&](CLI::App* sub) { sub->add_option("--x", x_text, "upper bound X"); };
  const auto add_workers = [&](CLI::App* sub) {
    sub->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
  };
  const auto add_output = [&](CLI::App* sub) { sub->add_option("--output", cfg.output, "output path, - for stdout"); };

  auto* count = app.add_subcommand("count", "tabulate Q(X) per prime");
  add_x(count);
  add_workers(count);
  add_output(count);
  count->add_option("--method", cfg.method)->check(CLI::IsMember({"enumerate", "divisor", "classnumber", "all"}));
  count->add_option("--cache", cfg.cache, "write a cache file");

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--only", cfg.only, "comma-separated item names");
  add_output(verify);

  auto* disc = app.add_subcommand("discrepancy", "discrepancy of root fractions v/n");
  disc->add_option("--a", cfg.a);
  disc->add_option("--b", cfg.b);
  disc->add_option("--c", cfg.c);
  disc->add_option("--x-list", cfg.x_list, "comma-separated X values");
  disc->add_option("--weyl-h", cfg.weyl_h, "emit Weyl sums for this h instead");
  add_output(disc);

  auto* lsum = app.add_subcommand("lsum", "L(1, chi) table for (1 - 4p)/d^2");
  add_x(lsum);
  lsum->add_option("--d", cfg.d, "restrict to content d");
  add_output(lsum);

  auto* constants = app.add_subcommand("constants", "constant identities and main terms");
  constants->add_option("--format", cfg.format)->check(CLI::IsMember({"text", "csv"}));
  add_x(constants);
  add_output(constants);

  auto* sweep = app.add_subcommand("sweep", "Q(X) against the main terms at checkpoints");
  sweep->add_option("--x-max", x_max_text, "largest checkpoint");
  sweep->add_option("--cache", cfg.cache, "resumable cache file");
  add_workers(sweep);
  add_output(sweep);

  try {
    // Config values are defaults; command-line flags override them.
    for (int i = 1; i < argc; ++i) {
      const std::string s = argv[i];
      if (s == "--config" && i + 1 < argc) config_path = argv[i + 1];
      if (s.rfind("--config=", 0) == 0) config_path = s.substr(9);
    }
    if (!config_path.empty()) {
      for (const auto& [k, v] : read_config_file(config_path)) {
        if (k == "x") x_text = v;
        else if (k == "x_max") x_max_text = v;
        else if (k == "method") cfg.method = v;
        else if (k == "workers") cfg.workers = static_cast<unsigned>(parse_count(v));
        else if (k == "cache") cfg.cache = v;
        else if (k == "output") cfg.output = v;
        else if (k == "only") cfg.only = v;
        else if (k == "format") cfg.format = v;
        else if (k == "a") cfg.a = std::stoll(v);
        else if (k == "b") cfg.b = std::stoll(v);
        else if (k == "c") cfg.c = std::stoll(v);
        else if (k == "x_list") cfg.x_list = v;
        else if (k == "weyl_h") cfg.weyl_h = std::stoll(v);
        else if (k == "d") cfg.d = parse_count(v);
        else throw UsageError("unknown config key " + k);
      }
    }
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.x = parse_count(x_text);
    cfg.x_max = parse_count(x_max_text);
    if (cfg.x < 1) throw UsageError("--x must be >= 1");
    if (cfg.workers < 1) throw UsageError("--workers must be >= 1");
    if (cfg.method != "enumerate" && cfg.method != "divisor" && cfg.method != "classnumber" && cfg.method != "all") {
      throw UsageError("unknown method " + cfg.method);
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  } catch (const std::invalid_argument& e) {
    err << "usage: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  }

  try {
    if (cfg.command == "count") return run_count(cfg, out, err);
    if (cfg.command == "verify") return run_verify(cfg, out, err);
    if (cfg.command == "discrepancy") return run_discrepancy(cfg, out, err);
    if (cfg.command == "lsum") return run_lsum(cfg, out, err);
    if (cfg.command == "constants") return run_constants(cfg, out, err);
    if (cfg.command == "sweep") return run_sweep(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  } catch (const CorruptCache& e) {
    err << e.what() << '\n';
    return static_cast<int>(ExitCode::corrupt_cache);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::failed);
  }
  return static_cast<int>(ExitCode::usage);
}

}  // namespace bqf
