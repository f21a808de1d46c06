#pragma once

// Census CSV output and the binary cache file.
//
// Cache layout (little-endian):
//   "BQFC" | version u16 | x_covered u64 | records (p u64, H u32, reserved u32)* | crc32 u32
// The CRC covers every byte before it.

#include <zlib.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bqf/asymptotics.hpp"
#include "bqf/census.hpp"

namespace bqf {

/// RFC-4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string breakdown_string(const CensusRow& row) {
  std::string s;
  for (const auto& [d, h] : row.breakdown) {
    if (!s.empty()) s += '|';
    s += std::to_string(d) + ':' + std::to_string(h);
  }
  return s;
}

/// Main terms below this X are not reported (log X too small to mean anything).
inline constexpr u64 kRatioMinX = 10;

/// One line per prime with the running total and its ratio to both main terms.
inline void write_count_csv(std::ostream& os, const CensusTable& table, double c_art) {
  os << "p,H,h_primitive,content_breakdown,running_total,ratio_simple,ratio_integral\n";
  u64 running = 0;
  double integral = 0;
  double prev = 2.0;
  for (const auto& row : table.rows) {
    running += row.H;
    const auto p = static_cast<double>(row.p);
    integral += sqrtlog_integral(prev, p, 1e-12).value;
    prev = p;
    std::string simple, integ;
    if (row.p >= kRatioMinX) {
      simple = format_fixed(static_cast<double>(running) / mt_simple_value(c_art, p), 8);
      integ = format_fixed(static_cast<double>(running) / mt_integral_value(c_art, integral), 8);
    }
    os << row.p << ',' << row.H << ',' << row.h_primitive() << ',' << csv_field(breakdown_string(row)) << ','
       << running << ',' << simple << ',' << integ << '\n';
  }
}

// ---------------------------------------------------------------------------
// Cache

inline constexpr std::array<char, 4> kCacheMagic = {'B', 'Q', 'F', 'C'};
inline constexpr std::uint16_t kCacheVersion = 1;

class CorruptCache : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CacheRecord {
  u64 p = 0;
  std::uint32_t H = 0;
  bool operator==(const CacheRecord&) const = default;
};

struct CacheData {
  u64 x_covered = 0;
  std::vector<CacheRecord> records;
  bool operator==(const CacheData&) const = default;
};

namespace detail {

template <typename T>
void put_le(std::vector<unsigned char>& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const unsigned char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

inline std::uint32_t crc32_of(const unsigned char* data, std::size_t n) {
  return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), data, static_cast<uInt>(n)));
}

}  // namespace detail

inline constexpr std::size_t kCacheHeaderSize = 4 + 2 + 8;
inline constexpr std::size_t kCacheRecordSize = 16;

inline std::vector<unsigned char> encode_cache(const CacheData& data) {
  std::vector<unsigned char> buf(kCacheMagic.begin(), kCacheMagic.end());
  detail::put_le<std::uint16_t>(buf, kCacheVersion);
  detail::put_le<u64>(buf, data.x_covered);
  u64 prev = 0;
  for (const auto& r : data.records) {
    if (r.p <= prev || r.p > data.x_covered) throw std::invalid_argument("cache records must be sorted and covered");
    prev = r.p;
    detail::put_le<u64>(buf, r.p);
    detail::put_le<std::uint32_t>(buf, r.H);
    detail::put_le<std::uint32_t>(buf, 0);
  }
  detail::put_le<std::uint32_t>(buf, detail::crc32_of(buf.data(), buf.size()));
  return buf;
}

inline CacheData decode_cache(const std::vector<unsigned char>& buf) {
  if (buf.size() < kCacheHeaderSize + 4 || (buf.size() - kCacheHeaderSize - 4) % kCacheRecordSize != 0) {
    throw CorruptCache("cache: truncated or misaligned file");
  }
  const std::size_t body = buf.size() - 4;
  if (detail::get_le<std::uint32_t>(buf.data() + body) != detail::crc32_of(buf.data(), body)) {
    throw CorruptCache("cache: checksum mismatch");
  }
  if (std::memcmp(buf.data(), kCacheMagic.data(), 4) != 0) throw CorruptCache("cache: bad magic");
  if (detail::get_le<std::uint16_t>(buf.data() + 4) != kCacheVersion) throw CorruptCache("cache: unsupported version");
  CacheData out;
  out.x_covered = detail::get_le<u64>(buf.data() + 6);
  u64 prev = 0;
  for (std::size_t off = kCacheHeaderSize; off < body; off += kCacheRecordSize) {
    CacheRecord r{detail::get_le<u64>(buf.data() + off), detail::get_le<std::uint32_t>(buf.data() + off + 8)};
    if (detail::get_le<std::uint32_t>(buf.data() + off + 12) != 0 || r.p <= prev || r.p > out.x_covered) {
      throw CorruptCache("cache: malformed record");
    }
    prev = r.p;
    out.records.push_back(r);
  }
  return out;
}

inline CacheData cache_from_table(const CensusTable& t, u64 x_covered) {
  CacheData d{x_covered, {}};
  for (const auto& r : t.rows) d.records.push_back({r.p, static_cast<std::uint32_t>(r.H)});
  return d;
}

/// Writes atomically: temp file, then rename.
inline void write_cache(const std::filesystem::path& path, const CacheData& data) {
  const auto buf = encode_cache(data);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write cache " + tmp.string());
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::runtime_error("cannot write cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline CacheData read_cache(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open cache " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_cache(buf);
}

}  // namespace bqf
