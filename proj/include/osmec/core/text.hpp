#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace osmec {

/// FNV-1a 64-bit. Pinned digest for event-log hashes; stable across platforms.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

inline std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

inline bool parse_i64(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

/// Kilo-units (KB, Kbps) rendered in config units (MB, Mbps), trailing zeros
/// trimmed: 83900 -> "83.9", 512000 -> "512".
inline std::string kilo_to_unit_string(std::int64_t kilo) {
  char buf[40];
  std::int64_t whole = kilo / 1000;
  std::int64_t milli = kilo % 1000;
  const char* sign = "";
  if (kilo < 0) {
    sign = "-";
    whole = -whole;
    milli = -milli;
  }
  if (milli == 0) {
    std::snprintf(buf, sizeof(buf), "%s%lld", sign, static_cast<long long>(whole));
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%s%lld.%03lld", sign, static_cast<long long>(whole),
                static_cast<long long>(milli));
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  return s;
}

/// Shortest round-trip double formatting (std::to_chars), locale-free.
inline std::string double_to_string(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

/// Event payload fields may not contain the log separators.
inline std::string sanitize_token(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r' || c == ' ') c = '_';
  }
  return out;
}

}  // namespace osmec
