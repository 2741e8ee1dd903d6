#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace osmec {

/// Virtual time as a count of microseconds (1 time-unit = 1 second = 1e6 us).
/// Integer micro-units keep scheduling, logs and reports bit-identical across
/// platforms; fractional seconds in configs are rounded once on entry.
class VirtTime {
 public:
  constexpr VirtTime() = default;

  static constexpr VirtTime zero() { return VirtTime{0}; }
  static constexpr VirtTime from_micros(std::int64_t us) { return VirtTime{us}; }
  static VirtTime from_seconds(double s) { return VirtTime{std::llround(s * 1e6)}; }
  static constexpr VirtTime from_units(std::int64_t units) { return VirtTime{units * 1000000}; }

  constexpr std::int64_t micros() const { return us_; }
  double seconds() const { return static_cast<double>(us_) / 1e6; }

  constexpr bool is_zero() const { return us_ == 0; }

  friend constexpr VirtTime operator+(VirtTime a, VirtTime b) { return VirtTime{a.us_ + b.us_}; }
  friend constexpr VirtTime operator-(VirtTime a, VirtTime b) { return VirtTime{a.us_ - b.us_}; }
  VirtTime& operator+=(VirtTime o) {
    us_ += o.us_;
    return *this;
  }
  friend constexpr bool operator==(VirtTime a, VirtTime b) { return a.us_ == b.us_; }
  friend constexpr bool operator!=(VirtTime a, VirtTime b) { return a.us_ != b.us_; }
  friend constexpr bool operator<(VirtTime a, VirtTime b) { return a.us_ < b.us_; }
  friend constexpr bool operator<=(VirtTime a, VirtTime b) { return a.us_ <= b.us_; }
  friend constexpr bool operator>(VirtTime a, VirtTime b) { return a.us_ > b.us_; }
  friend constexpr bool operator>=(VirtTime a, VirtTime b) { return a.us_ >= b.us_; }

  /// Canonical form used in logs and CSVs: seconds with exactly six decimals.
  std::string to_string() const {
    char buf[32];
    std::int64_t us = us_;
    const char* sign = "";
    if (us < 0) {
      sign = "-";
      us = -us;
    }
    std::snprintf(buf, sizeof(buf), "%s%lld.%06lld", sign, static_cast<long long>(us / 1000000),
                  static_cast<long long>(us % 1000000));
    return buf;
  }

  static bool parse(std::string_view text, VirtTime& out) {
    // <int>.<6 digits>, the canonical form only.
    auto dot = text.find('.');
    if (dot == std::string_view::npos || text.size() - dot - 1 != 6) return false;
    std::int64_t whole = 0, frac = 0;
    bool neg = !text.empty() && text[0] == '-';
    std::string_view wpart = text.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
    std::string_view fpart = text.substr(dot + 1);
    auto r1 = std::from_chars(wpart.data(), wpart.data() + wpart.size(), whole);
    auto r2 = std::from_chars(fpart.data(), fpart.data() + fpart.size(), frac);
    if (r1.ec != std::errc{} || r1.ptr != wpart.data() + wpart.size()) return false;
    if (r2.ec != std::errc{} || r2.ptr != fpart.data() + fpart.size()) return false;
    std::int64_t us = whole * 1000000 + frac;
    out = VirtTime{neg ? -us : us};
    return true;
  }

 private:
  constexpr explicit VirtTime(std::int64_t us) : us_(us) {}
  std::int64_t us_ = 0;
};

}  // namespace osmec
