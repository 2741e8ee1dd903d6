#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "osmec/bus/message.hpp"
#include "osmec/core/random.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec::test {

// ---- independent oracles (kept apart from the implementation paths) ----

/// Closed form for 1+2+...+n; oracle for the iterative service.
inline std::uint64_t sum_closed_form(std::uint64_t n) { return n * (n + 1) / 2; }

/// Trial-division primality; oracle for the sieve-based prime sum.
inline bool trial_division_prime(std::uint64_t k) {
  if (k < 2) return false;
  for (std::uint64_t d = 2; d * d <= k; ++d) {
    if (k % d == 0) return false;
  }
  return true;
}

inline std::uint64_t trial_division_prime_sum(std::uint64_t n) {
  std::uint64_t total = 0;
  for (std::uint64_t k = 2; k <= n; ++k) {
    if (trial_division_prime(k)) total += k;
  }
  return total;
}

/// Independent duration model for a container set: overlapping starts finish
/// at the longest cost, serialized starts at the total.
inline std::int64_t parallel_duration_us(const std::vector<std::int64_t>& costs_us,
                                         std::int64_t overhead_us) {
  std::int64_t mx = 0;
  for (auto c : costs_us) mx = std::max(mx, c);
  return mx + overhead_us;
}

inline std::int64_t sequential_duration_us(const std::vector<std::int64_t>& costs_us,
                                           std::int64_t overhead_us) {
  std::int64_t total = 0;
  for (auto c : costs_us) total += c;
  return total + overhead_us;
}

// ---- log scanning helpers ----

inline std::vector<const EventRecord*> events_of_kind(const std::vector<EventRecord>& recs,
                                                      EventKind kind) {
  std::vector<const EventRecord*> out;
  for (const auto& r : recs) {
    if (r.kind == kind) out.push_back(&r);
  }
  return out;
}

inline std::size_t count_kind(const std::vector<EventRecord>& recs, EventKind kind) {
  return events_of_kind(recs, kind).size();
}

/// Random SBM/1 message generator for round-trip property tests.
inline Message random_message(RandomSource& rng) {
  static const char* namespaces[] = {"/sbi/", "/nbi/", "/ebi/"};
  Message m;
  const bool request = rng.uniform_int(0, 1) == 0;
  std::string path = namespaces[rng.uniform_int(0, 2)];
  const int segments = static_cast<int>(rng.uniform_int(1, 4));
  for (int i = 0; i < segments; ++i) {
    if (i) path += '/';
    const int len = static_cast<int>(rng.uniform_int(1, 8));
    for (int k = 0; k < len; ++k) path += static_cast<char>('a' + rng.uniform_int(0, 25));
  }
  std::string body;
  const int body_len = static_cast<int>(rng.uniform_int(0, 64));
  for (int i = 0; i < body_len; ++i) body += static_cast<char>(rng.uniform_int(0, 255));
  std::vector<std::pair<std::string, std::string>> headers;
  const int header_count = static_cast<int>(rng.uniform_int(0, 4));
  for (int i = 0; i < header_count; ++i) {
    std::string key = "h" + std::to_string(i) + "-";
    const int len = static_cast<int>(rng.uniform_int(1, 6));
    for (int k = 0; k < len; ++k) key += static_cast<char>('a' + rng.uniform_int(0, 25));
    std::string value;
    const int vlen = static_cast<int>(rng.uniform_int(0, 12));
    for (int k = 0; k < vlen; ++k) value += static_cast<char>(rng.uniform_int(0x20, 0x7e));
    headers.emplace_back(std::move(key), std::move(value));
  }
  if (request) {
    static const Method methods[] = {Method::Get, Method::Post, Method::Put, Method::Delete};
    m = Message::request(methods[rng.uniform_int(0, 3)], std::move(path), std::move(body),
                         std::move(headers));
  } else {
    m = Message::response(static_cast<int>(rng.uniform_int(100, 599)), std::move(path),
                          std::move(body), std::move(headers));
  }
  m.correlation_id = rng.next_u64();
  return m;
}

}  // namespace osmec::test
