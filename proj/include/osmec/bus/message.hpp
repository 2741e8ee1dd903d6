#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "osmec/core/result.hpp"
#include "osmec/core/text.hpp"

namespace osmec {

enum class MsgKind { Request, Response };
enum class Method { Get, Post, Put, Delete };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Get: return "GET";
    case Method::Post: return "POST";
    case Method::Put: return "PUT";
    case Method::Delete: return "DELETE";
  }
  return "GET";
}

inline std::optional<Method> method_from_name(std::string_view s) {
  if (s == "GET") return Method::Get;
  if (s == "POST") return Method::Post;
  if (s == "PUT") return Method::Put;
  if (s == "DELETE") return Method::Delete;
  return std::nullopt;
}

/// Interface class is carried by the path prefix; every message has one.
inline bool path_has_namespace(std::string_view path) {
  return starts_with(path, "/sbi/") || starts_with(path, "/nbi/") || starts_with(path, "/ebi/");
}

/// The message unit carried on SBI, NBI and EBI, with its SBM/1 wire form:
///
///   request  start line:  METHOD SP path SP "SBM/1" CRLF
///   response start line:  "SBM/1" SP 3-digit-status CRLF
///   header lines:         key ":" SP value CRLF
///   blank line (CRLF), then exactly content-length body bytes.
///
/// correlation-id and content-length headers are synthesized from fields on
/// every message; responses additionally carry their path in a reserved
/// "path" header (the response start line has no path slot). Header keys are
/// ASCII, case-insensitive, stored lowercase; duplicates are rejected.
struct Message {
  MsgKind kind = MsgKind::Request;
  Method method = Method::Get;
  std::string path;
  std::vector<std::pair<std::string, std::string>> headers;  // user headers, ordered
  std::string body;
  std::uint64_t correlation_id = 0;
  int status = 0;  // responses only, 100..599

  static Message request(Method m, std::string path, std::string body = {},
                         std::vector<std::pair<std::string, std::string>> headers = {}) {
    Message msg;
    msg.kind = MsgKind::Request;
    msg.method = m;
    msg.path = std::move(path);
    msg.body = std::move(body);
    msg.headers = std::move(headers);
    normalize_headers(msg.headers);
    return msg;
  }

  static Message response(int status, std::string path, std::string body = {},
                          std::vector<std::pair<std::string, std::string>> headers = {}) {
    Message msg;
    msg.kind = MsgKind::Response;
    msg.status = status;
    msg.path = std::move(path);
    msg.body = std::move(body);
    msg.headers = std::move(headers);
    normalize_headers(msg.headers);
    return msg;
  }

  std::optional<std::string_view> header(std::string_view key) const {
    const std::string k = to_lower_ascii(key);
    for (const auto& [hk, hv] : headers) {
      if (hk == k) return std::string_view(hv);
    }
    return std::nullopt;
  }

  Message& set_header(std::string_view key, std::string_view value) {
    const std::string k = to_lower_ascii(key);
    for (auto& [hk, hv] : headers) {
      if (hk == k) {
        hv = std::string(value);
        return *this;
      }
    }
    headers.emplace_back(k, std::string(value));
    return *this;
  }

  bool operator==(const Message& o) const {
    if (kind != o.kind || path != o.path || headers != o.headers || body != o.body ||
        correlation_id != o.correlation_id)
      return false;
    if (kind == MsgKind::Request) return method == o.method;
    return status == o.status;
  }

 private:
  static void normalize_headers(std::vector<std::pair<std::string, std::string>>& hs) {
    for (auto& [k, v] : hs) k = to_lower_ascii(k);
  }
};

namespace sbm {

inline constexpr std::string_view kVersionToken = "SBM/1";
inline constexpr std::string_view kCrlf = "\r\n";

inline bool valid_header_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

inline bool reserved_header_key(std::string_view key) {
  return key == "correlation-id" || key == "content-length" || key == "path";
}

/// Structural validity required before a Message may touch the wire.
inline Status validate(const Message& m) {
  if (!path_has_namespace(m.path))
    return {Errc::UnknownNamespace, "path must start with /sbi/, /nbi/ or /ebi/"};
  if (m.kind == MsgKind::Response && (m.status < 100 || m.status > 599))
    return {Errc::MalformedFrame, "status out of range"};
  for (const auto& [k, v] : m.headers) {
    if (!valid_header_key(k)) return {Errc::MalformedFrame, "bad header key: " + k};
    if (reserved_header_key(k)) return {Errc::MalformedFrame, "reserved header key: " + k};
    if (v.find('\r') != std::string::npos || v.find('\n') != std::string::npos)
      return {Errc::MalformedFrame, "header value contains line break"};
    int dup = 0;
    for (const auto& [k2, v2] : m.headers) {
      if (k2 == k) ++dup;
    }
    if (dup > 1) return {Errc::MalformedFrame, "duplicate header key: " + k};
  }
  return Status::success();
}

/// Canonical framing; identical Message always yields identical bytes.
inline std::string serialize(const Message& m) {
  std::string out;
  if (m.kind == MsgKind::Request) {
    out += method_name(m.method);
    out += ' ';
    out += m.path;
    out += ' ';
    out += kVersionToken;
  } else {
    char status[8];
    std::snprintf(status, sizeof(status), "%03d", m.status);
    out += kVersionToken;
    out += ' ';
    out += status;
  }
  out += kCrlf;
  out += "correlation-id: " + std::to_string(m.correlation_id);
  out += kCrlf;
  out += "content-length: " + std::to_string(m.body.size());
  out += kCrlf;
  if (m.kind == MsgKind::Response) {
    out += "path: " + m.path;
    out += kCrlf;
  }
  for (const auto& [k, v] : m.headers) {
    out += k;
    out += ": ";
    out += v;
    out += kCrlf;
  }
  out += kCrlf;
  out += m.body;
  return out;
}

/// Parses the unique Message whose serialization is `bytes`; rejects frames
/// with trailing bytes, short bodies, duplicate or missing reserved headers.
inline Result<Message> parse(std::string_view bytes) {
  Message m;

  auto line_end = bytes.find(kCrlf);
  if (line_end == std::string_view::npos) return {Errc::MalformedFrame, "missing start line"};
  std::string_view start = bytes.substr(0, line_end);
  std::string_view rest = bytes.substr(line_end + 2);

  if (starts_with(start, kVersionToken)) {
    // response: SBM/1 SP NNN
    m.kind = MsgKind::Response;
    if (start.size() != kVersionToken.size() + 4 || start[kVersionToken.size()] != ' ')
      return {Errc::MalformedFrame, "bad response start line"};
    std::string_view code = start.substr(kVersionToken.size() + 1);
    std::uint64_t status = 0;
    if (code.size() != 3 || !parse_u64(code, status))
      return {Errc::MalformedFrame, "bad status code"};
    if (status < 100 || status > 599) return {Errc::MalformedFrame, "status out of range"};
    m.status = static_cast<int>(status);
  } else {
    auto sp1 = start.find(' ');
    auto sp2 = start.rfind(' ');
    if (sp1 == std::string_view::npos || sp2 == sp1)
      return {Errc::MalformedFrame, "bad request start line"};
    auto method = method_from_name(start.substr(0, sp1));
    if (!method) return {Errc::MalformedFrame, "unknown method"};
    if (start.substr(sp2 + 1) != kVersionToken)
      return {Errc::MalformedFrame, "missing SBM/1 token"};
    m.kind = MsgKind::Request;
    m.method = *method;
    m.path = std::string(start.substr(sp1 + 1, sp2 - sp1 - 1));
    if (m.path.find(' ') != std::string::npos)
      return {Errc::MalformedFrame, "path contains space"};
  }

  bool saw_correlation = false;
  bool saw_length = false;
  bool saw_path_header = false;
  std::uint64_t content_length = 0;
  std::vector<std::string> seen_keys;

  while (true) {
    auto eol = rest.find(kCrlf);
    if (eol == std::string_view::npos) return {Errc::MalformedFrame, "missing blank line"};
    std::string_view line = rest.substr(0, eol);
    rest = rest.substr(eol + 2);
    if (line.empty()) break;  // end of headers

    auto colon = line.find(": ");
    if (colon == std::string_view::npos || colon == 0)
      return {Errc::MalformedFrame, "bad header line"};
    std::string key = to_lower_ascii(line.substr(0, colon));
    std::string value(line.substr(colon + 2));
    if (!valid_header_key(key)) return {Errc::MalformedFrame, "bad header key: " + key};
    for (const auto& k : seen_keys) {
      if (k == key) return {Errc::MalformedFrame, "duplicate header key: " + key};
    }
    seen_keys.push_back(key);

    if (key == "correlation-id") {
      if (!parse_u64(value, m.correlation_id))
        return {Errc::MalformedFrame, "bad correlation-id"};
      saw_correlation = true;
    } else if (key == "content-length") {
      if (!parse_u64(value, content_length))
        return {Errc::MalformedFrame, "bad content-length"};
      saw_length = true;
    } else if (key == "path") {
      if (m.kind == MsgKind::Request)
        return {Errc::MalformedFrame, "path header not allowed on requests"};
      m.path = value;
      saw_path_header = true;
    } else {
      m.headers.emplace_back(std::move(key), std::move(value));
    }
  }

  if (!saw_correlation) return {Errc::MalformedFrame, "missing correlation-id"};
  if (!saw_length) return {Errc::MalformedFrame, "missing content-length"};
  if (m.kind == MsgKind::Response && !saw_path_header)
    return {Errc::MalformedFrame, "missing path header on response"};

  if (rest.size() < content_length)
    return {Errc::MalformedFrame, "body shorter than content-length"};
  if (rest.size() > content_length)
    return {Errc::MalformedFrame, "trailing bytes after body"};
  m.body = std::string(rest);

  if (!path_has_namespace(m.path))
    return {Errc::UnknownNamespace, "path lacks /sbi|/nbi|/ebi prefix: " + m.path};
  return m;
}

}  // namespace sbm
}  // namespace osmec
