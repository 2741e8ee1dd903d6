#pragma once

#include <json.hpp>

#include <string>

#include "osmec/bus/message.hpp"
#include "osmec/core/result.hpp"

namespace osmec {

/// Status mapping used by every NF endpoint when a library error crosses the
/// bus. The body names the error so callers can recover the exact code.
inline int status_for(Errc code) {
  switch (code) {
    case Errc::TableNotFound:
    case Errc::KeyNotFound:
    case Errc::ImageNotFound:
    case Errc::NoActiveApp:
    case Errc::NoRoute:
    case Errc::UnknownInstance:
      return 404;
    case Errc::DuplicateKey:
    case Errc::DuplicateTable:
    case Errc::DuplicateEndpoint:
    case Errc::WrongState:
    case Errc::PreconditionViolated:
      return 409;
    case Errc::InsufficientResources:
    case Errc::ClusterExhausted:
      return 503;
    default:
      return 400;
  }
}

inline Message error_response(const std::string& path, const Error& err) {
  nlohmann::json body;
  body["error"] = errc_name(err.code);
  if (!err.detail.empty()) body["detail"] = err.detail;
  return Message::response(status_for(err.code), path, body.dump());
}

/// Recovers the library error from an error response, if one is encoded.
inline Error error_from_response(const Message& resp) {
  const auto parsed = nlohmann::json::parse(resp.body, nullptr, false);
  if (!parsed.is_discarded() && parsed.contains("error")) {
    const std::string name = parsed["error"].get<std::string>();
    for (int i = 0; i <= static_cast<int>(Errc::IoError); ++i) {
      auto c = static_cast<Errc>(i);
      if (name == errc_name(c)) {
        return Error{c, parsed.value("detail", std::string{})};
      }
    }
  }
  return Error{Errc::PreconditionViolated, "status " + std::to_string(resp.status)};
}

inline Message json_response(const std::string& path, int status, const nlohmann::json& body) {
  return Message::response(status, path, body.dump());
}

/// Body parse guard for endpoints that expect a JSON object.
inline Result<nlohmann::json> parse_json_body(const Message& m) {
  auto parsed = nlohmann::json::parse(m.body, nullptr, false);
  if (parsed.is_discarded()) return Error{Errc::MalformedFrame, "body is not valid JSON"};
  return parsed;
}

}  // namespace osmec
