#pragma once

#include <string>
#include <string_view>

#include "osmec/bus/message.hpp"
#include "osmec/core/result.hpp"
#include "osmec/nf/legacy.hpp"

namespace osmec {

enum class ProtocolKind { Http, Legacy };

inline const char* protocol_name(ProtocolKind p) {
  return p == ProtocolKind::Http ? "http" : "legacy";
}

/// Communication protocol conversion: identify what a user sent and
/// re-encapsulate anything non-HTTP into the unified form.
class Cpcf {
 public:
  static Result<ProtocolKind> identify(std::string_view payload) {
    if (payload.empty()) return Error{Errc::PreconditionViolated, "empty payload"};
    if (sbm::parse(payload).ok()) return ProtocolKind::Http;
    if (legacy::has_magic(payload)) return ProtocolKind::Legacy;
    return Error{Errc::UnrecognizedProtocol, "neither SBM/1 nor XMEC1"};
  }

  /// HTTP passes through unchanged (byte-equal after reserialization);
  /// legacy payloads become POST /ebi/mano/requests carrying the raw legacy
  /// body and the x-origin-protocol marker.
  static Result<Message> convert(std::string_view payload) {
    auto kind = identify(payload);
    if (!kind.ok()) return kind.error();
    if (kind.value() == ProtocolKind::Http) {
      return sbm::parse(payload);
    }
    // validate the TLV stream before forwarding
    if (auto decoded = legacy::decode(payload); !decoded.ok()) return decoded.error();
    Message m = Message::request(Method::Post, "/ebi/mano/requests", std::string(payload));
    m.set_header("x-origin-protocol", "legacy");
    return m;
  }
};

}  // namespace osmec
