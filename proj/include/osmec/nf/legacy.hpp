#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "osmec/core/result.hpp"
#include "osmec/core/text.hpp"

namespace osmec::legacy {

/// The one concrete non-HTTP user protocol: magic "XMEC1" followed by TLV
/// records (tag: 1 byte, length: 2 bytes big-endian, value bytes).
inline constexpr std::string_view kMagic = "XMEC1";

enum Tag : std::uint8_t {
  kTagServiceClass = 0x01,
  kTagServiceName = 0x02,
  kTagInputJson = 0x03,
  kTagMode = 0x04,
};

struct LegacyRequest {
  std::string service_class;
  std::string service_name;
  std::string input_json;
  std::string mode;
};

inline bool has_magic(std::string_view bytes) { return starts_with(bytes, kMagic); }

inline void append_tlv(std::string& out, Tag tag, std::string_view value) {
  out.push_back(static_cast<char>(tag));
  out.push_back(static_cast<char>((value.size() >> 8) & 0xff));
  out.push_back(static_cast<char>(value.size() & 0xff));
  out.append(value);
}

inline std::string encode(const LegacyRequest& r) {
  std::string out(kMagic);
  append_tlv(out, kTagServiceClass, r.service_class);
  append_tlv(out, kTagServiceName, r.service_name);
  append_tlv(out, kTagInputJson, r.input_json);
  if (!r.mode.empty()) append_tlv(out, kTagMode, r.mode);
  return out;
}

inline Result<LegacyRequest> decode(std::string_view bytes) {
  if (!has_magic(bytes)) return Error{Errc::UnrecognizedProtocol, "missing XMEC1 magic"};
  std::string_view rest = bytes.substr(kMagic.size());
  LegacyRequest r;
  while (!rest.empty()) {
    if (rest.size() < 3) return Error{Errc::MalformedFrame, "truncated TLV header"};
    const auto tag = static_cast<std::uint8_t>(rest[0]);
    const std::size_t len = (static_cast<std::uint8_t>(rest[1]) << 8) |
                            static_cast<std::uint8_t>(rest[2]);
    rest.remove_prefix(3);
    if (rest.size() < len) return Error{Errc::MalformedFrame, "truncated TLV value"};
    std::string value(rest.substr(0, len));
    rest.remove_prefix(len);
    switch (tag) {
      case kTagServiceClass: r.service_class = std::move(value); break;
      case kTagServiceName: r.service_name = std::move(value); break;
      case kTagInputJson: r.input_json = std::move(value); break;
      case kTagMode: r.mode = std::move(value); break;
      default: break;  // unknown tags are skipped
    }
  }
  if (r.service_class.empty() || r.service_name.empty())
    return Error{Errc::MalformedFrame, "legacy request lacks service class or name"};
  return r;
}

}  // namespace osmec::legacy
