#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "osmec/core/text.hpp"
#include "osmec/core/vtime.hpp"

namespace osmec {

/// Trace vocabulary. The request pipeline emits the workflow kinds in order;
/// bus traffic and state-store writes are traced alongside them.
enum class EventKind {
  RequestReceived,
  ProtocolIdentified,
  Converted,
  TemplateSelected,
  ParamsInserted,
  NfResolved,
  ParamsUpdated,
  PodCreated,
  PodAssigned,
  ResourceGranted,
  ContainerStarted,
  InstanceActive,
  ServiceCompleted,
  CpuReleased,
  MemoryReleased,
  OtherReleased,
  InstanceReleased,
  InstanceFailed,
  RequestFailed,
  RemoteImageFetch,
  FaultEvent,
  StateWrite,
  UdmTableCreated,
  UdmInsert,
  UdmUpdate,
  UdmDelete,
  NrfImageStored,
  EndpointRegistered,
  AppRegistered,
  AppSelected,
  CacheInserted,
  CacheHit,
  CacheMiss,
  CacheEvicted,
  EdgeHit,
  CloudForward,
  VideoServed,
  PopularityAnalyzed,
  ChargeRecorded,
  BusSend,
  BusDeliver,
  BusRespond,
};

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::RequestReceived: return "RequestReceived";
    case EventKind::ProtocolIdentified: return "ProtocolIdentified";
    case EventKind::Converted: return "Converted";
    case EventKind::TemplateSelected: return "TemplateSelected";
    case EventKind::ParamsInserted: return "ParamsInserted";
    case EventKind::NfResolved: return "NfResolved";
    case EventKind::ParamsUpdated: return "ParamsUpdated";
    case EventKind::PodCreated: return "PodCreated";
    case EventKind::PodAssigned: return "PodAssigned";
    case EventKind::ResourceGranted: return "ResourceGranted";
    case EventKind::ContainerStarted: return "ContainerStarted";
    case EventKind::InstanceActive: return "InstanceActive";
    case EventKind::ServiceCompleted: return "ServiceCompleted";
    case EventKind::CpuReleased: return "CpuReleased";
    case EventKind::MemoryReleased: return "MemoryReleased";
    case EventKind::OtherReleased: return "OtherReleased";
    case EventKind::InstanceReleased: return "InstanceReleased";
    case EventKind::InstanceFailed: return "InstanceFailed";
    case EventKind::RequestFailed: return "RequestFailed";
    case EventKind::RemoteImageFetch: return "RemoteImageFetch";
    case EventKind::FaultEvent: return "FaultEvent";
    case EventKind::StateWrite: return "StateWrite";
    case EventKind::UdmTableCreated: return "UdmTableCreated";
    case EventKind::UdmInsert: return "UdmInsert";
    case EventKind::UdmUpdate: return "UdmUpdate";
    case EventKind::UdmDelete: return "UdmDelete";
    case EventKind::NrfImageStored: return "NrfImageStored";
    case EventKind::EndpointRegistered: return "EndpointRegistered";
    case EventKind::AppRegistered: return "AppRegistered";
    case EventKind::AppSelected: return "AppSelected";
    case EventKind::CacheInserted: return "CacheInserted";
    case EventKind::CacheHit: return "CacheHit";
    case EventKind::CacheMiss: return "CacheMiss";
    case EventKind::CacheEvicted: return "CacheEvicted";
    case EventKind::EdgeHit: return "EdgeHit";
    case EventKind::CloudForward: return "CloudForward";
    case EventKind::VideoServed: return "VideoServed";
    case EventKind::PopularityAnalyzed: return "PopularityAnalyzed";
    case EventKind::ChargeRecorded: return "ChargeRecorded";
    case EventKind::BusSend: return "BusSend";
    case EventKind::BusDeliver: return "BusDeliver";
    case EventKind::BusRespond: return "BusRespond";
  }
  return "Unknown";
}

inline std::optional<EventKind> event_kind_from_name(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(EventKind::BusRespond); ++i) {
    auto k = static_cast<EventKind>(i);
    if (name == event_kind_name(k)) return k;
  }
  return std::nullopt;
}

/// Ordered key=value payload. Values are sanitized to single tokens.
class Payload {
 public:
  Payload() = default;

  Payload& set(std::string_view key, std::string_view value) {
    fields_.emplace_back(std::string(key), sanitize_token(value));
    return *this;
  }
  Payload& set(std::string_view key, std::int64_t value) {
    return set(key, std::to_string(value));
  }
  Payload& set(std::string_view key, std::uint64_t value) {
    return set(key, std::to_string(value));
  }
  Payload& set(std::string_view key, VirtTime t) { return set(key, t.to_string()); }

  std::optional<std::string_view> get(std::string_view key) const {
    for (const auto& [k, v] : fields_) {
      if (k == key) return std::string_view(v);
    }
    return std::nullopt;
  }

  std::string render() const {
    std::string out;
    for (const auto& [k, v] : fields_) {
      if (!out.empty()) out += ' ';
      out += k;
      out += '=';
      out += v;
    }
    return out;
  }

  static Payload parse(std::string_view text) {
    Payload p;
    if (text.empty()) return p;
    for (auto tok : split(text, ' ')) {
      auto eq = tok.find('=');
      if (eq == std::string_view::npos) continue;
      p.fields_.emplace_back(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
    }
    return p;
  }

  const std::vector<std::pair<std::string, std::string>>& fields() const { return fields_; }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

struct EventRecord {
  std::uint64_t seq = 0;
  VirtTime t;
  EventKind kind = EventKind::RequestReceived;
  std::string subject;
  Payload payload;

  /// Canonical line: seq TAB t TAB kind TAB subject TAB payload
  std::string to_line() const {
    std::string line = std::to_string(seq);
    line += '\t';
    line += t.to_string();
    line += '\t';
    line += event_kind_name(kind);
    line += '\t';
    line += subject.empty() ? "-" : sanitize_token(subject);
    line += '\t';
    line += payload.render();
    return line;
  }

  static std::optional<EventRecord> from_line(std::string_view line) {
    auto parts = split(line, '\t');
    if (parts.size() != 5) return std::nullopt;
    EventRecord r;
    if (!parse_u64(parts[0], r.seq)) return std::nullopt;
    if (!VirtTime::parse(parts[1], r.t)) return std::nullopt;
    auto kind = event_kind_from_name(parts[2]);
    if (!kind) return std::nullopt;
    r.kind = *kind;
    r.subject = parts[3] == "-" ? std::string() : std::string(parts[3]);
    r.payload = Payload::parse(parts[4]);
    return r;
  }
};

/// Append-only trace; seq strictly increases and timestamps never go back.
class EventLog {
 public:
  const EventRecord& append(VirtTime t, EventKind kind, std::string subject, Payload payload) {
    EventRecord r;
    r.seq = ++last_seq_;
    r.t = t;
    r.kind = kind;
    r.subject = std::move(subject);
    r.payload = std::move(payload);
    if (!records_.empty() && r.t < records_.back().t) r.t = records_.back().t;
    records_.push_back(std::move(r));
    return records_.back();
  }

  const std::vector<EventRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  std::string to_text() const {
    std::string out;
    for (const auto& r : records_) {
      out += r.to_line();
      out += '\n';
    }
    return out;
  }

  /// 64-bit FNV-1a over the canonical text.
  std::uint64_t digest() const { return fnv1a64(to_text()); }

  static std::vector<EventRecord> parse_text(std::string_view text) {
    std::vector<EventRecord> out;
    for (auto line : split(text, '\n')) {
      if (line.empty()) continue;
      if (auto r = EventRecord::from_line(line)) out.push_back(std::move(*r));
    }
    return out;
  }

 private:
  std::vector<EventRecord> records_;
  std::uint64_t last_seq_ = 0;
};

}  // namespace osmec
