#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "osmec/core/result.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

struct VideoAsset {
  std::string video_id;
  std::int64_t size_kb = 0;
  std::uint64_t popularity_count = 0;
  std::string location = "cloud";  // "edge" once resident in the cache
};

/// Edge video cache with a plain hit-count popularity metric. Every lookup
/// (hit or miss) bumps the count; insertion evicts minimum-popularity assets
/// until the new one fits.
class VideoCacheStore {
 public:
  VideoCacheStore(SimEngine& engine, EventLog& log, std::int64_t capacity_kb)
      : engine_(engine), log_(log), capacity_kb_(capacity_kb) {}

  std::int64_t capacity_kb() const { return capacity_kb_; }
  std::int64_t used_kb() const {
    std::int64_t total = 0;
    for (const auto& [id, a] : assets_) {
      if (a.location == "edge") total += a.size_kb;
    }
    return total;
  }

  /// Registers a cloud-resident asset (known but not cached).
  void register_cloud_asset(const std::string& video_id, std::int64_t size_kb) {
    auto& a = assets_[video_id];
    a.video_id = video_id;
    a.size_kb = size_kb;
    if (a.location.empty()) a.location = "cloud";
  }

  Status insert(const std::string& video_id, std::int64_t size_kb) {
    if (size_kb > capacity_kb_)
      return {Errc::AssetTooLarge, video_id + " exceeds cache capacity"};
    while (used_kb() + size_kb > capacity_kb_) evict_one();
    auto& a = assets_[video_id];
    a.video_id = video_id;
    a.size_kb = size_kb;
    a.location = "edge";
    log_.append(engine_.now(), EventKind::CacheInserted, "cache",
                Payload{}.set("video", video_id).set("size_kb", size_kb));
    return Status::success();
  }

  /// hit iff resident at the edge; the lookup itself is the popularity bump.
  bool lookup(const std::string& video_id) {
    const std::uint64_t count = bump(video_id);
    const auto it = assets_.find(video_id);
    const bool hit = it != assets_.end() && it->second.location == "edge";
    log_.append(engine_.now(), hit ? EventKind::CacheHit : EventKind::CacheMiss, "cache",
                Payload{}.set("video", video_id).set("popularity", count));
    return hit;
  }

  /// Monotone hit counter, creating the entry on first sight.
  std::uint64_t bump(const std::string& video_id) {
    auto& a = assets_[video_id];
    if (a.video_id.empty()) {
      a.video_id = video_id;
      a.location = "cloud";
    }
    return ++a.popularity_count;
  }

  std::optional<VideoAsset> asset(const std::string& video_id) const {
    auto it = assets_.find(video_id);
    if (it == assets_.end()) return std::nullopt;
    return it->second;
  }

  /// Residency as the UPF sees it: "edge", "cloud", or unknown.
  std::optional<std::string> locate(const std::string& video_id) const {
    auto it = assets_.find(video_id);
    if (it == assets_.end() || it->second.size_kb == 0) return std::nullopt;
    return it->second.location;
  }

 private:
  void evict_one() {
    const VideoAsset* victim = nullptr;
    for (const auto& [id, a] : assets_) {  // key order breaks popularity ties
      if (a.location != "edge") continue;
      if (!victim || a.popularity_count < victim->popularity_count) victim = &a;
    }
    if (!victim) return;
    log_.append(engine_.now(), EventKind::CacheEvicted, "cache",
                Payload{}
                    .set("video", victim->video_id)
                    .set("popularity", victim->popularity_count));
    assets_[victim->video_id].location = "cloud";
  }

  SimEngine& engine_;
  EventLog& log_;
  std::int64_t capacity_kb_;
  std::map<std::string, VideoAsset> assets_;
};

/// Transmission legs of the high-throughput service.
struct ServeTimes {
  double transmission_time_s = 0.0;
  double compute_time_s = 0.0;
};

inline double edge_transmission_s(double size_mb, double edge_mbps) {
  return size_mb * 8.0 / edge_mbps;
}

inline double cloud_transmission_s(double size_mb, double cloud_mbps, double base_latency_s) {
  return size_mb * 8.0 / cloud_mbps + base_latency_s;
}

}  // namespace osmec
