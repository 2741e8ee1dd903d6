#pragma once

#include <optional>
#include <string>
#include <vector>

namespace osmec::scenarios {

/// Bundled scenario documents. Each reproduces one of the measurement
/// shapes; `osmec run --scenario <name>` accepts these names or a file path.

inline const char* fig7_1() {
  // Instantiation duration, both start modes. Each repetition submits the
  // three computation-intensive services plus one video request at the same
  // instant; sequential mode funnels all container starts through the node's
  // script queue.
  return R"JSON({
  "name": "fig7_1",
  "seed": 71,
  "nodes": [{"capacity": {"cpu": 16000, "memory": 65536, "storage": 200000, "bandwidth": 10000}}],
  "heartbeat_interval_s": 5,
  "cost_jitter_pct": 10,
  "videos": [{"video_id": "v_bench", "size_mb": 100, "location": "edge"}],
  "requests": [
    {"t": 0, "service_class": "intensive_computation", "service_name": "sum", "input": {"n": 1000}, "mode": "parallel", "repeat": 1000, "every": 30},
    {"t": 0, "service_class": "intensive_computation", "service_name": "prime_sum", "input": {"n": 1000}, "mode": "parallel", "repeat": 1000, "every": 30},
    {"t": 0, "service_class": "intensive_computation", "service_name": "face_recognition", "input": {"blob_id": "cam-0", "size_mb": 5}, "mode": "parallel", "repeat": 1000, "every": 30},
    {"t": 0, "service_class": "high_throughput", "service_name": "video_cache", "input": {"video_id": "v_bench"}, "mode": "parallel", "repeat": 1000, "every": 30},
    {"t": 40000, "service_class": "intensive_computation", "service_name": "sum", "input": {"n": 1000}, "mode": "sequential", "repeat": 1000, "every": 30},
    {"t": 40000, "service_class": "intensive_computation", "service_name": "prime_sum", "input": {"n": 1000}, "mode": "sequential", "repeat": 1000, "every": 30},
    {"t": 40000, "service_class": "intensive_computation", "service_name": "face_recognition", "input": {"blob_id": "cam-0", "size_mb": 5}, "mode": "sequential", "repeat": 1000, "every": 30},
    {"t": 40000, "service_class": "high_throughput", "service_name": "video_cache", "input": {"video_id": "v_bench"}, "mode": "sequential", "repeat": 1000, "every": 30}
  ],
  "manual_releases": [{"instance": "all", "after_completion": 1.0}]
})JSON";
}

inline const char* fig7_2() {
  // Computing-time comparison of the three computation-intensive services.
  return R"JSON({
  "name": "fig7_2",
  "seed": 72,
  "nodes": [{"capacity": {"cpu": 16000, "memory": 65536, "storage": 200000, "bandwidth": 10000}}],
  "heartbeat_interval_s": 5,
  "cost_jitter_pct": 10,
  "requests": [
    {"t": 0, "service_class": "intensive_computation", "service_name": "sum", "input": {"n": 1000}, "mode": "parallel", "repeat": 1000, "every": 15},
    {"t": 0, "service_class": "intensive_computation", "service_name": "prime_sum", "input": {"n": 1000}, "mode": "parallel", "repeat": 1000, "every": 15},
    {"t": 0, "service_class": "intensive_computation", "service_name": "face_recognition", "input": {"blob_id": "cam-1", "size_mb": 5}, "mode": "parallel", "repeat": 1000, "every": 15}
  ],
  "manual_releases": [{"instance": "all", "after_completion": 1.0}]
})JSON";
}

inline const char* fig8() {
  // CPU/memory release asymmetry: prime sum, then face recognition; memory
  // is handed back by the scripted manual release 2 s after each completion.
  return R"JSON({
  "name": "fig8",
  "seed": 8,
  "nodes": [{"capacity": {"cpu": 8000, "memory": 32768, "storage": 100000, "bandwidth": 1000}}],
  "requests": [
    {"t": 0, "service_class": "intensive_computation", "service_name": "prime_sum", "input": {"n": 10}, "mode": "parallel"},
    {"t": 100, "service_class": "intensive_computation", "service_name": "face_recognition", "input": {"blob_id": "portrait-1", "size_mb": 5}, "mode": "parallel"}
  ],
  "manual_releases": [
    {"instance": "svc:prime_sum", "after_completion": 2.0},
    {"instance": "svc:face_recognition", "after_completion": 2.0}
  ]
})JSON";
}

inline const char* fig9() {
  // Transmission/computing time for the high-throughput service across
  // video sizes, edge-cached versus cloud-resident.
  return R"JSON({
  "name": "fig9",
  "seed": 9,
  "nodes": [{"capacity": {"cpu": 8000, "memory": 32768, "storage": 100000, "bandwidth": 1000}}],
  "cache_capacity_mb": 1000,
  "videos": [
    {"video_id": "v100e", "size_mb": 100, "location": "edge"},
    {"video_id": "v200e", "size_mb": 200, "location": "edge"},
    {"video_id": "v400e", "size_mb": 400, "location": "edge"},
    {"video_id": "v100c", "size_mb": 100, "location": "cloud"},
    {"video_id": "v200c", "size_mb": 200, "location": "cloud"},
    {"video_id": "v400c", "size_mb": 400, "location": "cloud"}
  ],
  "requests": [
    {"t": 0,  "service_class": "high_throughput", "service_name": "video_cache", "input": {"video_id": "v100e"}, "mode": "parallel"},
    {"t": 20, "service_class": "high_throughput", "service_name": "video_cache", "input": {"video_id": "v100c"}, "mode": "parallel"},
    {"t": 40, "service_class": "high_throughput", "service_name": "video_cache", "input": {"video_id": "v200e"}, "mode": "parallel"},
    {"t": 60, "service_class": "high_throughput", "service_name": "video_cache", "input": {"video_id": "v200c"}, "mode": "parallel"},
    {"t": 80, "service_class": "high_throughput", "service_name": "video_cache", "input": {"video_id": "v400e"}, "mode": "parallel"},
    {"t": 100, "service_class": "high_throughput", "service_name": "video_cache", "input": {"video_id": "v400c"}, "mode": "parallel"}
  ],
  "manual_releases": [{"instance": "all", "after_completion": 1.0}]
})JSON";
}

inline std::optional<std::string> bundled(const std::string& name) {
  if (name == "fig7_1") return fig7_1();
  if (name == "fig7_2") return fig7_2();
  if (name == "fig8") return fig8();
  if (name == "fig9") return fig9();
  return std::nullopt;
}

inline std::vector<std::string> bundled_names() { return {"fig7_1", "fig7_2", "fig8", "fig9"}; }

}  // namespace osmec::scenarios
