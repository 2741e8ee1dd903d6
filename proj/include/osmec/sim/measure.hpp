#pragma once

#include <optional>

#include "osmec/core/result.hpp"
#include "osmec/sim/metrics.hpp"
#include "osmec/system.hpp"

namespace osmec {

/// Instantiation micro-measurement: a fresh single-node system with zero hop
/// latency and zero image-fetch delay activates every dedicated APP of the
/// template at once, so the duration from RequestReceived to InstanceActive
/// is exactly max(container costs) + overhead in parallel mode and
/// sum(costs) + overhead in sequential mode.
inline Result<VirtTime> measure_instantiation(const Template& tpl, StartMode mode,
                                              VirtTime overhead = VirtTime::from_units(1)) {
  SystemConfig cfg;
  cfg.nodes.push_back(NodeSpec{ResourceVector::of(1'000'000, 1'000'000, 1'000'000, 1'000'000), 0});
  cfg.builtin_templates = false;
  cfg.extra_templates = {tpl};
  cfg.remote_fetch_delay = VirtTime::zero();
  cfg.hop_latency = VirtTime::zero();
  cfg.instantiation_overhead = overhead;
  cfg.cost_jitter_pct = 0.0;
  EdgeSystem system(cfg);

  const std::uint64_t rid = system.submit_request(
      "measure", "http", service_class_name(tpl.app_class), "*", nlohmann::json::object(), mode,
      VirtTime::zero());
  system.run();

  const auto* rec = system.request(rid);
  if (!rec || rec->outcome != RequestOutcome::Completed)
    return Error{Errc::PreconditionViolated,
                 rec ? "instantiation failed: " + rec->error : "request lost"};

  std::optional<VirtTime> received, active;
  for (const auto& r : system.log().records()) {
    if (r.kind == EventKind::RequestReceived && r.subject == "request:" + std::to_string(rid))
      received = r.t;
    if (r.kind == EventKind::InstanceActive && !active) active = r.t;
  }
  if (!received || !active) return Error{Errc::PreconditionViolated, "trace incomplete"};
  return *active - *received;
}

}  // namespace osmec
