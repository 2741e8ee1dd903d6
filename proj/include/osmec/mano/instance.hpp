#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osmec/core/vtime.hpp"
#include "osmec/mano/template.hpp"

namespace osmec {

/// Instance lifecycle. Forward path:
///   Selected -> Configured -> ResourcesAllocated -> Active -> Completed
///   -> MemoryHeld -> Released
/// plus any pre-Released state -> Failed.
enum class InstanceState {
  Selected,
  Configured,
  ResourcesAllocated,
  Active,
  Completed,
  MemoryHeld,
  Released,
  Failed,
};

inline const char* instance_state_name(InstanceState s) {
  switch (s) {
    case InstanceState::Selected: return "Selected";
    case InstanceState::Configured: return "Configured";
    case InstanceState::ResourcesAllocated: return "ResourcesAllocated";
    case InstanceState::Active: return "Active";
    case InstanceState::Completed: return "Completed";
    case InstanceState::MemoryHeld: return "MemoryHeld";
    case InstanceState::Released: return "Released";
    case InstanceState::Failed: return "Failed";
  }
  return "Failed";
}

inline bool legal_instance_transition(InstanceState from, InstanceState to) {
  if (to == InstanceState::Failed)
    return from != InstanceState::Released && from != InstanceState::Failed;
  switch (from) {
    case InstanceState::Selected: return to == InstanceState::Configured;
    case InstanceState::Configured: return to == InstanceState::ResourcesAllocated;
    case InstanceState::ResourcesAllocated: return to == InstanceState::Active;
    case InstanceState::Active: return to == InstanceState::Completed;
    case InstanceState::Completed: return to == InstanceState::MemoryHeld;
    case InstanceState::MemoryHeld: return to == InstanceState::Released;
    default: return false;
  }
}

/// Per-service runtime numbers resolved from the template's UDM attributes
/// during selection.
struct ServiceSpec {
  std::int64_t cpu_millicores = 0;
  double memory_mb = 0.0;
  double work_units = 0.0;
  double image_mb = 0.0;  // face recognition upload size
};

/// A live, resource-bearing activation of a template. service_name "*" marks
/// a template-level activation of every dedicated APP (the instantiation
/// measurement path).
struct Instance {
  std::uint64_t instance_id = 0;
  std::uint64_t request_id = 0;
  std::string template_id;
  ServiceClass service_class = ServiceClass::IntensiveComputation;
  std::string service_name;
  InstanceState state = InstanceState::Selected;
  std::uint64_t pod_id = 0;  // 0 = none yet
  std::vector<std::uint64_t> grant_ids;
  std::vector<std::string> containers;
  ServiceSpec spec;
  VirtTime created_at;
  VirtTime active_at;
  VirtTime completed_at;
  VirtTime released_at;

  bool is_template_level() const { return service_name == "*"; }
};

}  // namespace osmec
