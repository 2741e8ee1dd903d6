#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "osmec/core/result.hpp"
#include "osmec/mano/resources.hpp"
#include "osmec/mano/state_store.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

enum class PodState { Idle, Assigned, Running, Failed, Terminated };

inline const char* pod_state_name(PodState s) {
  switch (s) {
    case PodState::Idle: return "Idle";
    case PodState::Assigned: return "Assigned";
    case PodState::Running: return "Running";
    case PodState::Failed: return "Failed";
    case PodState::Terminated: return "Terminated";
  }
  return "Failed";
}

/// Smallest unit of deployment and monitoring; runs the containers of one
/// instance. Idle pods carry no containers.
struct Pod {
  std::uint64_t pod_id = 0;
  std::uint64_t node_id = 0;
  PodState state = PodState::Idle;
  std::vector<std::string> containers;
  std::uint64_t instance_id = 0;  // 0 while idle
};

struct Node {
  std::uint64_t node_id = 0;
  ResourceVector capacity;
  ResourceVector free;
  VirtTime last_heartbeat;
  bool alive = true;
  std::vector<std::uint64_t> pod_ids;
  VirtTime script_busy_until;  // sequential-mode start queue head
};

/// Atomic allocation from the node pool. Component flags track the partial
/// release path: cpu (with storage/bandwidth) at completion, memory only on
/// the explicit release.
struct ResourceGrant {
  std::uint64_t grant_id = 0;
  std::uint64_t instance_id = 0;
  std::uint64_t pod_id = 0;
  std::uint64_t node_id = 0;
  ResourceVector amount;
  bool cpu_held = true;
  bool memory_held = true;
  bool other_held = true;

  bool live() const { return cpu_held || memory_held || other_held; }

  ResourceVector held() const {
    ResourceVector v;
    if (cpu_held) v.cpu_millicores = amount.cpu_millicores;
    if (memory_held) v.memory_kb = amount.memory_kb;
    if (other_held) {
      v.storage_kb = amount.storage_kb;
      v.bandwidth_kbps = amount.bandwidth_kbps;
    }
    return v;
  }
};

struct ReleaseComponents {
  bool cpu = false;
  bool memory = false;
  bool other = false;

  static ReleaseComponents all() { return {true, true, true}; }
  static ReleaseComponents cpu_and_other() { return {true, false, true}; }
  static ReleaseComponents memory_only() { return {false, true, false}; }
};

/// Node pool plus the VIM allocator. Resource conservation — for every node,
/// sum of live grant components + free == capacity — holds after every
/// operation and is checkable via audit(). Grant records flow into the state
/// store through the recorder the master node installs.
class Cluster {
 public:
  using StateRecorder = std::function<void(const std::string& key, const std::string& value)>;

  Cluster(SimEngine& engine, EventLog& log) : engine_(engine), log_(log) {}

  void set_state_recorder(StateRecorder recorder) { record_state_ = std::move(recorder); }

  std::uint64_t add_node(const ResourceVector& capacity, int warm_idle_pods = 0) {
    const std::uint64_t id = ++node_counter_;
    Node n;
    n.node_id = id;
    n.capacity = capacity;
    n.free = capacity;
    n.last_heartbeat = engine_.now();
    nodes_[id] = n;
    for (int i = 0; i < warm_idle_pods; ++i) create_pod(id);
    return id;
  }

  std::uint64_t create_pod(std::uint64_t node_id) {
    const std::uint64_t id = ++pod_counter_;
    Pod p;
    p.pod_id = id;
    p.node_id = node_id;
    pods_[id] = p;
    nodes_.at(node_id).pod_ids.push_back(id);
    log_.append(engine_.now(), EventKind::PodCreated, "pod:" + std::to_string(id),
                Payload{}.set("node", node_id));
    return id;
  }

  Node& node(std::uint64_t id) { return nodes_.at(id); }
  const Node& node(std::uint64_t id) const { return nodes_.at(id); }
  Pod& pod(std::uint64_t id) { return pods_.at(id); }
  const Pod& pod(std::uint64_t id) const { return pods_.at(id); }
  bool has_node(std::uint64_t id) const { return nodes_.count(id) != 0; }
  bool has_pod(std::uint64_t id) const { return pods_.count(id) != 0; }
  const std::map<std::uint64_t, Node>& nodes() const { return nodes_; }
  std::map<std::uint64_t, Node>& nodes_mut() { return nodes_; }
  const std::map<std::uint64_t, Pod>& pods() const { return pods_; }
  const std::map<std::uint64_t, ResourceGrant>& grants() const { return grants_; }

  Result<std::uint64_t> allocate(std::uint64_t node_id, const ResourceVector& amount,
                                 std::uint64_t instance_id, std::uint64_t pod_id) {
    if (!amount.non_negative()) return Error{Errc::PreconditionViolated, "negative component"};
    if (amount.is_zero()) return Error{Errc::ZeroRequest, "all-zero allocation rejected"};
    auto it = nodes_.find(node_id);
    if (it == nodes_.end()) return Error{Errc::ClusterExhausted, "no such node"};
    Node& n = it->second;
    if (!amount.fits_within(n.free))
      return Error{Errc::InsufficientResources,
                   "node " + std::to_string(node_id) + " free " + n.free.to_string()};
    n.free -= amount;  // atomic check-and-reserve under the serialized loop
    const std::uint64_t id = ++grant_counter_;
    ResourceGrant g;
    g.grant_id = id;
    g.instance_id = instance_id;
    g.pod_id = pod_id;
    g.node_id = node_id;
    g.amount = amount;
    grants_[id] = g;
    Payload p;
    p.set("grant", id).set("node", node_id).set("instance", instance_id).set("pod", pod_id);
    amount.fill_payload(p);
    log_.append(engine_.now(), EventKind::ResourceGranted, "vim", std::move(p));
    record_grant(g);
    return id;
  }

  /// Partial release; re-releasing a component is an idempotent no-op.
  Status release(std::uint64_t grant_id, ReleaseComponents components) {
    auto it = grants_.find(grant_id);
    if (it == grants_.end()) return {Errc::UnknownGrant, std::to_string(grant_id)};
    ResourceGrant& g = it->second;
    const bool was_cpu = g.cpu_held, was_mem = g.memory_held, was_other = g.other_held;
    Node& n = nodes_.at(g.node_id);
    if (components.cpu && g.cpu_held) {
      g.cpu_held = false;
      n.free.cpu_millicores += g.amount.cpu_millicores;
      log_.append(engine_.now(), EventKind::CpuReleased, "vim",
                  Payload{}
                      .set("grant", grant_id)
                      .set("node", g.node_id)
                      .set("instance", g.instance_id)
                      .set("cpu_mc", g.amount.cpu_millicores));
    }
    if (components.other && g.other_held) {
      g.other_held = false;
      n.free.storage_kb += g.amount.storage_kb;
      n.free.bandwidth_kbps += g.amount.bandwidth_kbps;
      log_.append(engine_.now(), EventKind::OtherReleased, "vim",
                  Payload{}
                      .set("grant", grant_id)
                      .set("node", g.node_id)
                      .set("instance", g.instance_id)
                      .set("sto_kb", g.amount.storage_kb)
                      .set("bw_kbps", g.amount.bandwidth_kbps));
    }
    if (components.memory && g.memory_held) {
      g.memory_held = false;
      n.free.memory_kb += g.amount.memory_kb;
      log_.append(engine_.now(), EventKind::MemoryReleased, "vim",
                  Payload{}
                      .set("grant", grant_id)
                      .set("node", g.node_id)
                      .set("instance", g.instance_id)
                      .set("mem_kb", g.amount.memory_kb));
    }
    if (was_cpu != g.cpu_held || was_mem != g.memory_held || was_other != g.other_held)
      record_grant(g);
    return Status::success();
  }

  ResourceVector in_use(std::uint64_t node_id) const {
    ResourceVector total;
    for (const auto& [id, g] : grants_) {
      if (g.node_id == node_id) total += g.held();
    }
    return total;
  }

  /// Recomputes every node's pool from the grant set and compares with the
  /// tracked free vector and capacity.
  Status audit() const {
    for (const auto& [id, n] : nodes_) {
      const ResourceVector used = in_use(id);
      if (!(used + n.free == n.capacity))
        return {Errc::PreconditionViolated,
                "conservation violated on node " + std::to_string(id) + ": used " + used.to_string() +
                    " free " + n.free.to_string() + " capacity " + n.capacity.to_string()};
    }
    return Status::success();
  }

 private:
  void record_grant(const ResourceGrant& g) {
    if (!record_state_) return;
    std::string value = "{\"instance\":" + std::to_string(g.instance_id) +
                        ",\"pod\":" + std::to_string(g.pod_id) +
                        ",\"node\":" + std::to_string(g.node_id) +
                        ",\"cpu_mc\":" + std::to_string(g.amount.cpu_millicores) +
                        ",\"mem_kb\":" + std::to_string(g.amount.memory_kb) +
                        ",\"cpu_held\":" + (g.cpu_held ? "true" : "false") +
                        ",\"memory_held\":" + (g.memory_held ? "true" : "false") + "}";
    record_state_("/grants/" + std::to_string(g.grant_id), std::move(value));
  }

  SimEngine& engine_;
  EventLog& log_;
  StateRecorder record_state_;
  std::map<std::uint64_t, Node> nodes_;
  std::map<std::uint64_t, Pod> pods_;
  std::map<std::uint64_t, ResourceGrant> grants_;
  std::uint64_t node_counter_ = 0;
  std::uint64_t pod_counter_ = 0;
  std::uint64_t grant_counter_ = 0;
};

/// Start mode for container activation: overlapping startups (container
/// cluster manager) versus one-at-a-time through the node's script queue.
enum class StartMode { Parallel, Sequential };

inline const char* start_mode_name(StartMode m) {
  return m == StartMode::Parallel ? "parallel" : "sequential";
}

inline std::optional<StartMode> start_mode_from(std::string_view s) {
  if (s == "parallel") return StartMode::Parallel;
  if (s == "sequential") return StartMode::Sequential;
  return std::nullopt;
}

/// Node agent: maintains pod lifecycles. Parallel mode overlaps container
/// startups (pod running after the longest); sequential mode funnels every
/// start through the owning node's FIFO script queue.
class Kubelet {
 public:
  Kubelet(SimEngine& engine, EventLog& log, Cluster& cluster)
      : engine_(engine), log_(log), cluster_(cluster) {}

  /// Test hook: the named container fails at its start instant.
  void inject_start_failure(const std::string& container_id) {
    failing_containers_.insert(container_id);
  }

  void run_pod(std::uint64_t pod_id, const std::vector<std::pair<std::string, VirtTime>>& containers,
               StartMode mode, std::function<void(Status)> done) {
    Pod& pod = cluster_.pod(pod_id);
    if (pod.state != PodState::Assigned) {
      done({Errc::PreconditionViolated, "pod not in Assigned state"});
      return;
    }
    if (containers.empty()) {
      done({Errc::PreconditionViolated, "a running pod needs at least one container"});
      return;
    }

    auto progress = std::make_shared<PodStart>();
    progress->remaining = containers.size();
    progress->done = std::move(done);

    Node& node = cluster_.node(pod.node_id);
    VirtTime start_at = engine_.now();
    for (const auto& [container_id, cost] : containers) {
      if (mode == StartMode::Sequential) {
        if (node.script_busy_until < start_at) node.script_busy_until = start_at;
        node.script_busy_until += cost;
        start_at = node.script_busy_until;
      } else {
        start_at = engine_.now() + cost;
      }
      const std::string cid = container_id;
      engine_.schedule_at(start_at, [this, pod_id, cid, mode, progress] {
        finish_container(pod_id, cid, mode, *progress);
      });
    }
  }

 private:
  struct PodStart {
    std::size_t remaining = 0;
    bool failed = false;
    std::function<void(Status)> done;
  };

  void finish_container(std::uint64_t pod_id, const std::string& container_id, StartMode mode,
                        PodStart& progress) {
    if (progress.failed) return;
    Pod& pod = cluster_.pod(pod_id);
    if (failing_containers_.count(container_id)) {
      progress.failed = true;
      pod.state = PodState::Failed;
      log_.append(engine_.now(), EventKind::FaultEvent, "pod:" + std::to_string(pod_id),
                  Payload{}.set("container", container_id).set("reason", "ContainerStartFailure"));
      progress.done({Errc::ContainerStartFailure, container_id});
      return;
    }
    pod.containers.push_back(container_id);
    log_.append(engine_.now(), EventKind::ContainerStarted, "pod:" + std::to_string(pod_id),
                Payload{}
                    .set("container", container_id)
                    .set("instance", pod.instance_id)
                    .set("node", pod.node_id)
                    .set("mode", start_mode_name(mode)));
    if (--progress.remaining == 0) {
      pod.state = PodState::Running;
      progress.done(Status::success());
    }
  }

  SimEngine& engine_;
  EventLog& log_;
  Cluster& cluster_;
  std::set<std::string> failing_containers_;
};

}  // namespace osmec
