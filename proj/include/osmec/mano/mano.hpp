#pragma once

#include <json.hpp>

#include <cassert>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "osmec/bus/bus.hpp"
#include "osmec/core/result.hpp"
#include "osmec/mano/cluster.hpp"
#include "osmec/mano/instance.hpp"
#include "osmec/mano/state_store.hpp"
#include "osmec/mano/template.hpp"
#include "osmec/nf/wire.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

/// The only entry to the state store. Every mutation is logged with its
/// origin, so the single-entry rule is checkable from the trace.
class ApiServer {
 public:
  ApiServer(SimEngine& engine, EventLog& log, StateStore& store)
      : engine_(engine), log_(log), store_(store) {}

  std::uint64_t put(const std::string& key, std::string value) {
    const std::uint64_t rev = store_.put(key, std::move(value));
    log_.append(engine_.now(), EventKind::StateWrite, "api-server",
                Payload{}.set("key", key).set("rev", rev).set("origin", "api-server"));
    return rev;
  }

  std::optional<StateRecord> get(const std::string& key) const { return store_.get(key); }
  std::vector<StateRecord> list(const std::string& prefix) const { return store_.list(prefix); }
  std::shared_ptr<StateWatch> watch(const std::string& prefix) { return store_.watch(prefix); }

 private:
  SimEngine& engine_;
  EventLog& log_;
  StateStore& store_;
};

struct ManoConfig {
  VirtTime instantiation_overhead = VirtTime::from_units(1);
  VirtTime heartbeat_interval = VirtTime::from_units(1);
  int liveness_multiplier = 3;
};

/// NF's MANO master node: template registry and selection, the three-step
/// instantiation, VIM bookkeeping, release paths and fault monitoring.
class Mano {
 public:
  /// Brings an APP container online for an instance; returns the endpoint
  /// name it now answers on. Installed by the system wiring.
  using AppActivator = std::function<std::string(const Instance&, const std::string& service_name)>;
  /// Applies any configured startup-cost jitter.
  using CostScaler = std::function<VirtTime(const std::string& container, VirtTime nominal)>;

  Mano(SimEngine& engine, EventLog& log, ServiceBus& bus, Cluster& cluster, Kubelet& kubelet,
       ManoConfig cfg = {})
      : engine_(engine),
        log_(log),
        bus_(bus),
        cluster_(cluster),
        kubelet_(kubelet),
        cfg_(cfg),
        api_(engine, log, store_) {}

  ApiServer& api() { return api_; }
  const ManoConfig& config() const { return cfg_; }
  void set_app_activator(AppActivator fn) { app_activator_ = std::move(fn); }
  void set_cost_scaler(CostScaler fn) { cost_scaler_ = std::move(fn); }

  // ---- template registry ----

  /// Validates, checks dedicated-tier disjointness against the registered
  /// set, creates the attribute table in UDM and loads the predefined rows.
  Status register_template(Template t) {
    if (auto st = validate_template(t); !st.ok()) return st;
    for (const auto& [id, existing] : templates_) {
      if (auto st = validate_disjoint(existing, t); !st.ok()) return st;
    }
    if (templates_.count(t.template_id))
      return {Errc::InvalidTemplate, "duplicate template id " + t.template_id};

    nlohmann::json schema = {{"schema", t.attributes.schema}};
    auto created = bus_.dispatch_now(
        "udm", Message::request(Method::Post, "/sbi/udm/" + t.attributes.table, schema.dump()));
    if (!created.ok()) return created.error();
    if (created.value().status >= 400 && created.value().status != 409)
      return error_from_response(created.value());
    for (const auto& row : t.attributes.rows) {
      nlohmann::json body = {{"row", row}};
      auto ins = bus_.dispatch_now(
          "udm", Message::request(Method::Post, "/sbi/udm/" + t.attributes.table + "/" + row[0],
                                  body.dump()));
      if (!ins.ok()) return ins.error();
    }
    api_.put("/templates/" + t.template_id, template_to_json(t).dump());
    templates_.emplace(t.template_id, std::move(t));
    return Status::success();
  }

  const std::map<std::string, Template>& templates() const { return templates_; }

  Result<const Template*> template_for_class(ServiceClass cls) const {
    for (const auto& [id, t] : templates_) {
      if (t.app_class == cls) return &t;
    }
    return Error{Errc::UnknownServiceClass, service_class_name(cls)};
  }

  // ---- instances ----

  const Instance* instance(std::uint64_t id) const {
    auto it = instances_.find(id);
    return it == instances_.end() ? nullptr : &it->second;
  }
  const std::map<std::uint64_t, Instance>& instances() const { return instances_; }

  /// Template selection (workflow step 3): parameters added to the UDM
  /// table, managed NFs and APPs resolved through NRF, parameters updated.
  /// service_name "*" selects every dedicated APP of the template.
  void select_template(ServiceClass cls, const std::string& service_name, std::uint64_t request_id,
                       std::function<void(Result<std::uint64_t>)> cont) {
    auto tpl_r = template_for_class(cls);
    if (!tpl_r.ok()) {
      cont(tpl_r.error());
      return;
    }
    const Template& tpl = *tpl_r.value();

    std::vector<std::string> apps;
    if (service_name == "*") {
      apps = tpl.dedicated_apps();
    } else {
      const std::string entry = "app:" + service_name;
      const auto dedicated = tpl.dedicated_apps();
      if (std::find(dedicated.begin(), dedicated.end(), entry) == dedicated.end()) {
        cont(Error{Errc::UnknownServiceName,
                   service_name + " is not a " + service_class_name(cls) + " service"});
        return;
      }
      apps = {entry};
    }

    const std::uint64_t iid = ++instance_counter_;
    Instance inst;
    inst.instance_id = iid;
    inst.request_id = request_id;
    inst.template_id = tpl.template_id;
    inst.service_class = cls;
    inst.service_name = service_name;
    inst.containers = apps;
    inst.created_at = engine_.now();
    instances_[iid] = inst;
    put_instance_state(iid);
    if (request_id != 0)
      api_.put("/requests/" + std::to_string(request_id) + "/instance", std::to_string(iid));
    log_.append(engine_.now(), EventKind::TemplateSelected, subject(iid),
                Payload{}
                    .set("template", tpl.template_id)
                    .set("request", request_id)
                    .set("svc", service_name)
                    .set("class", service_class_name(cls)));

    // (3a) predefined parameters for this activation enter the UDM table
    const std::string prefix = "i" + std::to_string(iid);
    insert_param(tpl.attributes.table, prefix + ":svc", service_name);
    insert_param(tpl.attributes.table, prefix + ":phase", "selected");
    log_.append(engine_.now(), EventKind::ParamsInserted, subject(iid),
                Payload{}.set("table", tpl.attributes.table).set("rows", std::int64_t{2}));

    // (3b) resolve the shared managed NFs locally, then the APP images.
    for (const auto& id : tpl.managed_nfs) {
      if (shared_managed_nfs().count(id)) resolve_shared(iid, id);
    }
    resolve_apps(iid, tpl, apps, 0, std::move(cont));
  }

  /// Three-step instantiation: environment configuration, resource
  /// allocation, activation. Any step failure rolls every grant back and
  /// fails the instance.
  void instantiate(std::uint64_t instance_id, StartMode mode, std::function<void(Status)> cont) {
    Instance* inst = find_instance(instance_id);
    if (!inst || inst->state != InstanceState::Selected) {
      cont({Errc::WrongState, "instantiate requires a Selected instance"});
      return;
    }
    engine_.schedule_in(cfg_.instantiation_overhead, [this, instance_id, mode, cont = std::move(cont)] {
      configure_environment(instance_id, mode, cont);
    });
  }

  /// Scheduler step (i): an Idle pod on a node with room, else a fresh pod
  /// on the node with the largest free capacity (ties to the lowest id).
  Result<std::uint64_t> locate_idle_pod(const ResourceVector& requirements,
                                        std::uint64_t instance_id) {
    for (const auto& [pid, pod] : cluster_.pods()) {
      if (pod.state != PodState::Idle) continue;
      const Node& n = cluster_.node(pod.node_id);
      if (n.alive && requirements.fits_within(n.free)) return assign_pod(pid, instance_id);
    }
    const Node* best = nullptr;
    for (const auto& [nid, n] : cluster_.nodes()) {
      if (!n.alive || !requirements.fits_within(n.free)) continue;
      if (!best || n.free.cpu_millicores > best->free.cpu_millicores ||
          (n.free.cpu_millicores == best->free.cpu_millicores &&
           n.free.memory_kb > best->free.memory_kb))
        best = &n;
    }
    if (!best) return Error{Errc::ClusterExhausted, "no node can host " + requirements.to_string()};
    return assign_pod(cluster_.create_pod(best->node_id), instance_id);
  }

  /// Service completion bookkeeping: computing resources return to the pool
  /// immediately; memory stays held until the explicit release.
  Status complete_service(std::uint64_t instance_id) {
    Instance* inst = find_instance(instance_id);
    if (!inst) return {Errc::UnknownInstance, std::to_string(instance_id)};
    if (inst->state != InstanceState::Active)
      return {Errc::WrongState, "completion requires an Active instance"};
    transition(*inst, InstanceState::Completed);
    inst->completed_at = engine_.now();
    for (auto gid : inst->grant_ids) cluster_.release(gid, ReleaseComponents::cpu_and_other());
    asf_deactivate(instance_id);
    transition(*inst, InstanceState::MemoryHeld);
    return Status::success();
  }

  /// Manual memory release; repeating it is a no-op.
  Status release_memory(std::uint64_t instance_id, const std::string& origin) {
    Instance* inst = find_instance(instance_id);
    if (!inst) return {Errc::UnknownInstance, std::to_string(instance_id)};
    if (inst->state == InstanceState::Released) return Status::success();
    if (inst->state != InstanceState::MemoryHeld && inst->state != InstanceState::Completed)
      return {Errc::WrongState, std::string("instance is ") + instance_state_name(inst->state)};
    if (inst->state == InstanceState::Completed) transition(*inst, InstanceState::MemoryHeld);
    for (auto gid : inst->grant_ids) cluster_.release(gid, ReleaseComponents::memory_only());
    transition(*inst, InstanceState::Released);
    inst->released_at = engine_.now();
    if (inst->pod_id != 0) {
      Pod& pod = cluster_.pod(inst->pod_id);
      if (pod.state == PodState::Running) pod.state = PodState::Terminated;
    }
    log_.append(engine_.now(), EventKind::InstanceReleased, subject(instance_id),
                Payload{}.set("origin", origin));
    return Status::success();
  }

  /// Failure path: full rollback of every grant, pod marked failed.
  Status fail_instance(std::uint64_t instance_id, const Error& reason) {
    Instance* inst = find_instance(instance_id);
    if (!inst) return {Errc::UnknownInstance, std::to_string(instance_id)};
    if (inst->state == InstanceState::Released || inst->state == InstanceState::Failed)
      return {Errc::WrongState, "instance already settled"};
    for (auto gid : inst->grant_ids) cluster_.release(gid, ReleaseComponents::all());
    if (inst->pod_id != 0) {
      Pod& pod = cluster_.pod(inst->pod_id);
      if (pod.state != PodState::Terminated) pod.state = PodState::Failed;
    }
    asf_deactivate(instance_id);
    transition(*inst, InstanceState::Failed);
    log_.append(engine_.now(), EventKind::InstanceFailed, subject(instance_id),
                Payload{}.set("error", errc_name(reason.code)).set("detail", reason.detail));
    return Status::success();
  }

  // ---- monitoring ----

  /// Node agents report through the API server. Killed agents (test hook)
  /// stop reporting and their node goes stale.
  void record_heartbeats() {
    for (auto& [nid, node] : cluster_.nodes_mut()) {
      if (!node.alive || dead_agents_.count(nid)) continue;
      node.last_heartbeat = engine_.now();
      api_.put("/nodes/" + std::to_string(nid) + "/heartbeat", engine_.now().to_string());
    }
  }

  void kill_node_agent(std::uint64_t node_id) { dead_agents_.insert(node_id); }

  /// Controller sweep: nodes silent past the liveness window fail, their
  /// pods fail, and affected instances roll back fully.
  std::vector<std::uint64_t> controller_tick() {
    std::vector<std::uint64_t> failed_pods;
    const VirtTime window =
        VirtTime::from_micros(cfg_.heartbeat_interval.micros() * cfg_.liveness_multiplier);
    for (auto& [nid, node] : cluster_.nodes_mut()) {
      if (!node.alive) continue;
      if (engine_.now() - node.last_heartbeat <= window) continue;
      node.alive = false;
      for (auto pid : node.pod_ids) {
        Pod& pod = cluster_.pod(pid);
        if (pod.state == PodState::Terminated || pod.state == PodState::Failed) continue;
        pod.state = PodState::Failed;
        failed_pods.push_back(pid);
        log_.append(engine_.now(), EventKind::FaultEvent, "controller",
                    Payload{}
                        .set("node", nid)
                        .set("pod", pid)
                        .set("instance", pod.instance_id)
                        .set("reason", "heartbeat_lost"));
        if (pod.instance_id != 0) {
          Instance* inst = find_instance(pod.instance_id);
          if (inst && inst->state != InstanceState::Released &&
              inst->state != InstanceState::Failed)
            fail_instance(pod.instance_id, Error{Errc::ContainerStartFailure, "node failure"});
        }
      }
    }
    return failed_pods;
  }

 private:
  std::string subject(std::uint64_t iid) const { return "instance:" + std::to_string(iid); }

  Instance* find_instance(std::uint64_t id) {
    auto it = instances_.find(id);
    return it == instances_.end() ? nullptr : &it->second;
  }

  void transition(Instance& inst, InstanceState to) {
    if (!legal_instance_transition(inst.state, to))
      throw std::logic_error(std::string("illegal instance transition ") +
                             instance_state_name(inst.state) + " -> " + instance_state_name(to));
    inst.state = to;
    put_instance_state(inst.instance_id);
  }

  void put_instance_state(std::uint64_t iid) {
    const Instance& inst = instances_.at(iid);
    api_.put("/instances/" + std::to_string(iid) + "/state", instance_state_name(inst.state));
  }

  void insert_param(const std::string& table, const std::string& key, const std::string& value) {
    nlohmann::json body = {{"row", std::vector<std::string>{key, value}}};
    auto r = bus_.dispatch_now(
        "udm", Message::request(Method::Post, "/sbi/udm/" + table + "/" + key, body.dump()));
    if (r.ok() && r.value().status == 409) {
      bus_.dispatch_now("udm",
                        Message::request(Method::Put, "/sbi/udm/" + table + "/" + key, body.dump()));
    }
  }

  void update_param(const std::string& table, const std::string& key, const std::string& value) {
    nlohmann::json body = {{"row", std::vector<std::string>{key, value}}};
    bus_.dispatch_now("udm",
                      Message::request(Method::Put, "/sbi/udm/" + table + "/" + key, body.dump()));
  }

  std::optional<std::string> read_param(const std::string& table, const std::string& key) {
    auto r = bus_.dispatch_now("udm", Message::request(Method::Get, "/sbi/udm/" + table + "/" + key));
    if (!r.ok() || r.value().status != 200) return std::nullopt;
    auto j = nlohmann::json::parse(r.value().body, nullptr, false);
    if (j.is_discarded() || !j.contains("row") || j["row"].size() < 2) return std::nullopt;
    return j["row"][1].get<std::string>();
  }

  void resolve_shared(std::uint64_t iid, const std::string& nf_id) {
    // shared NFs are already running; confirm presence without an image pull
    Message probe = Message::request(Method::Get, "/sbi/nrf/images/" + nf_id);
    probe.set_header("x-presence-only", "1");
    auto r = bus_.dispatch_now("nrf", std::move(probe));
    std::string source = "local";
    if (r.ok() && r.value().status == 200) {
      auto j = nlohmann::json::parse(r.value().body, nullptr, false);
      if (!j.is_discarded()) source = j.value("source", std::string{"local"});
    }
    log_.append(engine_.now(), EventKind::NfResolved, subject(iid),
                Payload{}.set("nf", nf_id).set("source", source));
  }

  void resolve_apps(std::uint64_t iid, const Template& tpl, std::vector<std::string> apps,
                    std::size_t index, std::function<void(Result<std::uint64_t>)> cont) {
    if (index == apps.size()) {
      finish_selection(iid, tpl, cont);
      return;
    }
    const std::string app_id = app_service_name(apps[index]);
    bus_.request("nrf", Message::request(Method::Get, "/sbi/nrf/images/" + app_id),
                 [this, iid, &tpl, apps = std::move(apps), index,
                  cont = std::move(cont)](Result<Message> r) mutable {
                   if (!r.ok() || r.value().status != 200) {
                     const Error err = r.ok() ? error_from_response(r.value()) : r.error();
                     fail_instance(iid, err);
                     cont(err);
                     return;
                   }
                   auto j = nlohmann::json::parse(r.value().body, nullptr, false);
                   log_.append(engine_.now(), EventKind::NfResolved, subject(iid),
                               Payload{}
                                   .set("nf", "app:" + app_service_name(apps[index]))
                                   .set("source", j.is_discarded()
                                                      ? "remote"
                                                      : j.value("source", std::string{"remote"})));
                   resolve_apps(iid, tpl, std::move(apps), index + 1, std::move(cont));
                 });
  }

  void finish_selection(std::uint64_t iid, const Template& tpl,
                        const std::function<void(Result<std::uint64_t>)>& cont) {
    Instance& inst = *find_instance(iid);
    if (!inst.is_template_level()) {
      const std::string key = "svc:" + inst.service_name;
      auto read_num = [&](const std::string& field, double fallback) {
        auto v = read_param(tpl.attributes.table, key + ":" + field);
        if (!v) return fallback;
        try {
          return std::stod(*v);
        } catch (...) {
          return fallback;
        }
      };
      inst.spec.cpu_millicores = static_cast<std::int64_t>(
          read_num("cpu_mc", static_cast<double>(tpl.resource_profile.cpu_millicores)));
      inst.spec.memory_mb =
          read_num("mem_mb", static_cast<double>(tpl.resource_profile.memory_kb) / 1000.0);
      inst.spec.work_units = read_num("work", 100.0);
      inst.spec.image_mb = read_num("image_mb", 0.0);
    }

    // (3c) parameter update closes the selection
    const std::string prefix = "i" + std::to_string(iid);
    update_param(tpl.attributes.table, prefix + ":phase", "nf_resolved");
    log_.append(engine_.now(), EventKind::ParamsUpdated, subject(iid),
                Payload{}.set("table", tpl.attributes.table).set("phase", "nf_resolved"));
    cont(iid);
  }

  ResourceVector grant_requirements(const Instance& inst, const Template& tpl) const {
    ResourceVector req = tpl.resource_profile;
    if (!inst.is_template_level()) {
      if (inst.spec.cpu_millicores > 0) req.cpu_millicores = inst.spec.cpu_millicores;
      if (inst.spec.memory_mb > 0) req.memory_kb = std::llround(inst.spec.memory_mb * 1000.0);
    }
    return req;
  }

  Result<std::uint64_t> assign_pod(std::uint64_t pod_id, std::uint64_t instance_id) {
    Pod& pod = cluster_.pod(pod_id);
    pod.state = PodState::Assigned;
    pod.instance_id = instance_id;
    nlohmann::json record = {{"node", pod.node_id},
                             {"instance", instance_id},
                             {"state", pod_state_name(pod.state)}};
    api_.put("/pods/" + std::to_string(pod_id), record.dump());
    log_.append(engine_.now(), EventKind::PodAssigned, "pod:" + std::to_string(pod_id),
                Payload{}.set("node", pod.node_id).set("instance", instance_id));
    return pod_id;
  }

  void configure_environment(std::uint64_t instance_id, StartMode mode,
                             const std::function<void(Status)>& cont) {
    Instance& inst = *find_instance(instance_id);
    const Template& tpl = templates_.at(inst.template_id);
    const ResourceVector req = grant_requirements(inst, tpl);

    // step 1: environment configuration
    auto pod = locate_idle_pod(req, instance_id);
    if (!pod.ok()) {
      fail_instance(instance_id, pod.error());
      cont(pod.error());
      return;
    }
    inst.pod_id = pod.value();
    transition(inst, InstanceState::Configured);

    // step 2: resource allocation
    auto grant = cluster_.allocate(cluster_.pod(inst.pod_id).node_id, req, instance_id, inst.pod_id);
    if (!grant.ok()) {
      fail_instance(instance_id, grant.error());
      cont(grant.error());
      return;
    }
    inst.grant_ids.push_back(grant.value());
    transition(inst, InstanceState::ResourcesAllocated);

    // step 3: activation
    std::vector<std::pair<std::string, VirtTime>> containers;
    for (const auto& entry : inst.containers) {
      VirtTime cost = tpl.container_cost(entry);
      if (cost_scaler_) cost = cost_scaler_(entry, cost);
      containers.emplace_back(entry + "#" + std::to_string(instance_id), cost);
    }
    kubelet_.run_pod(inst.pod_id, containers, mode, [this, instance_id, mode, cont](Status st) {
      Instance* current = find_instance(instance_id);
      if (!current || current->state != InstanceState::ResourcesAllocated) {
        // failed from the outside (e.g. controller fault sweep) mid-startup
        cont({Errc::WrongState, "instance no longer awaiting activation"});
        return;
      }
      if (!st.ok()) {
        fail_instance(instance_id, st.error());
        cont(st);
        return;
      }
      activate_instance(instance_id, mode);
      cont(Status::success());
    });
  }

  void activate_instance(std::uint64_t instance_id, StartMode mode) {
    Instance& inst = *find_instance(instance_id);
    for (const auto& entry : inst.containers) {
      const std::string svc = app_service_name(entry);
      std::string endpoint;
      if (app_activator_) endpoint = app_activator_(inst, svc);
      if (!endpoint.empty()) {
        nlohmann::json body = {{"service_class", service_class_name(inst.service_class)},
                               {"service_name", svc},
                               {"instance", instance_id},
                               {"endpoint", endpoint}};
        bus_.dispatch_now("asf",
                          Message::request(Method::Post, "/sbi/asf/instances", body.dump()));
      }
    }
    transition(inst, InstanceState::Active);
    inst.active_at = engine_.now();
    log_.append(engine_.now(), EventKind::InstanceActive, subject(instance_id),
                Payload{}
                    .set("request", inst.request_id)
                    .set("template", inst.template_id)
                    .set("svc", inst.service_name)
                    .set("mode", start_mode_name(mode)));
  }

  void asf_deactivate(std::uint64_t instance_id) {
    if (!bus_.has_endpoint("asf")) return;
    bus_.dispatch_now("asf", Message::request(Method::Delete,
                                              "/sbi/asf/instances/" + std::to_string(instance_id)));
  }

  SimEngine& engine_;
  EventLog& log_;
  ServiceBus& bus_;
  Cluster& cluster_;
  Kubelet& kubelet_;
  ManoConfig cfg_;
  StateStore store_;
  ApiServer api_;
  std::map<std::string, Template> templates_;
  std::map<std::uint64_t, Instance> instances_;
  std::set<std::uint64_t> dead_agents_;
  std::uint64_t instance_counter_ = 0;
  AppActivator app_activator_;
  CostScaler cost_scaler_;
};

}  // namespace osmec
