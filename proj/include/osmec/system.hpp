#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "osmec/bus/bus.hpp"
#include "osmec/bus/router.hpp"
#include "osmec/core/random.hpp"
#include "osmec/core/result.hpp"
#include "osmec/mano/cluster.hpp"
#include "osmec/mano/mano.hpp"
#include "osmec/mano/template.hpp"
#include "osmec/nf/asf.hpp"
#include "osmec/nf/cpcf.hpp"
#include "osmec/nf/descriptor.hpp"
#include "osmec/nf/legacy.hpp"
#include "osmec/nf/nrf.hpp"
#include "osmec/nf/srf.hpp"
#include "osmec/nf/udm.hpp"
#include "osmec/nf/upf.hpp"
#include "osmec/nf/wire.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"
#include "osmec/workloads/charging.hpp"
#include "osmec/workloads/compute.hpp"
#include "osmec/workloads/video.hpp"

namespace osmec {

struct VideoSpec {
  std::string video_id;
  double size_mb = 0.0;
  std::string location = "edge";
};

struct NodeSpec {
  ResourceVector capacity;
  int warm_idle_pods = 0;
};

struct SystemConfig {
  std::uint64_t seed = 1;
  std::vector<NodeSpec> nodes;  // one default node when empty
  double edge_mbps = 800.0;
  double cloud_mbps = 200.0;
  double cloud_base_latency_s = 0.05;
  double uplink_mbps = 100.0;
  VirtTime hop_latency = VirtTime::zero();
  std::optional<VirtTime> bus_deadline;
  VirtTime remote_fetch_delay = VirtTime::from_units(50);
  VirtTime instantiation_overhead = VirtTime::from_units(1);
  VirtTime heartbeat_interval = VirtTime::from_units(1);
  int liveness_multiplier = 3;
  double cost_jitter_pct = 0.0;
  double cache_capacity_mb = 1000.0;
  std::vector<VideoSpec> videos;
  bool builtin_templates = true;
  std::vector<Template> extra_templates;
};

enum class RequestOutcome { InFlight, Completed, Failed };

struct ServiceRequestRecord {
  std::uint64_t request_id = 0;
  std::string origin;  // cli | scenario | ebi
  std::string protocol = "http";
  std::string service_class;
  std::string service_name;
  nlohmann::json input;
  StartMode mode = StartMode::Parallel;
  RequestOutcome outcome = RequestOutcome::InFlight;
  std::uint64_t instance_id = 0;
  std::string result;
  std::string error;
  VirtTime submitted_at;
  VirtTime finished_at;
};

/// A release scripted against future completions.
struct ReleaseTrigger {
  std::string selector;  // "all", "svc:<name>" or "instance:<id>"
  VirtTime delay;
  std::string origin = "scenario";
};

/// One simulated edge server: the bus, the six service NFs, NF's MANO, the
/// application workloads and the request pipeline that threads a service
/// request from protocol identification to completion.
class EdgeSystem {
 public:
  explicit EdgeSystem(SystemConfig cfg)
      : cfg_(std::move(cfg)),
        rng_(cfg_.seed),
        bus_(engine_, log_, BusConfig{cfg_.hop_latency, cfg_.bus_deadline}),
        udm_(engine_, log_),
        nrf_(engine_, log_, cfg_.remote_fetch_delay),
        srf_(engine_, log_, bus_),
        asf_(engine_, log_),
        upf_(engine_, log_),
        cluster_(engine_, log_),
        kubelet_(engine_, log_, cluster_),
        cache_(engine_, log_, std::llround(cfg_.cache_capacity_mb * 1000.0)),
        mano_(engine_, log_, bus_, cluster_, kubelet_,
              ManoConfig{cfg_.instantiation_overhead, cfg_.heartbeat_interval,
                         cfg_.liveness_multiplier}) {
    boot();
  }

  SimEngine& engine() { return engine_; }
  EventLog& log() { return log_; }
  const EventLog& log() const { return log_; }
  ServiceBus& bus() { return bus_; }
  Udm& udm() { return udm_; }
  Nrf& nrf() { return nrf_; }
  Srf& srf() { return srf_; }
  Asf& asf() { return asf_; }
  Upf& upf() { return upf_; }
  Cluster& cluster() { return cluster_; }
  Kubelet& kubelet() { return kubelet_; }
  Mano& mano() { return mano_; }
  VideoCacheStore& cache() { return cache_; }
  const SystemConfig& config() const { return cfg_; }

  void run() { engine_.run(); }

  // ---- request entry ----

  /// Builds the unified request body understood by /ebi/mano/requests.
  static nlohmann::json make_request_body(const std::string& service_class,
                                          const std::string& service_name,
                                          const nlohmann::json& input, StartMode mode) {
    return nlohmann::json{{"service_class", service_class},
                          {"service_name", service_name},
                          {"input", input},
                          {"mode", start_mode_name(mode)}};
  }

  /// Raw user bytes for either protocol, as a user device would emit them.
  std::string encode_user_payload(const std::string& protocol, const std::string& service_class,
                                  const std::string& service_name, const nlohmann::json& input,
                                  StartMode mode, std::uint64_t request_id) const {
    if (protocol == "legacy") {
      legacy::LegacyRequest lr;
      lr.service_class = service_class;
      lr.service_name = service_name;
      lr.input_json = input.dump();
      lr.mode = start_mode_name(mode);
      return legacy::encode(lr);
    }
    Message m = Message::request(Method::Post, "/ebi/mano/requests",
                                 make_request_body(service_class, service_name, input, mode).dump());
    m.set_header("x-request-id", std::to_string(request_id));
    return sbm::serialize(m);
  }

  /// Schedules a service request at virtual time `at`; returns its id.
  std::uint64_t submit_request(const std::string& origin, const std::string& protocol,
                               const std::string& service_class, const std::string& service_name,
                               nlohmann::json input, StartMode mode, VirtTime at) {
    const std::uint64_t rid = ++request_counter_;
    ServiceRequestRecord rec;
    rec.request_id = rid;
    rec.origin = origin;
    rec.protocol = protocol;
    rec.service_class = service_class;
    rec.service_name = service_name;
    rec.input = std::move(input);
    rec.mode = mode;
    rec.submitted_at = at;
    requests_[rid] = std::move(rec);
    ++inflight_;
    engine_.schedule_at(at, [this, rid] { ingest(rid); });
    return rid;
  }

  /// Raw-bytes entry used by tests poking at the CPCF surface directly.
  std::uint64_t submit_raw(const std::string& origin, std::string payload, VirtTime at) {
    const std::uint64_t rid = ++request_counter_;
    ServiceRequestRecord rec;
    rec.request_id = rid;
    rec.origin = origin;
    rec.protocol = "raw";
    rec.submitted_at = at;
    requests_[rid] = std::move(rec);
    ++inflight_;
    engine_.schedule_at(at, [this, rid, payload = std::move(payload)] { ingest_raw(rid, payload); });
    return rid;
  }

  const ServiceRequestRecord* request(std::uint64_t id) const {
    auto it = requests_.find(id);
    return it == requests_.end() ? nullptr : &it->second;
  }
  const std::map<std::uint64_t, ServiceRequestRecord>& requests() const { return requests_; }

  // ---- releases ----

  void schedule_release(std::uint64_t instance_id, VirtTime at, const std::string& origin) {
    engine_.schedule_at(at, [this, instance_id, origin] {
      mano_.release_memory(instance_id, origin);
    });
  }

  void add_release_trigger(ReleaseTrigger trigger) { triggers_.push_back(std::move(trigger)); }

  // ---- workload operations exposed for direct use ----

  struct ServeOutcome {
    std::string served_from;  // edge | cloud
    double transmission_time_s = 0.0;
    double compute_time_s = 0.0;
    double size_mb = 0.0;
  };

  Result<ServeOutcome> serve_video(const std::string& video_id, double size_mb) {
    const bool hit = cache_.lookup(video_id);
    auto route = upf_.route(video_id, std::nullopt);
    if (!route.ok()) return route.error();
    ServeOutcome out;
    out.size_mb = size_mb;
    if (hit) {
      out.served_from = "edge";
      out.transmission_time_s = edge_transmission_s(size_mb, cfg_.edge_mbps);
      out.compute_time_s = video_param("serve_compute_edge_s", 0.13);
    } else {
      out.served_from = "cloud";
      out.transmission_time_s =
          cloud_transmission_s(size_mb, cfg_.cloud_mbps, cfg_.cloud_base_latency_s);
      out.compute_time_s = video_param("serve_compute_cloud_s", 0.15);
    }
    Payload p;
    p.set("video", video_id)
        .set("size_mb", double_to_string(size_mb))
        .set("from", out.served_from)
        .set("tx_s", double_to_string(out.transmission_time_s))
        .set("compute_s", double_to_string(out.compute_time_s));
    log_.append(engine_.now(), EventKind::VideoServed, "app:video_cache", std::move(p));
    return out;
  }

  /// Charging record per the template's rates; the instance must have
  /// completed.
  Result<ChargingRecord> charge(std::uint64_t instance_id, double cpu_work, double memory_mb_time) {
    const Instance* inst = mano_.instance(instance_id);
    if (!inst) return Error{Errc::UnknownInstance, std::to_string(instance_id)};
    if (inst->state != InstanceState::Completed && inst->state != InstanceState::MemoryHeld &&
        inst->state != InstanceState::Released)
      return Error{Errc::InstanceNotCompleted, instance_state_name(inst->state)};
    const auto& tpl = mano_.templates().at(inst->template_id);
    const double rate_cpu = attr_number(tpl.attributes.table, "rate_cpu", 1.0);
    const double rate_mem = attr_number(tpl.attributes.table, "rate_mem", 1.0);
    ChargingRecord rec = make_charging_record(instance_id, cpu_work, memory_mb_time, rate_cpu, rate_mem);
    nlohmann::json body = {{"row",
                            std::vector<std::string>{std::to_string(instance_id),
                                                     double_to_string(rec.cpu_work_consumed),
                                                     double_to_string(rec.memory_mb_time),
                                                     double_to_string(rec.cost)}}};
    auto ins = bus_.dispatch_now("udm", Message::request(
                                            Method::Post,
                                            "/sbi/udm/charging/" + std::to_string(instance_id),
                                            body.dump()));
    if (!ins.ok()) return ins.error();
    if (ins.value().status >= 400) return error_from_response(ins.value());
    log_.append(engine_.now(), EventKind::ChargeRecorded, "instance:" + std::to_string(instance_id),
                Payload{}
                    .set("cpu_work", double_to_string(rec.cpu_work_consumed))
                    .set("mem_mb_time", double_to_string(rec.memory_mb_time))
                    .set("cost", double_to_string(rec.cost)));
    return rec;
  }

  bool quiescent() const { return inflight_ == 0; }

 private:
  // ---- boot ----

  void boot() {
    for (const auto& spec : cfg_.nodes) cluster_.add_node(spec.capacity, spec.warm_idle_pods);
    if (cfg_.nodes.empty()) cluster_.add_node(ResourceVector::of(16000, 65536, 200000, 10000), 0);

    bus_.register_endpoint("udm", udm_.make_handler());
    bus_.register_endpoint("nrf", nrf_.make_handler());
    bus_.register_endpoint("srf", srf_.make_handler());
    bus_.register_endpoint("asf", asf_.make_handler());
    bus_.register_endpoint("upf", upf_.make_handler());
    bus_.register_endpoint("cpcf", make_cpcf_handler());
    bus_.register_endpoint("mano", make_mano_handler());

    // system tables
    udm_.create_table(Srf::kAppsTable,
                      {"app_id", "udm_table", "image_location", "access_endpoint", "registered_at"});
    udm_.create_table("charging", {"instance_id", "cpu_work", "mem_mb_time", "cost"});

    // shared NF images use local storage; ASF is remote-class
    for (auto kind : {NfKind::Udm, NfKind::Nrf, NfKind::Srf, NfKind::Cpcf, NfKind::Upf}) {
      nrf_.store_image(NfDescriptor::make(to_lower_ascii(nf_kind_name(kind)), kind));
    }
    nrf_.store_image(NfDescriptor::make("asf", NfKind::Asf));

    // VIM grants live in the state store, entered through the API server
    cluster_.set_state_recorder(
        [this](const std::string& key, const std::string& value) { mano_.api().put(key, value); });

    mano_.set_app_activator([this](const Instance& inst, const std::string& svc) {
      return activate_app_endpoint(inst, svc);
    });
    mano_.set_cost_scaler([this](const std::string&, VirtTime nominal) {
      if (cfg_.cost_jitter_pct <= 0.0) return nominal;
      return VirtTime::from_micros(
          std::llround(static_cast<double>(nominal.micros()) * rng_.jitter_factor(cfg_.cost_jitter_pct)));
    });

    if (cfg_.builtin_templates) {
      mano_.register_template(builtin_intensive_template());
      mano_.register_template(builtin_high_throughput_template());
    }
    for (const auto& t : cfg_.extra_templates) mano_.register_template(t);

    // SRF registers every dedicated APP of every template
    for (const auto& [id, tpl] : mano_.templates()) {
      for (const auto& entry : tpl.dedicated_apps()) {
        srf_.register_app(NfDescriptor::make(app_service_name(entry), NfKind::App),
                          tpl.attributes.table);
      }
    }

    upf_.set_content_locator([this](const std::string& id) { return cache_.locate(id); });
    for (const auto& v : cfg_.videos) {
      const std::int64_t kb = std::llround(v.size_mb * 1000.0);
      if (v.location == "edge") {
        cache_.insert(v.video_id, kb);
      } else {
        cache_.register_cloud_asset(v.video_id, kb);
      }
    }
  }

  // ---- pipeline ----

  void ingest(std::uint64_t rid) {
    ServiceRequestRecord& rec = requests_.at(rid);
    log_.append(engine_.now(), EventKind::RequestReceived, "request:" + std::to_string(rid),
                Payload{}
                    .set("origin", rec.origin)
                    .set("svc", rec.service_name)
                    .set("class", rec.service_class)
                    .set("protocol", rec.protocol)
                    .set("mode", start_mode_name(rec.mode)));
    ensure_pulse();
    const std::string payload = encode_user_payload(rec.protocol, rec.service_class,
                                                    rec.service_name, rec.input, rec.mode, rid);
    send_to_cpcf(rid, payload);
  }

  void ingest_raw(std::uint64_t rid, const std::string& payload) {
    log_.append(engine_.now(), EventKind::RequestReceived, "request:" + std::to_string(rid),
                Payload{}
                    .set("origin", requests_.at(rid).origin)
                    .set("protocol", "raw")
                    .set("bytes", static_cast<std::int64_t>(payload.size())));
    ensure_pulse();
    send_to_cpcf(rid, payload);
  }

  void send_to_cpcf(std::uint64_t rid, const std::string& payload) {
    Message ingest = Message::request(Method::Post, "/sbi/cpcf/ingest", payload);
    ingest.set_header("x-request-id", std::to_string(rid));
    bus_.request("cpcf", std::move(ingest), [this, rid](Result<Message> r) {
      if (!r.ok()) {
        fail_request(rid, r.error());
        return;
      }
      if (r.value().status >= 400) fail_request(rid, error_from_response(r.value()));
      // on 202 the pipeline is already running
    });
  }

  BusHandler make_cpcf_handler() {
    auto router = std::make_shared<Router>("/sbi/cpcf");
    router->add(Method::Post, "/sbi/cpcf/ingest", [this](const Message& m, const RouteParams&) {
      const std::uint64_t rid = request_id_of(m);
      auto proto = Cpcf::identify(m.body);
      if (!proto.ok()) return reply(error_response(m.path, proto.error()));
      log_.append(engine_.now(), EventKind::ProtocolIdentified, "cpcf",
                  Payload{}.set("request", rid).set("protocol", protocol_name(proto.value())));
      auto converted = Cpcf::convert(m.body);
      if (!converted.ok()) return reply(error_response(m.path, converted.error()));
      if (proto.value() == ProtocolKind::Legacy) {
        log_.append(engine_.now(), EventKind::Converted, "cpcf",
                    Payload{}.set("request", rid).set("to", "http"));
      }
      // routing envelope: ties the unified request back to its ingress
      if (rid != 0) converted.value().set_header("x-request-id", std::to_string(rid));
      auto forwarded = bus_.dispatch_now("mano", std::move(converted.value()));
      if (!forwarded.ok()) return reply(error_response(m.path, forwarded.error()));
      return reply(std::move(forwarded.value()));
    });
    return [router](const Message& m) { return (*router)(m); };
  }

  BusHandler make_mano_handler() {
    auto router = std::make_shared<Router>("/ebi/mano");
    router->add(Method::Post, "/ebi/mano/requests", [this](const Message& m, const RouteParams&) {
      return accept_unified_request(m);
    });
    router->add(Method::Get, "/ebi/mano/requests/{id}", [this](const Message& m, const RouteParams& p) {
      std::uint64_t rid = 0;
      parse_u64(p.at("id"), rid);
      const auto* rec = request(rid);
      if (!rec) return reply(error_response(m.path, Error{Errc::UnknownInstance, "request " + p.at("id")}));
      nlohmann::json out = {{"request", rid},
                            {"instance", rec->instance_id},
                            {"outcome", rec->outcome == RequestOutcome::Completed ? "completed"
                                        : rec->outcome == RequestOutcome::Failed  ? "failed"
                                                                                  : "in_flight"},
                            {"result", rec->result},
                            {"error", rec->error}};
      return reply(json_response(m.path, 200, out));
    });
    router->add(Method::Get, "/ebi/mano/instances/{id}", [this](const Message& m, const RouteParams& p) {
      std::uint64_t iid = 0;
      parse_u64(p.at("id"), iid);
      const Instance* inst = mano_.instance(iid);
      if (!inst) return reply(error_response(m.path, Error{Errc::UnknownInstance, p.at("id")}));
      return reply(json_response(m.path, 200, instance_to_json(*inst)));
    });
    router->add(Method::Post, "/ebi/mano/instances/{id}/release-memory",
                [this](const Message& m, const RouteParams& p) {
                  std::uint64_t iid = 0;
                  parse_u64(p.at("id"), iid);
                  const std::string origin{m.header("x-origin").value_or("ebi")};
                  auto st = mano_.release_memory(iid, origin);
                  if (!st.ok()) return reply(error_response(m.path, st.error()));
                  return reply(json_response(m.path, 200, {{"instance", iid}}));
                });
    router->add(Method::Get, "/ebi/state/*key", [this](const Message& m, const RouteParams& p) {
      auto rec = mano_.api().get("/" + p.at("key"));
      if (!rec) return reply(json_response(m.path, 404, {{"absent", true}}));
      return reply(json_response(m.path, 200, {{"value", rec->value}, {"revision", rec->revision}}));
    });
    router->add(Method::Put, "/ebi/state/*key", [this](const Message& m, const RouteParams& p) {
      const std::uint64_t rev = mano_.api().put("/" + p.at("key"), m.body);
      return reply(json_response(m.path, 200, {{"revision", rev}}));
    });
    return [router](const Message& m) { return (*router)(m); };
  }

  HandlerResult accept_unified_request(const Message& m) {
    std::string service_class, service_name, mode_str = "parallel";
    nlohmann::json input;
    if (m.header("x-origin-protocol").value_or("") == "legacy") {
      auto lr = legacy::decode(m.body);
      if (!lr.ok()) return reply(error_response(m.path, lr.error()));
      service_class = lr.value().service_class;
      service_name = lr.value().service_name;
      if (!lr.value().mode.empty()) mode_str = lr.value().mode;
      input = nlohmann::json::parse(lr.value().input_json, nullptr, false);
      if (input.is_discarded()) input = nlohmann::json::object();
    } else {
      auto body = parse_json_body(m);
      if (!body.ok()) return reply(error_response(m.path, body.error()));
      const auto& j = body.value();
      service_class = j.value("service_class", std::string{});
      service_name = j.value("service_name", std::string{});
      mode_str = j.value("mode", std::string{"parallel"});
      input = j.value("input", nlohmann::json::object());
    }

    auto cls = service_class_from(service_class);
    if (!cls) return reply(error_response(m.path, Error{Errc::UnknownServiceClass, service_class}));
    auto mode = start_mode_from(mode_str);
    if (!mode) return reply(error_response(m.path, Error{Errc::ConfigError, "bad mode " + mode_str}));

    std::uint64_t rid = request_id_of(m);
    if (rid == 0 || !requests_.count(rid)) {
      // direct EBI entry without a tracked submission
      rid = ++request_counter_;
      ServiceRequestRecord rec;
      rec.request_id = rid;
      rec.origin = "ebi";
      rec.submitted_at = engine_.now();
      requests_[rid] = std::move(rec);
      ++inflight_;
      log_.append(engine_.now(), EventKind::RequestReceived, "request:" + std::to_string(rid),
                  Payload{}
                      .set("origin", "ebi")
                      .set("svc", service_name)
                      .set("class", service_class)
                      .set("protocol", "http")
                      .set("mode", mode_str));
      ensure_pulse();
    }
    ServiceRequestRecord& rec = requests_.at(rid);
    rec.service_class = service_class;
    rec.service_name = service_name;
    rec.mode = *mode;
    rec.input = input;

    engine_.schedule_in(VirtTime::zero(), [this, rid, cls = *cls, service_name, mode = *mode] {
      start_pipeline(rid, cls, service_name, mode);
    });
    return reply(json_response(m.path, 202, {{"request", rid}}));
  }

  void start_pipeline(std::uint64_t rid, ServiceClass cls, const std::string& service_name,
                      StartMode mode) {
    mano_.select_template(cls, service_name, rid, [this, rid, mode](Result<std::uint64_t> sel) {
      if (!sel.ok()) {
        fail_request(rid, sel.error());
        return;
      }
      const std::uint64_t iid = sel.value();
      requests_.at(rid).instance_id = iid;
      mano_.instantiate(iid, mode, [this, rid, iid](Status st) {
        if (!st.ok()) {
          fail_request(rid, st.error());
          return;
        }
        execute_service(rid, iid);
      });
    });
  }

  void execute_service(std::uint64_t rid, std::uint64_t iid) {
    const Instance* inst = mano_.instance(iid);
    if (!inst || inst->state != InstanceState::Active) {
      fail_request(rid, Error{Errc::WrongState, "instance not Active"});
      return;
    }
    if (inst->is_template_level()) {
      // measurement path: nothing to execute beyond activation
      complete_request(rid, iid, "-", 0.0, 0.0);
      return;
    }

    // locate the APP through ASF, bound to the instance this request created
    nlohmann::json sel = {{"service_class", service_class_name(inst->service_class)},
                          {"service_name", inst->service_name},
                          {"instance", iid}};
    auto chosen = bus_.dispatch_now("asf",
                                    Message::request(Method::Post, "/sbi/asf/select", sel.dump()));
    if (!chosen.ok() || chosen.value().status != 200) {
      fail_request(rid, chosen.ok() ? error_from_response(chosen.value()) : chosen.error());
      return;
    }
    const std::string endpoint =
        nlohmann::json::parse(chosen.value().body).value("endpoint", std::string{});

    nlohmann::json invoke_body = {{"input", requests_.at(rid).input},
                                  {"request", rid},
                                  {"instance", iid}};
    Message invoke = Message::request(
        Method::Post, "/nbi/app/" + inst->service_name + "/invoke", invoke_body.dump());
    bus_.request(endpoint, std::move(invoke), [this, rid, iid](Result<Message> r) {
      if (!r.ok()) {
        fail_request(rid, r.error());
        return;
      }
      if (r.value().status != 200) {
        fail_request(rid, error_from_response(r.value()));
        return;
      }
      auto j = nlohmann::json::parse(r.value().body, nullptr, false);
      if (j.is_discarded()) j = nlohmann::json::object();
      complete_request(rid, iid, j.value("result", std::string{}), j.value("compute_s", 0.0),
                       j.value("transfer_s", 0.0));
    });
  }

  void complete_request(std::uint64_t rid, std::uint64_t iid, const std::string& result,
                        double compute_s, double transfer_s) {
    const Instance* inst = mano_.instance(iid);
    if (!inst || inst->state != InstanceState::Active) {
      fail_request(rid, Error{Errc::WrongState, "instance failed before completion"});
      return;
    }
    Payload p;
    p.set("request", rid)
        .set("svc", inst->service_name)
        .set("class", service_class_name(inst->service_class))
        .set("result", result.empty() ? "-" : result)
        .set("compute_s", double_to_string(compute_s))
        .set("transfer_s", double_to_string(transfer_s));
    log_.append(engine_.now(), EventKind::ServiceCompleted, "instance:" + std::to_string(iid),
                std::move(p));
    mano_.complete_service(iid);

    // remaining template actions after the service itself
    const auto& tpl = mano_.templates().at(inst->template_id);
    for (const auto& action : inst->is_template_level() ? std::vector<std::string>{} : tpl.actions) {
      if (action == "record_charge") {
        const double held_s = (engine_.now() - inst->active_at).seconds();
        charge(iid, inst->spec.work_units, inst->spec.memory_mb * held_s);
      } else if (action == "update_popularity") {
        const std::string video = requests_.at(rid).input.value("video_id", std::string{});
        if (!video.empty()) {
          const auto asset = cache_.asset(video);
          log_.append(engine_.now(), EventKind::PopularityAnalyzed, "app:video_cache",
                      Payload{}
                          .set("video", video)
                          .set("popularity", asset ? asset->popularity_count : 0));
        }
      }
    }

    ServiceRequestRecord& rec = requests_.at(rid);
    rec.outcome = RequestOutcome::Completed;
    rec.result = result;
    rec.finished_at = engine_.now();
    --inflight_;

    fire_release_triggers(iid, inst->service_name);
  }

  void fail_request(std::uint64_t rid, const Error& err) {
    ServiceRequestRecord& rec = requests_.at(rid);
    if (rec.outcome != RequestOutcome::InFlight) return;
    rec.outcome = RequestOutcome::Failed;
    rec.error = err.to_string();
    rec.finished_at = engine_.now();
    --inflight_;
    // a request that dies mid-pipeline takes its instance down with it,
    // returning every partial grant (no-op if the instance already settled)
    if (rec.instance_id != 0) mano_.fail_instance(rec.instance_id, err);
    log_.append(engine_.now(), EventKind::RequestFailed, "request:" + std::to_string(rid),
                Payload{}.set("error", errc_name(err.code)).set("detail", err.detail));
  }

  void fire_release_triggers(std::uint64_t iid, const std::string& service_name) {
    for (const auto& trig : triggers_) {
      const bool match = trig.selector == "all" || trig.selector == "svc:" + service_name ||
                         trig.selector == "instance:" + std::to_string(iid);
      if (!match) continue;
      engine_.schedule_in(trig.delay, [this, iid, origin = trig.origin] {
        mano_.release_memory(iid, origin);
      });
    }
  }

  // ---- APP runtime ----

  std::string activate_app_endpoint(const Instance& inst, const std::string& svc) {
    const std::string endpoint = "app:" + svc + "#" + std::to_string(inst.instance_id);
    const std::uint64_t iid = inst.instance_id;
    bus_.register_endpoint(endpoint, [this, svc, iid](const Message& m) {
      return invoke_app(svc, iid, m);
    });
    return endpoint;
  }

  HandlerResult invoke_app(const std::string& svc, std::uint64_t iid, const Message& m) {
    auto body = parse_json_body(m);
    const nlohmann::json input =
        body.ok() ? body.value().value("input", nlohmann::json::object()) : nlohmann::json::object();
    const Instance* inst = mano_.instance(iid);
    if (!inst) return reply(error_response(m.path, Error{Errc::UnknownInstance, std::to_string(iid)}));

    const auto& tpl = mano_.templates().at(inst->template_id);
    const double cpu_rate = attr_number(tpl.attributes.table, "cpu_rate_units_per_s", 1000.0);

    nlohmann::json out;
    double compute_s = 0.0;
    double transfer_s = 0.0;

    if (svc == "sum" || svc == "prime_sum") {
      const std::uint64_t n = input.value("n", std::uint64_t{0});
      const std::uint64_t value = svc == "sum" ? compute_sum(n) : compute_prime_sum(n);
      compute_s = jittered(inst->spec.work_units / cpu_rate);
      out["result"] = std::to_string(value);
    } else if (svc == "face_recognition") {
      const std::string blob = input.value("blob_id", "blob-" + std::to_string(iid));
      const double image_mb = input.value("size_mb", inst->spec.image_mb > 0 ? inst->spec.image_mb : 5.0);
      auto fr = face_recognition(blob, image_mb, cfg_.uplink_mbps, inst->spec.work_units, cpu_rate);
      if (!fr.ok()) return reply(error_response(m.path, fr.error()));
      compute_s = jittered(fr.value().compute_time_s);
      transfer_s = fr.value().transfer_time_s;
      out["result"] = fr.value().label;
    } else if (svc == "video_cache") {
      const std::string video = input.value("video_id", std::string{});
      double size_mb = input.value("size_mb", 0.0);
      if (size_mb <= 0.0) {
        if (auto asset = cache_.asset(video)) size_mb = static_cast<double>(asset->size_kb) / 1000.0;
      }
      auto served = serve_video(video, size_mb);
      if (!served.ok()) return reply(error_response(m.path, served.error()));
      compute_s = served.value().compute_time_s;
      transfer_s = served.value().transmission_time_s;
      out["result"] = served.value().served_from;
      out["served_from"] = served.value().served_from;
      out["size_mb"] = size_mb;
    } else {
      // user-defined APP: generic compute behavior driven by its attributes
      compute_s = jittered((inst->spec.work_units > 0 ? inst->spec.work_units : 100.0) / cpu_rate);
      out["result"] = "done";
    }

    out["compute_s"] = compute_s;
    out["transfer_s"] = transfer_s;
    return HandlerResult{json_response(m.path, 200, out),
                         VirtTime::from_seconds(compute_s + transfer_s)};
  }

  double jittered(double seconds) {
    if (cfg_.cost_jitter_pct <= 0.0) return seconds;
    return seconds * rng_.jitter_factor(cfg_.cost_jitter_pct);
  }

  double attr_number(const std::string& table, const std::string& key, double fallback) {
    auto v = udm_.param(table, key);
    if (!v) return fallback;
    try {
      return std::stod(*v);
    } catch (...) {
      return fallback;
    }
  }

  double video_param(const std::string& key, double fallback) {
    return attr_number("tpl_video_params", key, fallback);
  }

  static std::uint64_t request_id_of(const Message& m) {
    std::uint64_t rid = 0;
    if (auto h = m.header("x-request-id")) parse_u64(*h, rid);
    return rid;
  }

  static nlohmann::json instance_to_json(const Instance& inst) {
    return nlohmann::json{{"instance", inst.instance_id},
                          {"request", inst.request_id},
                          {"template", inst.template_id},
                          {"class", service_class_name(inst.service_class)},
                          {"svc", inst.service_name},
                          {"state", instance_state_name(inst.state)},
                          {"pod", inst.pod_id},
                          {"grants", inst.grant_ids},
                          {"created_at", inst.created_at.to_string()},
                          {"active_at", inst.active_at.to_string()},
                          {"completed_at", inst.completed_at.to_string()},
                          {"released_at", inst.released_at.to_string()}};
  }

  // ---- maintenance pulse: heartbeats + controller sweep while work exists ----

  void ensure_pulse() {
    if (pulse_active_) return;
    pulse_active_ = true;
    engine_.schedule_in(VirtTime::zero(), [this] { pulse_tick(); });
  }

  void pulse_tick() {
    if (inflight_ == 0) {
      pulse_active_ = false;
      return;
    }
    mano_.record_heartbeats();
    mano_.controller_tick();
    engine_.schedule_in(cfg_.heartbeat_interval, [this] { pulse_tick(); });
  }

  SystemConfig cfg_;
  SimEngine engine_;
  EventLog log_;
  RandomSource rng_;
  ServiceBus bus_;
  Udm udm_;
  Nrf nrf_;
  Srf srf_;
  Asf asf_;
  Upf upf_;
  Cluster cluster_;
  Kubelet kubelet_;
  VideoCacheStore cache_;
  Mano mano_;
  std::map<std::uint64_t, ServiceRequestRecord> requests_;
  std::vector<ReleaseTrigger> triggers_;
  std::uint64_t request_counter_ = 0;
  int inflight_ = 0;
  bool pulse_active_ = false;
};

}  // namespace osmec
