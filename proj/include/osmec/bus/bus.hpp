#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "osmec/bus/message.hpp"
#include "osmec/core/result.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

/// What a handler hands back: the response plus any data-dependent handling
/// time (e.g. a remote image fetch) on top of the endpoint's fixed cost.
struct HandlerResult {
  Message response;
  VirtTime extra_cost;
};

using BusHandler = std::function<HandlerResult(const Message&)>;

inline HandlerResult reply(Message response) { return HandlerResult{std::move(response), VirtTime::zero()}; }

struct BusConfig {
  VirtTime hop_latency;                      // one direction, request or response
  std::optional<VirtTime> default_deadline;  // per-request handling budget
};

/// One logical bus per edge server. SBI, NBI and EBI share this transport and
/// differ only by path namespace. Handlers run under the event loop; the
/// external synchronous entry serializes callers through a single gate and
/// drives the loop itself, so no handler ever blocks on wall-clock time.
class ServiceBus {
 public:
  ServiceBus(SimEngine& engine, EventLog& log, BusConfig cfg = {})
      : engine_(engine), log_(log), cfg_(cfg) {}

  Status register_endpoint(const std::string& name, BusHandler handler,
                           VirtTime processing_cost = VirtTime::zero()) {
    if (endpoints_.count(name)) return {Errc::DuplicateEndpoint, name};
    endpoints_[name] = Endpoint{std::move(handler), processing_cost};
    log_.append(engine_.now(), EventKind::EndpointRegistered, name, Payload{});
    return Status::success();
  }

  bool has_endpoint(const std::string& name) const { return endpoints_.count(name) != 0; }

  /// Asynchronous request with the full latency model:
  /// send --hop--> deliver, handler runs, --cost--> respond --hop--> continuation.
  /// A handler whose cost exceeds the deadline yields Timeout instead.
  void request(const std::string& target, Message m,
               std::function<void(Result<Message>)> cont,
               std::optional<VirtTime> deadline_override = std::nullopt) {
    assert(m.kind == MsgKind::Request);
    m.correlation_id = ++correlation_counter_;
    auto it = endpoints_.find(target);
    if (it == endpoints_.end()) {
      engine_.schedule_in(VirtTime::zero(), [cont = std::move(cont), target] {
        cont(Error{Errc::UnknownEndpoint, target});
      });
      return;
    }
    log_.append(engine_.now(), EventKind::BusSend, target,
                Payload{}
                    .set("corr", m.correlation_id)
                    .set("method", method_name(m.method))
                    .set("path", m.path));
    std::optional<VirtTime> deadline = deadline_override ? deadline_override : cfg_.default_deadline;
    engine_.schedule_in(cfg_.hop_latency,
                        [this, target, m = std::move(m), cont = std::move(cont), deadline] {
                          deliver(target, m, cont, deadline);
                        });
  }

  /// Synchronous nested dispatch at the current virtual instant (bookkeeping
  /// calls between NFs on the same server). Logs the same bus events; the
  /// latency model applies to asynchronous sends only.
  Result<Message> dispatch_now(const std::string& target, Message m) {
    assert(m.kind == MsgKind::Request);
    auto it = endpoints_.find(target);
    if (it == endpoints_.end()) return Error{Errc::UnknownEndpoint, target};
    m.correlation_id = ++correlation_counter_;
    log_.append(engine_.now(), EventKind::BusSend, target,
                Payload{}
                    .set("corr", m.correlation_id)
                    .set("method", method_name(m.method))
                    .set("path", m.path));
    log_.append(engine_.now(), EventKind::BusDeliver, target,
                Payload{}.set("corr", m.correlation_id));
    HandlerResult hr = it->second.handler(m);
    Message resp = finish_response(std::move(hr.response), m);
    log_.append(engine_.now(), EventKind::BusRespond, target,
                Payload{}.set("corr", resp.correlation_id).set("status", std::int64_t{resp.status}));
    return resp;
  }

  /// External synchronous entry. Callable from multiple threads: callers are
  /// serialized through one gate and each drives the loop to completion.
  Result<Message> send_request(const std::string& target, Message m,
                               std::optional<VirtTime> deadline = std::nullopt) {
    std::lock_guard<std::mutex> lk(external_gate_);
    assert(!engine_.running());
    std::optional<Result<Message>> out;
    request(target, std::move(m), [&out](Result<Message> r) { out = std::move(r); }, deadline);
    engine_.run();
    assert(out.has_value());
    return *out;
  }

  std::uint64_t correlation_count() const { return correlation_counter_; }

 private:
  struct Endpoint {
    BusHandler handler;
    VirtTime cost;
  };

  static Message finish_response(Message resp, const Message& req) {
    resp.kind = MsgKind::Response;
    resp.correlation_id = req.correlation_id;
    if (resp.path.empty()) resp.path = req.path;
    return resp;
  }

  void deliver(const std::string& target, const Message& m,
               const std::function<void(Result<Message>)>& cont,
               std::optional<VirtTime> deadline) {
    log_.append(engine_.now(), EventKind::BusDeliver, target,
                Payload{}.set("corr", m.correlation_id));
    auto& ep = endpoints_.at(target);
    HandlerResult hr = ep.handler(m);
    const VirtTime cost = ep.cost + hr.extra_cost;
    if (deadline && cost > *deadline) {
      engine_.schedule_in(*deadline, [cont, target] {
        cont(Error{Errc::Timeout, "handler exceeded deadline at " + target});
      });
      return;
    }
    Message resp = finish_response(std::move(hr.response), m);
    engine_.schedule_in(cost, [this, target, resp = std::move(resp), cont] {
      log_.append(engine_.now(), EventKind::BusRespond, target,
                  Payload{}.set("corr", resp.correlation_id).set("status", std::int64_t{resp.status}));
      engine_.schedule_in(cfg_.hop_latency, [cont, resp] { cont(resp); });
    });
  }

  SimEngine& engine_;
  EventLog& log_;
  BusConfig cfg_;
  std::map<std::string, Endpoint> endpoints_;
  std::uint64_t correlation_counter_ = 0;
  std::mutex external_gate_;
};

}  // namespace osmec
