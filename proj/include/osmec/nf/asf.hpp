#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "osmec/bus/router.hpp"
#include "osmec/core/result.hpp"
#include "osmec/nf/wire.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

/// Application selection: the middleware that locates a running APP instance
/// for a (service_class, service_name) pair. Ties break to the lowest
/// instance id; the pipeline passes its own instance id to bind execution to
/// the instance the request created.
class Asf {
 public:
  struct ActiveApp {
    std::string service_class;
    std::string service_name;
    std::uint64_t instance_id = 0;
    std::string endpoint;
  };

  Asf(SimEngine& engine, EventLog& log) : engine_(engine), log_(log) {}

  void activate(ActiveApp app) { active_[app.instance_id] = std::move(app); }
  void deactivate(std::uint64_t instance_id) { active_.erase(instance_id); }

  Result<ActiveApp> select(const std::string& service_class, const std::string& service_name,
                           std::optional<std::uint64_t> instance_filter = std::nullopt) {
    for (const auto& [id, app] : active_) {  // id order = lowest instance id wins
      if (app.service_class != service_class || app.service_name != service_name) continue;
      if (instance_filter && *instance_filter != id) continue;
      log_.append(engine_.now(), EventKind::AppSelected, "asf",
                  Payload{}
                      .set("svc", service_name)
                      .set("class", service_class)
                      .set("instance", id)
                      .set("endpoint", app.endpoint));
      return app;
    }
    return Error{Errc::NoActiveApp, service_class + "/" + service_name};
  }

  std::size_t active_count() const { return active_.size(); }

  /// SBI surface: POST /sbi/asf/select {service_class, service_name,
  /// instance?}; internal activation bookkeeping under /sbi/asf/instances.
  BusHandler make_handler() {
    auto router = std::make_shared<Router>("/sbi/asf");
    router->add(Method::Post, "/sbi/asf/select", [this](const Message& m, const RouteParams&) {
      auto body = parse_json_body(m);
      if (!body.ok()) return reply(error_response(m.path, body.error()));
      const auto& j = body.value();
      std::optional<std::uint64_t> filter;
      if (j.contains("instance")) filter = j["instance"].get<std::uint64_t>();
      auto r = select(j.value("service_class", std::string{}), j.value("service_name", std::string{}),
                      filter);
      if (!r.ok()) return reply(error_response(m.path, r.error()));
      nlohmann::json out = {{"endpoint", r.value().endpoint}, {"instance", r.value().instance_id}};
      return reply(json_response(m.path, 200, out));
    });
    router->add(Method::Post, "/sbi/asf/instances", [this](const Message& m, const RouteParams&) {
      auto body = parse_json_body(m);
      if (!body.ok()) return reply(error_response(m.path, body.error()));
      const auto& j = body.value();
      activate(ActiveApp{j.value("service_class", std::string{}),
                         j.value("service_name", std::string{}),
                         j.value("instance", std::uint64_t{0}), j.value("endpoint", std::string{})});
      return reply(json_response(m.path, 201, {{"instance", j.value("instance", std::uint64_t{0})}}));
    });
    router->add(Method::Delete, "/sbi/asf/instances/{id}",
                [this](const Message& m, const RouteParams& p) {
                  std::uint64_t id = 0;
                  if (!parse_u64(p.at("id"), id))
                    return reply(error_response(m.path, Error{Errc::MalformedFrame, "bad id"}));
                  deactivate(id);
                  return reply(json_response(m.path, 200, {{"instance", id}}));
                });
    return [router](const Message& m) { return (*router)(m); };
  }

 private:
  SimEngine& engine_;
  EventLog& log_;
  std::map<std::uint64_t, ActiveApp> active_;
};

}  // namespace osmec
