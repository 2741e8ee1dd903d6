#pragma once

#include <json.hpp>

#include <string>

#include "osmec/bus/bus.hpp"
#include "osmec/bus/router.hpp"
#include "osmec/core/result.hpp"
#include "osmec/nf/descriptor.hpp"
#include "osmec/nf/udm.hpp"
#include "osmec/nf/wire.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

struct RegistrationRecord {
  std::string app_id;
  std::string udm_table;
  std::string image_location;
  std::string access_endpoint;
  VirtTime registered_at;
};

/// Service registry for new APPs. Registration order is fixed: the UDM row
/// first, then the NRF remote image, then the external access endpoint.
/// Re-registering an existing APP updates the UDM row in place.
class Srf {
 public:
  static constexpr const char* kAppsTable = "apps";

  Srf(SimEngine& engine, EventLog& log, ServiceBus& bus)
      : engine_(engine), log_(log), bus_(bus) {}

  Result<RegistrationRecord> register_app(const NfDescriptor& d, const std::string& udm_table) {
    if (d.nf_kind != NfKind::App)
      return Error{Errc::PreconditionViolated, "srf registers APP descriptors only"};
    if (auto st = d.validate(); !st.ok()) return st.error();

    RegistrationRecord rec;
    rec.app_id = d.nf_id;
    rec.udm_table = udm_table;
    rec.image_location = "remote/" + d.image_ref;
    rec.access_endpoint = "app:" + d.nf_id;
    rec.registered_at = engine_.now();

    // (1) APP row in UDM's app registry.
    const Row row{rec.app_id, rec.udm_table, rec.image_location, rec.access_endpoint,
                  rec.registered_at.to_string()};
    nlohmann::json body = {{"row", row}};
    auto ins = bus_.dispatch_now(
        "udm", Message::request(Method::Post, std::string("/sbi/udm/") + kAppsTable + "/" + rec.app_id,
                                body.dump()));
    if (!ins.ok()) return ins.error();
    if (ins.value().status == 409) {
      // duplicate registration: update in place, image location unchanged
      auto upd = bus_.dispatch_now(
          "udm", Message::request(Method::Put, std::string("/sbi/udm/") + kAppsTable + "/" + rec.app_id,
                                  body.dump()));
      if (!upd.ok()) return upd.error();
      if (upd.value().status >= 400) return error_from_response(upd.value());
    } else if (ins.value().status >= 400) {
      return error_from_response(ins.value());
    }

    // (2) image into the NRF remote repository.
    nlohmann::json img = {{"kind", "APP"}, {"image_ref", d.image_ref}};
    auto sto = bus_.dispatch_now(
        "nrf", Message::request(Method::Post, "/sbi/nrf/images/" + rec.app_id, img.dump()));
    if (!sto.ok()) return sto.error();
    if (sto.value().status >= 400) return error_from_response(sto.value());

    // (3) external access endpoint (once per app).
    if (!bus_.has_endpoint(rec.access_endpoint)) {
      RegistrationRecord copy = rec;
      auto st = bus_.register_endpoint(rec.access_endpoint, [copy](const Message& m) {
        nlohmann::json info = {{"app_id", copy.app_id},
                               {"udm_table", copy.udm_table},
                               {"image_location", copy.image_location},
                               {"registered_at", copy.registered_at.to_string()}};
        return reply(Message::response(200, m.path, info.dump()));
      });
      if (!st.ok()) return st.error();
    }

    log_.append(engine_.now(), EventKind::AppRegistered, "srf",
                Payload{}.set("app", rec.app_id).set("endpoint", rec.access_endpoint));
    return rec;
  }

  /// SBI surface: POST /sbi/srf/apps with {app_id, image_ref, udm_table}.
  BusHandler make_handler() {
    auto router = std::make_shared<Router>("/sbi/srf");
    router->add(Method::Post, "/sbi/srf/apps", [this](const Message& m, const RouteParams&) {
      auto body = parse_json_body(m);
      if (!body.ok()) return reply(error_response(m.path, body.error()));
      const auto& j = body.value();
      if (!j.contains("app_id"))
        return reply(error_response(m.path, Error{Errc::MalformedFrame, "missing app_id"}));
      auto d = NfDescriptor::make(j["app_id"].get<std::string>(), NfKind::App,
                                  j.value("image_ref", std::string{}));
      auto r = register_app(d, j.value("udm_table", std::string{"apps"}));
      if (!r.ok()) return reply(error_response(m.path, r.error()));
      nlohmann::json out = {{"app_id", r.value().app_id},
                            {"access_endpoint", r.value().access_endpoint},
                            {"image_location", r.value().image_location}};
      return reply(json_response(m.path, 201, out));
    });
    return [router](const Message& m) { return (*router)(m); };
  }

 private:
  SimEngine& engine_;
  EventLog& log_;
  ServiceBus& bus_;
};

}  // namespace osmec
