#pragma once

#include <map>
#include <string>

#include "osmec/bus/router.hpp"
#include "osmec/core/result.hpp"
#include "osmec/nf/descriptor.hpp"
#include "osmec/nf/wire.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

/// NF repository: storage of NF and APP images only. General NFs resolve
/// from local storage with no fetch event; dedicated images live in the
/// remote repository and each resolution pays the configured fetch delay.
class Nrf {
 public:
  struct Resolution {
    std::string image_ref;
    StorageClass source = StorageClass::Local;
    VirtTime fetch_cost;
  };

  Nrf(SimEngine& engine, EventLog& log, VirtTime remote_fetch_delay)
      : engine_(engine), log_(log), fetch_delay_(remote_fetch_delay) {}

  void set_fetch_delay(VirtTime d) { fetch_delay_ = d; }
  VirtTime fetch_delay() const { return fetch_delay_; }

  Status store_image(const NfDescriptor& d) {
    if (auto st = d.validate(); !st.ok()) return st;
    images_[d.nf_id] = d;  // upsert; re-registration leaves image_ref unchanged
    log_.append(engine_.now(), EventKind::NrfImageStored, "nrf",
                Payload{}
                    .set("nf", d.nf_id)
                    .set("image", d.image_ref)
                    .set("store", d.storage_class == StorageClass::Remote ? "remote" : "local"));
    return Status::success();
  }

  bool has_image(const std::string& nf_id) const { return images_.count(nf_id) != 0; }

  Result<Resolution> resolve(const std::string& nf_id) {
    auto it = images_.find(nf_id);
    if (it == images_.end()) return Error{Errc::ImageNotFound, nf_id};
    Resolution r;
    r.image_ref = it->second.image_ref;
    r.source = it->second.storage_class;
    if (r.source == StorageClass::Remote) {
      r.fetch_cost = fetch_delay_;
      log_.append(engine_.now(), EventKind::RemoteImageFetch, "nrf",
                  Payload{}.set("nf", nf_id).set("image", r.image_ref).set("delay", fetch_delay_));
    }
    return r;
  }

  /// Presence check for NFs that are already running: no fetch event, no
  /// fetch cost.
  Result<Resolution> peek(const std::string& nf_id) const {
    auto it = images_.find(nf_id);
    if (it == images_.end()) return Error{Errc::ImageNotFound, nf_id};
    return Resolution{it->second.image_ref, it->second.storage_class, VirtTime::zero()};
  }

  /// SBI surface: GET resolves (remote resolutions carry the fetch delay as
  /// handler cost), POST stores.
  BusHandler make_handler() {
    auto router = std::make_shared<Router>("/sbi/nrf");
    router->add(Method::Get, "/sbi/nrf/images/{id}", [this](const Message& m, const RouteParams& p) {
      const bool presence_only = m.header("x-presence-only").has_value();
      auto r = presence_only ? peek(p.at("id")) : resolve(p.at("id"));
      if (!r.ok()) return reply(error_response(m.path, r.error()));
      nlohmann::json body = {
          {"image_ref", r.value().image_ref},
          {"source", r.value().source == StorageClass::Remote ? "remote" : "local"}};
      return HandlerResult{json_response(m.path, 200, body), r.value().fetch_cost};
    });
    router->add(Method::Post, "/sbi/nrf/images/{id}", [this](const Message& m, const RouteParams& p) {
      auto body = parse_json_body(m);
      if (!body.ok()) return reply(error_response(m.path, body.error()));
      const auto& j = body.value();
      NfDescriptor d = NfDescriptor::make(p.at("id"), kind_from(j.value("kind", std::string{"APP"})),
                                          j.value("image_ref", std::string{}));
      auto st = store_image(d);
      if (!st.ok()) return reply(error_response(m.path, st.error()));
      return reply(json_response(m.path, 201, {{"nf", d.nf_id}}));
    });
    return [router](const Message& m) { return (*router)(m); };
  }

  static NfKind kind_from(const std::string& name) {
    if (name == "UDM") return NfKind::Udm;
    if (name == "NRF") return NfKind::Nrf;
    if (name == "SRF") return NfKind::Srf;
    if (name == "CPCF") return NfKind::Cpcf;
    if (name == "ASF") return NfKind::Asf;
    if (name == "UPF") return NfKind::Upf;
    return NfKind::App;
  }

 private:
  SimEngine& engine_;
  EventLog& log_;
  VirtTime fetch_delay_;
  std::map<std::string, NfDescriptor> images_;
};

}  // namespace osmec
