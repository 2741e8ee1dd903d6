#pragma once

#include <functional>
#include <optional>
#include <string>

#include "osmec/bus/router.hpp"
#include "osmec/core/result.hpp"
#include "osmec/nf/wire.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

/// User-plane routing: serve from the edge on a cache hit, otherwise forward
/// along edge -> switch -> cloud. Content residency is reported by the
/// workloads module through the registered locator.
class Upf {
 public:
  enum class RouteKind { EdgeHit, CloudForward };

  struct RouteDecision {
    RouteKind kind = RouteKind::EdgeHit;
    std::string path_descriptor;  // "edge" or "edge->switch->cloud"
  };

  /// Returns where a video currently lives ("edge"/"cloud"), or nullopt when
  /// the id is unknown.
  using ContentLocator = std::function<std::optional<std::string>(const std::string&)>;

  Upf(SimEngine& engine, EventLog& log) : engine_(engine), log_(log) {}

  void set_content_locator(ContentLocator locator) { locator_ = std::move(locator); }

  Result<RouteDecision> route(const std::optional<std::string>& video_id,
                              const std::optional<std::string>& dest) {
    std::optional<std::string> location = dest;
    if (video_id) {
      location = locator_ ? locator_(*video_id) : std::nullopt;
      if (!location) return Error{Errc::NoRoute, "unknown video: " + *video_id};
    }
    if (!location) return Error{Errc::NoRoute, "flow carries no destination"};
    if (*location == "edge") {
      log_.append(engine_.now(), EventKind::EdgeHit, "upf",
                  Payload{}.set("video", video_id.value_or("-")));
      return RouteDecision{RouteKind::EdgeHit, "edge"};
    }
    if (*location == "cloud") {
      log_.append(engine_.now(), EventKind::CloudForward, "upf",
                  Payload{}.set("video", video_id.value_or("-")).set("path", "edge->switch->cloud"));
      return RouteDecision{RouteKind::CloudForward, "edge->switch->cloud"};
    }
    return Error{Errc::NoRoute, "unknown destination class: " + *location};
  }

  /// SBI surface: POST /sbi/upf/route {video_id?, dest?}.
  BusHandler make_handler() {
    auto router = std::make_shared<Router>("/sbi/upf");
    router->add(Method::Post, "/sbi/upf/route", [this](const Message& m, const RouteParams&) {
      auto body = parse_json_body(m);
      if (!body.ok()) return reply(error_response(m.path, body.error()));
      const auto& j = body.value();
      std::optional<std::string> video, dest;
      if (j.contains("video_id")) video = j["video_id"].get<std::string>();
      if (j.contains("dest")) dest = j["dest"].get<std::string>();
      auto r = route(video, dest);
      if (!r.ok()) return reply(error_response(m.path, r.error()));
      nlohmann::json out = {
          {"route", r.value().kind == RouteKind::EdgeHit ? "edge" : "cloud"},
          {"path", r.value().path_descriptor}};
      return reply(json_response(m.path, 200, out));
    });
    return [router](const Message& m) { return (*router)(m); };
  }

 private:
  SimEngine& engine_;
  EventLog& log_;
  ContentLocator locator_;
};

}  // namespace osmec
