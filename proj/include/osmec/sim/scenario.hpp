#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "osmec/core/result.hpp"
#include "osmec/sim/metrics.hpp"
#include "osmec/system.hpp"

namespace osmec {

struct RequestSpec {
  VirtTime t;
  std::string protocol = "http";
  std::string service_class;
  std::string service_name;
  nlohmann::json input = nlohmann::json::object();
  StartMode mode = StartMode::Parallel;
  int repeat = 1;
  VirtTime every;
};

struct ManualReleaseSpec {
  std::string selector;  // "all", "svc:<name>" or "instance:<id>"
  std::optional<VirtTime> at;                // absolute virtual time
  std::optional<VirtTime> after_completion;  // delay past ServiceCompleted
};

struct ScenarioConfig {
  std::string name = "scenario";
  SystemConfig system;
  std::vector<RequestSpec> requests;
  std::vector<ManualReleaseSpec> manual_releases;
};

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace detail

/// Parses a scenario document. Errors carry the offending line or field.
inline Result<ScenarioConfig> parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    return Error{Errc::ConfigError, "line " + std::to_string(detail::line_of_offset(text, e.byte)) +
                                        ": " + e.what()};
  }
  if (!j.is_object()) return Error{Errc::ConfigError, "scenario must be a JSON object"};

  ScenarioConfig cfg;
  try {
    cfg.name = j.value("name", std::string{"scenario"});
    cfg.system.seed = j.value("seed", std::uint64_t{1});

    for (const auto& n : j.value("nodes", nlohmann::json::array())) {
      const auto& cap = n.at("capacity");
      NodeSpec spec;
      spec.capacity = ResourceVector::of(cap.value("cpu", std::int64_t{0}), cap.value("memory", 0.0),
                                         cap.value("storage", 0.0), cap.value("bandwidth", 0.0));
      spec.warm_idle_pods = n.value("idle_pods", 0);
      if (!spec.capacity.non_negative() || spec.warm_idle_pods < 0)
        return Error{Errc::ConfigError, "nodes[].capacity components must be non-negative"};
      cfg.system.nodes.push_back(spec);
    }

    if (j.contains("bandwidths")) {
      const auto& b = j["bandwidths"];
      cfg.system.edge_mbps = b.value("edge_mbps", cfg.system.edge_mbps);
      cfg.system.cloud_mbps = b.value("cloud_mbps", cfg.system.cloud_mbps);
      cfg.system.cloud_base_latency_s = b.value("cloud_base_latency_s", cfg.system.cloud_base_latency_s);
      cfg.system.uplink_mbps = b.value("uplink_mbps", cfg.system.uplink_mbps);
    }

    if (j.contains("hop_latency_s"))
      cfg.system.hop_latency = VirtTime::from_seconds(j["hop_latency_s"].get<double>());
    if (j.contains("remote_fetch_delay_s"))
      cfg.system.remote_fetch_delay = VirtTime::from_seconds(j["remote_fetch_delay_s"].get<double>());
    if (j.contains("overhead_s"))
      cfg.system.instantiation_overhead = VirtTime::from_seconds(j["overhead_s"].get<double>());
    if (j.contains("heartbeat_interval_s"))
      cfg.system.heartbeat_interval = VirtTime::from_seconds(j["heartbeat_interval_s"].get<double>());
    cfg.system.cost_jitter_pct = j.value("cost_jitter_pct", 0.0);
    cfg.system.cache_capacity_mb = j.value("cache_capacity_mb", cfg.system.cache_capacity_mb);
    cfg.system.builtin_templates = j.value("builtin_templates", true);

    for (const auto& v : j.value("videos", nlohmann::json::array())) {
      VideoSpec vs;
      vs.video_id = v.at("video_id").get<std::string>();
      vs.size_mb = v.at("size_mb").get<double>();
      vs.location = v.value("location", std::string{"edge"});
      if (vs.size_mb <= 0.0) return Error{Errc::ConfigError, "videos[].size_mb must be positive"};
      if (vs.location != "edge" && vs.location != "cloud")
        return Error{Errc::ConfigError, "videos[].location must be edge or cloud"};
      cfg.system.videos.push_back(std::move(vs));
    }

    for (const auto& t : j.value("templates", nlohmann::json::array())) {
      Result<Template> loaded = t.is_string() ? load_template_file(t.get<std::string>())
                              : t.contains("file")
                                  ? load_template_file(t["file"].get<std::string>())
                                  : template_from_json(t);
      if (!loaded.ok()) return loaded.error();
      cfg.system.extra_templates.push_back(std::move(loaded.value()));
    }

    if (!j.contains("requests") || !j["requests"].is_array())
      return Error{Errc::ConfigError, "field requests: must be an array"};
    for (const auto& r : j["requests"]) {
      RequestSpec spec;
      spec.t = VirtTime::from_seconds(r.value("t", 0.0));
      spec.protocol = r.value("protocol", std::string{"http"});
      if (spec.protocol != "http" && spec.protocol != "legacy")
        return Error{Errc::ConfigError, "requests[].protocol must be http or legacy"};
      spec.service_class = r.at("service_class").get<std::string>();
      spec.service_name = r.at("service_name").get<std::string>();
      spec.input = r.value("input", nlohmann::json::object());
      auto mode = start_mode_from(r.value("mode", std::string{"parallel"}));
      if (!mode) return Error{Errc::ConfigError, "requests[].mode must be parallel or sequential"};
      spec.mode = *mode;
      spec.repeat = r.value("repeat", 1);
      spec.every = VirtTime::from_seconds(r.value("every", 0.0));
      if (spec.t < VirtTime::zero()) return Error{Errc::ConfigError, "requests[].t must be >= 0"};
      if (spec.repeat < 1 || spec.repeat > 1000000)
        return Error{Errc::ConfigError, "requests[].repeat must be in [1, 10^6]"};
      if (spec.repeat > 1 && spec.every <= VirtTime::zero())
        return Error{Errc::ConfigError, "requests[].every required when repeat > 1"};
      cfg.requests.push_back(std::move(spec));
    }

    for (const auto& m : j.value("manual_releases", nlohmann::json::array())) {
      ManualReleaseSpec spec;
      if (m.contains("instance_selector")) spec.selector = m["instance_selector"].get<std::string>();
      else spec.selector = m.at("instance").get<std::string>();
      if (m.contains("t")) spec.at = VirtTime::from_seconds(m["t"].get<double>());
      if (m.contains("after_completion"))
        spec.after_completion = VirtTime::from_seconds(m["after_completion"].get<double>());
      if (spec.at.has_value() == spec.after_completion.has_value())
        return Error{Errc::ConfigError,
                     "manual_releases[] needs exactly one of t / after_completion"};
      if (spec.at && !starts_with(spec.selector, "instance:"))
        return Error{Errc::ConfigError,
                     "manual_releases[].t requires an instance:<id> selector"};
      cfg.manual_releases.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    return Error{Errc::ConfigError, std::string("field error: ") + e.what()};
  }
  return cfg;
}

inline Result<ScenarioConfig> load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Errc::IoError, "cannot open " + path};
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario(text);
}

struct ScenarioRun {
  MetricsReport report;
  std::string events_text;
  std::uint64_t log_hash = 0;
  std::uint64_t requests_submitted = 0;
};

/// Executes every configured request through the full pipeline on a fresh
/// system. Deterministic given (config, seed); the report is recomputable
/// from the persisted event log.
inline Result<ScenarioRun> run_scenario(const ScenarioConfig& cfg,
                                        std::optional<std::uint64_t> seed_override = std::nullopt) {
  SystemConfig syscfg = cfg.system;
  if (seed_override) syscfg.seed = *seed_override;
  EdgeSystem system(std::move(syscfg));

  ScenarioRun out;
  for (const auto& r : cfg.requests) {
    for (int k = 0; k < r.repeat; ++k) {
      const VirtTime at =
          r.t + VirtTime::from_micros(static_cast<std::int64_t>(k) * r.every.micros());
      system.submit_request("scenario", r.protocol, r.service_class, r.service_name, r.input,
                            r.mode, at);
      ++out.requests_submitted;
    }
  }
  for (const auto& m : cfg.manual_releases) {
    if (m.after_completion) {
      system.add_release_trigger(ReleaseTrigger{m.selector, *m.after_completion, "scenario"});
    } else {
      std::uint64_t iid = 0;
      parse_u64(std::string_view(m.selector).substr(std::string_view("instance:").size()), iid);
      system.schedule_release(iid, *m.at, "scenario");
    }
  }

  system.run();

  out.events_text = system.log().to_text();
  out.log_hash = system.log().digest();
  out.report = build_report(system.log().records());
  return out;
}

}  // namespace osmec
