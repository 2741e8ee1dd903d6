#pragma once

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "osmec/core/result.hpp"
#include "osmec/core/vtime.hpp"
#include "osmec/mano/resources.hpp"

namespace osmec {

enum class ServiceClass { IntensiveComputation, HighThroughput };

inline const char* service_class_name(ServiceClass c) {
  return c == ServiceClass::IntensiveComputation ? "intensive_computation" : "high_throughput";
}

inline std::optional<ServiceClass> service_class_from(std::string_view s) {
  if (s == "intensive_computation") return ServiceClass::IntensiveComputation;
  if (s == "high_throughput") return ServiceClass::HighThroughput;
  return std::nullopt;
}

/// Shared managed set: always-on NFs every template lists. The dedicated
/// (non-shared) tier is what remains — per-APP entries named "app:<service>".
inline const std::set<std::string>& shared_managed_nfs() {
  static const std::set<std::string> kShared{"udm", "nrf", "srf", "cpcf", "asf", "upf"};
  return kShared;
}

inline bool is_app_entry(const std::string& managed_id) { return starts_with(managed_id, "app:"); }
inline std::string app_service_name(const std::string& managed_id) { return managed_id.substr(4); }

struct TemplateAttributes {
  std::string table;
  std::vector<std::string> schema;
  std::vector<std::vector<std::string>> rows;
};

/// Predefined, resource-free three-tier description of an application class:
/// Managed NFs / Attributes / Actions. Holds no pods and no grants; those
/// belong to instances.
struct Template {
  std::string template_id;
  ServiceClass app_class = ServiceClass::IntensiveComputation;
  std::vector<std::string> managed_nfs;
  TemplateAttributes attributes;
  std::vector<std::string> actions;
  ResourceVector resource_profile;  // per pod
  std::map<std::string, VirtTime> container_costs;

  std::vector<std::string> dedicated_apps() const {
    std::vector<std::string> out;
    for (const auto& id : managed_nfs) {
      if (!shared_managed_nfs().count(id)) out.push_back(id);
    }
    return out;
  }

  VirtTime container_cost(const std::string& managed_id) const {
    auto it = container_costs.find(managed_id);
    return it == container_costs.end() ? VirtTime::from_units(1) : it->second;
  }
};

/// Single-template invariants; the violated one is named in the error.
inline Status validate_template(const Template& t) {
  if (t.template_id.empty()) return {Errc::InvalidTemplate, "template_id is empty"};
  for (const auto& required : {"srf", "cpcf", "udm", "nrf"}) {
    if (std::find(t.managed_nfs.begin(), t.managed_nfs.end(), required) == t.managed_nfs.end())
      return {Errc::InvalidTemplate, std::string("shared set: managed_nfs must include ") + required};
  }
  if (t.dedicated_apps().empty())
    return {Errc::InvalidTemplate, "dedicated set: template manages no APPs"};
  for (const auto& id : t.dedicated_apps()) {
    if (!is_app_entry(id))
      return {Errc::InvalidTemplate, "dedicated set: unknown non-APP entry " + id};
  }
  if (t.attributes.table.empty()) return {Errc::InvalidTemplate, "attributes: table name is empty"};
  if (t.attributes.schema.empty()) return {Errc::InvalidTemplate, "attributes: schema is empty"};
  for (const auto& row : t.attributes.rows) {
    if (row.size() != t.attributes.schema.size())
      return {Errc::InvalidTemplate, "attributes: row arity differs from schema"};
  }
  if (!t.resource_profile.non_negative() || t.resource_profile.is_zero())
    return {Errc::InvalidTemplate, "resource_profile must be non-negative and non-zero"};
  return Status::success();
}

/// Dedicated tiers of any two registered templates must not overlap.
inline Status validate_disjoint(const Template& a, const Template& b) {
  for (const auto& id : a.dedicated_apps()) {
    const auto bs = b.dedicated_apps();
    if (std::find(bs.begin(), bs.end(), id) != bs.end())
      return {Errc::InvalidTemplate,
              "dedicated sets of " + a.template_id + " and " + b.template_id + " overlap on " + id};
  }
  return Status::success();
}

// ---- JSON template definition files ----

inline nlohmann::json template_to_json(const Template& t) {
  nlohmann::json j;
  j["template_id"] = t.template_id;
  j["app_class"] = service_class_name(t.app_class);
  j["managed_nfs"] = t.managed_nfs;
  j["attributes"] = {{"table", t.attributes.table},
                     {"schema", t.attributes.schema},
                     {"rows", t.attributes.rows}};
  j["actions"] = t.actions;
  j["resource_profile"] = {{"cpu", t.resource_profile.cpu_millicores},
                           {"memory", static_cast<double>(t.resource_profile.memory_kb) / 1000.0},
                           {"storage", static_cast<double>(t.resource_profile.storage_kb) / 1000.0},
                           {"bandwidth", static_cast<double>(t.resource_profile.bandwidth_kbps) / 1000.0}};
  nlohmann::json costs = nlohmann::json::object();
  for (const auto& [id, cost] : t.container_costs) costs[id] = cost.seconds();
  j["container_costs"] = std::move(costs);
  return j;
}

inline Result<Template> template_from_json(const nlohmann::json& j) {
  if (!j.is_object()) return Error{Errc::ConfigError, "template definition must be a JSON object"};
  Template t;
  try {
    t.template_id = j.at("template_id").get<std::string>();
    auto cls = service_class_from(j.at("app_class").get<std::string>());
    if (!cls) return Error{Errc::ConfigError, "app_class must be intensive_computation or high_throughput"};
    t.app_class = *cls;
    t.managed_nfs = j.at("managed_nfs").get<std::vector<std::string>>();
    const auto& attrs = j.at("attributes");
    t.attributes.table = attrs.at("table").get<std::string>();
    t.attributes.schema = attrs.at("schema").get<std::vector<std::string>>();
    t.attributes.rows = attrs.value("rows", std::vector<std::vector<std::string>>{});
    t.actions = j.value("actions", std::vector<std::string>{});
    const auto& rp = j.at("resource_profile");
    t.resource_profile = ResourceVector::of(rp.value("cpu", std::int64_t{0}), rp.value("memory", 0.0),
                                            rp.value("storage", 0.0), rp.value("bandwidth", 0.0));
    const nlohmann::json costs = j.value("container_costs", nlohmann::json::object());
    for (const auto& [id, cost] : costs.items()) {
      t.container_costs[id] = VirtTime::from_seconds(cost.get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    return Error{Errc::ConfigError, std::string("template definition: ") + e.what()};
  }
  if (auto st = validate_template(t); !st.ok()) return st.error();
  return t;
}

inline Result<Template> load_template_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Errc::IoError, "cannot open " + path};
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) return Error{Errc::ConfigError, "invalid JSON in " + path};
  return template_from_json(j);
}

// ---- built-in templates (the two application classes) ----

inline Template builtin_intensive_template() {
  Template t;
  t.template_id = "tpl-intensive";
  t.app_class = ServiceClass::IntensiveComputation;
  t.managed_nfs = {"udm", "nrf", "srf",
                   "cpcf", "asf", "upf",
                   "app:sum", "app:prime_sum", "app:face_recognition"};
  t.attributes.table = "tpl_intensive_params";
  t.attributes.schema = {"param", "value"};
  t.attributes.rows = {
      {"rate_cpu", "2"},
      {"rate_mem", "1"},
      {"cpu_rate_units_per_s", "1000"},
      {"svc:sum:cpu_mc", "250"},
      {"svc:sum:work", "125"},
      {"svc:sum:mem_mb", "12"},
      {"svc:prime_sum:cpu_mc", "500"},
      {"svc:prime_sum:work", "500"},
      {"svc:prime_sum:mem_mb", "20"},
      {"svc:face_recognition:cpu_mc", "2000"},   // 4x the prime-sum load
      {"svc:face_recognition:work", "2000"},     // 4x the prime-sum baseline
      {"svc:face_recognition:mem_mb", "83.9"},
      {"svc:face_recognition:image_mb", "5"},
  };
  t.actions = {"invoke_service", "record_charge"};
  t.resource_profile = ResourceVector::of(500, 64, 100, 50);
  t.container_costs = {{"app:sum", VirtTime::from_units(2)},
                       {"app:prime_sum", VirtTime::from_units(3)},
                       {"app:face_recognition", VirtTime::from_units(5)}};
  return t;
}

inline Template builtin_high_throughput_template() {
  Template t;
  t.template_id = "tpl-video";
  t.app_class = ServiceClass::HighThroughput;
  t.managed_nfs = {"udm", "nrf", "srf", "cpcf", "asf", "upf", "app:video_cache"};
  t.attributes.table = "tpl_video_params";
  t.attributes.schema = {"param", "value"};
  t.attributes.rows = {
      {"serve_compute_edge_s", "0.13"},
      {"serve_compute_cloud_s", "0.15"},
      {"svc:video_cache:cpu_mc", "300"},
      {"svc:video_cache:mem_mb", "24"},
  };
  t.actions = {"invoke_service", "update_popularity"};
  t.resource_profile = ResourceVector::of(300, 24, 500, 100);
  t.container_costs = {{"app:video_cache", VirtTime::from_units(2)}};
  return t;
}

}  // namespace osmec
