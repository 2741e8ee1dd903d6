#pragma once

#include <json.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "osmec/bus/router.hpp"
#include "osmec/core/result.hpp"
#include "osmec/nf/wire.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

using Row = std::vector<std::string>;

/// One service's data table. The first schema column is the primary key.
struct DataTable {
  std::string service_name;
  std::vector<std::string> schema;
  std::map<std::string, Row> rows;  // key -> full row, key order
};

/// Unified data management: the shared in-memory table store with key-value
/// CRUD semantics. Updates are last-writer-wins under the serialized loop.
class Udm {
 public:
  Udm(SimEngine& engine, EventLog& log) : engine_(engine), log_(log) {}

  Status create_table(const std::string& name, std::vector<std::string> schema) {
    if (tables_.count(name)) return {Errc::DuplicateTable, name};
    if (schema.empty()) return {Errc::ArityMismatch, "schema must name at least a key column"};
    tables_[name] = DataTable{name, std::move(schema), {}};
    log_.append(engine_.now(), EventKind::UdmTableCreated, "udm", Payload{}.set("table", name));
    return Status::success();
  }

  bool has_table(const std::string& name) const { return tables_.count(name) != 0; }

  Status insert(const std::string& table, Row row) {
    auto* t = find(table);
    if (!t) return {Errc::TableNotFound, table};
    if (row.size() != t->schema.size())
      return {Errc::ArityMismatch, table + ": row arity " + std::to_string(row.size())};
    const std::string key = row[0];
    if (t->rows.count(key)) return {Errc::DuplicateKey, table + "/" + key};
    t->rows.emplace(key, std::move(row));
    log_.append(engine_.now(), EventKind::UdmInsert, "udm",
                Payload{}.set("table", table).set("key", key));
    return Status::success();
  }

  /// absent is a value, not an error.
  Result<std::optional<Row>> query(const std::string& table, const std::string& key) const {
    const auto* t = find(table);
    if (!t) return Error{Errc::TableNotFound, table};
    auto it = t->rows.find(key);
    if (it == t->rows.end()) return std::optional<Row>{};
    return std::optional<Row>{it->second};
  }

  Status update(const std::string& table, const std::string& key, Row row) {
    auto* t = find(table);
    if (!t) return {Errc::TableNotFound, table};
    if (row.size() != t->schema.size())
      return {Errc::ArityMismatch, table + ": row arity " + std::to_string(row.size())};
    auto it = t->rows.find(key);
    if (it == t->rows.end()) return {Errc::KeyNotFound, table + "/" + key};
    if (row[0] != key) return {Errc::ArityMismatch, "row key differs from addressed key"};
    it->second = std::move(row);
    log_.append(engine_.now(), EventKind::UdmUpdate, "udm",
                Payload{}.set("table", table).set("key", key));
    return Status::success();
  }

  Status erase(const std::string& table, const std::string& key) {
    auto* t = find(table);
    if (!t) return {Errc::TableNotFound, table};
    if (t->rows.erase(key) == 0) return {Errc::KeyNotFound, table + "/" + key};
    log_.append(engine_.now(), EventKind::UdmDelete, "udm",
                Payload{}.set("table", table).set("key", key));
    return Status::success();
  }

  const DataTable* table(const std::string& name) const { return find(name); }

  /// Convenience for parameter tables with schema [param, value].
  std::optional<std::string> param(const std::string& table, const std::string& key) const {
    auto r = query(table, key);
    if (!r.ok() || !r.value().has_value() || r.value()->size() < 2) return std::nullopt;
    return (*r.value())[1];
  }

  // ---- snapshot-to-file persistence (optional) ----

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, t] : tables_) {
      nlohmann::json jt;
      jt["schema"] = t.schema;
      jt["rows"] = nlohmann::json::array();
      for (const auto& [key, row] : t.rows) jt["rows"].push_back(row);
      j[name] = std::move(jt);
    }
    return j;
  }

  Status snapshot_to_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) return {Errc::IoError, "cannot open " + path};
    out << to_json().dump(2) << '\n';
    return out ? Status::success() : Status{Errc::IoError, "write failed: " + path};
  }

  Status load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {Errc::IoError, "cannot open " + path};
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return {Errc::ConfigError, "bad snapshot: " + path};
    tables_.clear();
    for (auto& [name, jt] : j.items()) {
      DataTable t;
      t.service_name = name;
      t.schema = jt["schema"].get<std::vector<std::string>>();
      for (const auto& row : jt["rows"]) {
        Row r = row.get<Row>();
        if (r.empty() || r.size() != t.schema.size())
          return {Errc::ConfigError, "bad snapshot row in " + name};
        t.rows[r[0]] = r;
      }
      tables_[name] = std::move(t);
    }
    return Status::success();
  }

  /// SBI surface: /sbi/udm/{table} (POST creates), /sbi/udm/{table}/{key}
  /// (GET/POST/PUT/DELETE).
  BusHandler make_handler() {
    auto router = std::make_shared<Router>("/sbi/udm");
    router->add(Method::Post, "/sbi/udm/{table}", [this](const Message& m, const RouteParams& p) {
      auto body = parse_json_body(m);
      if (!body.ok()) return reply(error_response(m.path, body.error()));
      if (!body.value().contains("schema"))
        return reply(error_response(m.path, Error{Errc::MalformedFrame, "missing schema"}));
      auto st = create_table(p.at("table"), body.value()["schema"].get<std::vector<std::string>>());
      if (!st.ok()) return reply(error_response(m.path, st.error()));
      return reply(json_response(m.path, 201, {{"table", p.at("table")}}));
    });
    router->add(Method::Get, "/sbi/udm/{table}/{key}", [this](const Message& m, const RouteParams& p) {
      auto r = query(p.at("table"), p.at("key"));
      if (!r.ok()) return reply(error_response(m.path, r.error()));
      if (!r.value().has_value()) return reply(json_response(m.path, 404, {{"absent", true}}));
      return reply(json_response(m.path, 200, {{"row", *r.value()}}));
    });
    router->add(Method::Post, "/sbi/udm/{table}/{key}", [this](const Message& m, const RouteParams& p) {
      auto body = parse_json_body(m);
      if (!body.ok()) return reply(error_response(m.path, body.error()));
      Row row = body.value().value("row", Row{});
      if (row.empty() || row[0] != p.at("key"))
        return reply(error_response(m.path, Error{Errc::ArityMismatch, "row[0] must equal key"}));
      auto st = insert(p.at("table"), std::move(row));
      if (!st.ok()) return reply(error_response(m.path, st.error()));
      return reply(json_response(m.path, 201, {{"key", p.at("key")}}));
    });
    router->add(Method::Put, "/sbi/udm/{table}/{key}", [this](const Message& m, const RouteParams& p) {
      auto body = parse_json_body(m);
      if (!body.ok()) return reply(error_response(m.path, body.error()));
      auto st = update(p.at("table"), p.at("key"), body.value().value("row", Row{}));
      if (!st.ok()) return reply(error_response(m.path, st.error()));
      return reply(json_response(m.path, 200, {{"key", p.at("key")}}));
    });
    router->add(Method::Delete, "/sbi/udm/{table}/{key}",
                [this](const Message& m, const RouteParams& p) {
                  auto st = erase(p.at("table"), p.at("key"));
                  if (!st.ok()) return reply(error_response(m.path, st.error()));
                  return reply(json_response(m.path, 200, {{"key", p.at("key")}}));
                });
    return [router](const Message& m) { return (*router)(m); };
  }

 private:
  DataTable* find(const std::string& name) {
    auto it = tables_.find(name);
    return it == tables_.end() ? nullptr : &it->second;
  }
  const DataTable* find(const std::string& name) const {
    auto it = tables_.find(name);
    return it == tables_.end() ? nullptr : &it->second;
  }

  SimEngine& engine_;
  EventLog& log_;
  std::map<std::string, DataTable> tables_;
};

}  // namespace osmec
