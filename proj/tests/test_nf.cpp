#include <doctest.h>

#include "osmec/osmec.hpp"
#include "support.hpp"

using namespace osmec;

namespace {

struct NfFixture {
  SimEngine engine;
  EventLog log;
  ServiceBus bus{engine, log};
  Udm udm{engine, log};
  Nrf nrf{engine, log, VirtTime::from_units(50)};
  Srf srf{engine, log, bus};
  Asf asf{engine, log};
  Upf upf{engine, log};

  NfFixture() {
    bus.register_endpoint("udm", udm.make_handler());
    bus.register_endpoint("nrf", nrf.make_handler());
    bus.register_endpoint("srf", srf.make_handler());
    bus.register_endpoint("asf", asf.make_handler());
    bus.register_endpoint("upf", upf.make_handler());
    udm.create_table(Srf::kAppsTable,
                     {"app_id", "udm_table", "image_location", "access_endpoint", "registered_at"});
  }
};

}  // namespace

TEST_SUITE_BEGIN("nf");

// ---- UDM ----

TEST_CASE("udm insert then query returns the row") {
  NfFixture f;
  REQUIRE(f.udm.create_table("t", {"k", "v"}).ok());
  REQUIRE(f.udm.insert("t", {"a", "1"}).ok());
  auto r = f.udm.query("t", "a");
  REQUIRE(r.ok());
  REQUIRE(r.value().has_value());
  CHECK(*r.value() == Row{"a", "1"});
}

TEST_CASE("udm query of an absent key is absent, not an error") {
  NfFixture f;
  f.udm.create_table("t", {"k", "v"});
  auto r = f.udm.query("t", "missing");
  REQUIRE(r.ok());
  CHECK(!r.value().has_value());
}

TEST_CASE("udm error paths") {
  NfFixture f;
  f.udm.create_table("t", {"k", "v"});
  CHECK(f.udm.query("nope", "a").code() == Errc::TableNotFound);
  CHECK(f.udm.update("t", "ghost", {"ghost", "x"}).code() == Errc::KeyNotFound);
  CHECK(f.udm.erase("t", "ghost").code() == Errc::KeyNotFound);
  REQUIRE(f.udm.insert("t", {"a", "1"}).ok());
  CHECK(f.udm.insert("t", {"a", "2"}).code() == Errc::DuplicateKey);
  CHECK(f.udm.insert("t", {"b"}).code() == Errc::ArityMismatch);
  CHECK(f.udm.create_table("t", {"k"}).code() == Errc::DuplicateTable);
}

TEST_CASE("udm crud algebra") {
  NfFixture f;
  f.udm.create_table("t", {"k", "v"});

  // query o insert = row
  REQUIRE(f.udm.insert("t", {"x", "1"}).ok());
  CHECK(*f.udm.query("t", "x").value() == Row{"x", "1"});

  // query o delete = absent
  REQUIRE(f.udm.erase("t", "x").ok());
  CHECK(!f.udm.query("t", "x").value().has_value());

  // update == delete + insert for the same key
  REQUIRE(f.udm.insert("t", {"y", "1"}).ok());
  REQUIRE(f.udm.update("t", "y", {"y", "2"}).ok());
  const auto updated = *f.udm.query("t", "y").value();
  REQUIRE(f.udm.erase("t", "y").ok());
  REQUIRE(f.udm.insert("t", {"y", "2"}).ok());
  CHECK(*f.udm.query("t", "y").value() == updated);
}

TEST_CASE("udm last writer wins") {
  NfFixture f;
  f.udm.create_table("t", {"k", "v"});
  f.udm.insert("t", {"k1", "first"});
  f.udm.update("t", "k1", {"k1", "second"});
  f.udm.update("t", "k1", {"k1", "third"});
  CHECK((*f.udm.query("t", "k1").value())[1] == "third");
}

TEST_CASE("udm snapshot round-trips through a file") {
  NfFixture f;
  f.udm.create_table("t", {"k", "v"});
  f.udm.insert("t", {"a", "1"});
  const std::string path = "udm_snapshot_test.json";
  REQUIRE(f.udm.snapshot_to_file(path).ok());
  NfFixture g;
  REQUIRE(g.udm.load_snapshot(path).ok());
  CHECK(*g.udm.query("t", "a").value() == Row{"a", "1"});
  std::remove(path.c_str());
}

TEST_CASE("udm bus endpoint covers crud") {
  NfFixture f;
  auto post = [&](const std::string& path, const nlohmann::json& body) {
    return f.bus.send_request("udm", Message::request(Method::Post, path, body.dump()));
  };
  CHECK(post("/sbi/udm/users", {{"schema", {"id", "name"}}}).value().status == 201);
  CHECK(post("/sbi/udm/users/u1", {{"row", {"u1", "ada"}}}).value().status == 201);
  auto got = f.bus.send_request("udm", Message::request(Method::Get, "/sbi/udm/users/u1"));
  CHECK(got.value().status == 200);
  auto put = f.bus.send_request(
      "udm", Message::request(Method::Put, "/sbi/udm/users/u1",
                              nlohmann::json{{"row", {"u1", "grace"}}}.dump()));
  CHECK(put.value().status == 200);
  auto del = f.bus.send_request("udm", Message::request(Method::Delete, "/sbi/udm/users/u1"));
  CHECK(del.value().status == 200);
  auto absent = f.bus.send_request("udm", Message::request(Method::Get, "/sbi/udm/users/u1"));
  CHECK(absent.value().status == 404);
}

// ---- NRF ----

TEST_CASE("general NFs resolve locally without a fetch event") {
  NfFixture f;
  REQUIRE(f.nrf.store_image(NfDescriptor::make("udm", NfKind::Udm)).ok());
  auto r = f.nrf.resolve("udm");
  REQUIRE(r.ok());
  CHECK(r.value().source == StorageClass::Local);
  CHECK(r.value().fetch_cost.is_zero());
  CHECK(test::count_kind(f.log.records(), EventKind::RemoteImageFetch) == 0);
}

TEST_CASE("dedicated NFs resolve from the remote repository with one fetch event") {
  NfFixture f;
  REQUIRE(f.nrf.store_image(NfDescriptor::make("asf", NfKind::Asf)).ok());
  auto r = f.nrf.resolve("asf");
  REQUIRE(r.ok());
  CHECK(r.value().source == StorageClass::Remote);
  CHECK(r.value().fetch_cost == VirtTime::from_units(50));
  CHECK(test::count_kind(f.log.records(), EventKind::RemoteImageFetch) == 1);
}

TEST_CASE("unknown image is ImageNotFound") {
  NfFixture f;
  CHECK(f.nrf.resolve("nonexistent").code() == Errc::ImageNotFound);
}

TEST_CASE("nrf bus endpoint carries the fetch delay as handler cost") {
  NfFixture f;
  f.nrf.store_image(NfDescriptor::make("face_recognition", NfKind::App));
  auto r = f.bus.send_request("nrf",
                              Message::request(Method::Get, "/sbi/nrf/images/face_recognition"));
  REQUIRE(r.ok());
  CHECK(r.value().status == 200);
  CHECK(f.engine.now() == VirtTime::from_units(50));
}

TEST_CASE("storage class partition holds for every descriptor kind") {
  for (auto kind : {NfKind::Udm, NfKind::Nrf, NfKind::Srf, NfKind::Cpcf, NfKind::Upf}) {
    CHECK(NfDescriptor::make("x", kind).storage_class == StorageClass::Local);
  }
  for (auto kind : {NfKind::Asf, NfKind::App}) {
    CHECK(NfDescriptor::make("x", kind).storage_class == StorageClass::Remote);
  }
}

// ---- SRF ----

TEST_CASE("app registration inserts, stores and exposes, in that order") {
  NfFixture f;
  auto r = f.srf.register_app(NfDescriptor::make("prime_sum", NfKind::App), "tbl");
  REQUIRE(r.ok());
  CHECK(f.nrf.has_image("prime_sum"));
  CHECK(f.bus.has_endpoint("app:prime_sum"));
  CHECK(f.udm.query(Srf::kAppsTable, "prime_sum").value().has_value());

  // UDM insert happens before the NRF store, which precedes the endpoint
  std::size_t udm_at = 0, nrf_at = 0, ep_at = 0;
  for (const auto& rec : f.log.records()) {
    if (rec.kind == EventKind::UdmInsert && udm_at == 0) udm_at = rec.seq;
    if (rec.kind == EventKind::NrfImageStored && nrf_at == 0) nrf_at = rec.seq;
    if (rec.kind == EventKind::EndpointRegistered && rec.subject == "app:prime_sum" && ep_at == 0)
      ep_at = rec.seq;
  }
  REQUIRE(udm_at > 0);
  REQUIRE(nrf_at > 0);
  REQUIRE(ep_at > 0);
  CHECK(udm_at < nrf_at);
  CHECK(nrf_at < ep_at);
}

TEST_CASE("re-registering an app updates in place") {
  NfFixture f;
  auto first = f.srf.register_app(NfDescriptor::make("prime_sum", NfKind::App), "tbl");
  REQUIRE(first.ok());
  auto second = f.srf.register_app(NfDescriptor::make("prime_sum", NfKind::App), "tbl2");
  REQUIRE(second.ok());
  CHECK(second.value().image_location == first.value().image_location);
  const auto row = *f.udm.query(Srf::kAppsTable, "prime_sum").value();
  CHECK(row[1] == "tbl2");
  // still exactly one endpoint registration for the app
  std::size_t endpoints = 0;
  for (const auto& rec : f.log.records()) {
    if (rec.kind == EventKind::EndpointRegistered && rec.subject == "app:prime_sum") ++endpoints;
  }
  CHECK(endpoints == 1);
}

TEST_CASE("registering a non-APP descriptor is a precondition violation") {
  NfFixture f;
  auto r = f.srf.register_app(NfDescriptor::make("udm", NfKind::Udm), "tbl");
  REQUIRE(!r.ok());
  CHECK(r.code() == Errc::PreconditionViolated);
}

TEST_CASE("srf bus endpoint registers apps") {
  NfFixture f;
  nlohmann::json body = {{"app_id", "sum"}, {"udm_table", "tbl"}};
  auto r = f.bus.send_request("srf", Message::request(Method::Post, "/sbi/srf/apps", body.dump()));
  REQUIRE(r.ok());
  CHECK(r.value().status == 201);
  CHECK(f.bus.has_endpoint("app:sum"));
}

// ---- CPCF ----

TEST_CASE("cpcf identifies SBM frames as http") {
  Message m = Message::request(Method::Get, "/sbi/udm/health");
  auto r = Cpcf::identify(sbm::serialize(m));
  REQUIRE(r.ok());
  CHECK(r.value() == ProtocolKind::Http);
}

TEST_CASE("cpcf identifies XMEC1 payloads as legacy") {
  legacy::LegacyRequest lr{"intensive_computation", "sum", "{}", ""};
  auto r = Cpcf::identify(legacy::encode(lr));
  REQUIRE(r.ok());
  CHECK(r.value() == ProtocolKind::Legacy);
}

TEST_CASE("cpcf rejects unknown protocols") {
  CHECK(Cpcf::identify("????").code() == Errc::UnrecognizedProtocol);
  CHECK(Cpcf::convert("????").code() == Errc::UnrecognizedProtocol);
}

TEST_CASE("converting an http request is byte identity") {
  Message m = Message::request(Method::Post, "/ebi/mano/requests", "{\"service_class\":\"x\"}");
  m.correlation_id = 5;
  const std::string bytes = sbm::serialize(m);
  auto converted = Cpcf::convert(bytes);
  REQUIRE(converted.ok());
  CHECK(sbm::serialize(converted.value()) == bytes);
}

TEST_CASE("converting a legacy request re-encapsulates it") {
  legacy::LegacyRequest lr{"intensive_computation", "prime_sum", "{\"n\":10}", "parallel"};
  const std::string payload = legacy::encode(lr);
  auto converted = Cpcf::convert(payload);
  REQUIRE(converted.ok());
  CHECK(converted.value().path == "/ebi/mano/requests");
  CHECK(converted.value().method == Method::Post);
  CHECK(converted.value().header("x-origin-protocol").value_or("") == "legacy");
  CHECK(converted.value().body == payload);
  auto decoded = legacy::decode(converted.value().body);
  REQUIRE(decoded.ok());
  CHECK(decoded.value().service_name == "prime_sum");
}

TEST_CASE("legacy codec round-trips and rejects truncation") {
  legacy::LegacyRequest lr{"high_throughput", "video_cache", "{\"video_id\":\"v\"}", "sequential"};
  const std::string bytes = legacy::encode(lr);
  auto back = legacy::decode(bytes);
  REQUIRE(back.ok());
  CHECK(back.value().service_class == lr.service_class);
  CHECK(back.value().service_name == lr.service_name);
  CHECK(back.value().input_json == lr.input_json);
  CHECK(back.value().mode == lr.mode);
  CHECK(legacy::decode(bytes.substr(0, bytes.size() - 1)).code() == Errc::MalformedFrame);
  CHECK(legacy::decode("NOPE!").code() == Errc::UnrecognizedProtocol);
}

// ---- ASF ----

TEST_CASE("asf selects the running instance for a service") {
  NfFixture f;
  f.asf.activate({"intensive_computation", "prime_sum", 3, "app:prime_sum#3"});
  auto r = f.asf.select("intensive_computation", "prime_sum");
  REQUIRE(r.ok());
  CHECK(r.value().endpoint == "app:prime_sum#3");
}

TEST_CASE("asf with no active instance reports NoActiveApp") {
  NfFixture f;
  CHECK(f.asf.select("intensive_computation", "prime_sum").code() == Errc::NoActiveApp);
}

TEST_CASE("asf tie-break picks the lowest instance id") {
  NfFixture f;
  f.asf.activate({"intensive_computation", "sum", 7, "app:sum#7"});
  f.asf.activate({"intensive_computation", "sum", 4, "app:sum#4"});
  auto r = f.asf.select("intensive_computation", "sum");
  REQUIRE(r.ok());
  CHECK(r.value().instance_id == 4);
  f.asf.deactivate(4);
  CHECK(f.asf.select("intensive_computation", "sum").value().instance_id == 7);
}

TEST_CASE("asf select endpoint answers over the bus") {
  NfFixture f;
  f.asf.activate({"high_throughput", "video_cache", 2, "app:video_cache#2"});
  nlohmann::json body = {{"service_class", "high_throughput"}, {"service_name", "video_cache"}};
  auto r = f.bus.send_request("asf", Message::request(Method::Post, "/sbi/asf/select", body.dump()));
  REQUIRE(r.ok());
  CHECK(r.value().status == 200);
  CHECK(nlohmann::json::parse(r.value().body)["endpoint"] == "app:video_cache#2");
  nlohmann::json missing = {{"service_class", "high_throughput"}, {"service_name", "nope"}};
  CHECK(f.bus.send_request("asf", Message::request(Method::Post, "/sbi/asf/select", missing.dump()))
            .value()
            .status == 404);
}

// ---- UPF ----

TEST_CASE("upf routes cached content to the edge and the rest to the cloud") {
  NfFixture f;
  f.upf.set_content_locator([](const std::string& id) -> std::optional<std::string> {
    if (id == "v1") return "edge";
    if (id == "v2") return "cloud";
    return std::nullopt;
  });
  auto edge = f.upf.route(std::string("v1"), std::nullopt);
  REQUIRE(edge.ok());
  CHECK(edge.value().kind == Upf::RouteKind::EdgeHit);

  auto cloud = f.upf.route(std::string("v2"), std::nullopt);
  REQUIRE(cloud.ok());
  CHECK(cloud.value().kind == Upf::RouteKind::CloudForward);
  CHECK(cloud.value().path_descriptor == "edge->switch->cloud");

  CHECK(f.upf.route(std::string("ghost"), std::nullopt).code() == Errc::NoRoute);
  CHECK(f.upf.route(std::nullopt, std::string("mars")).code() == Errc::NoRoute);
  CHECK(test::count_kind(f.log.records(), EventKind::EdgeHit) == 1);
  CHECK(test::count_kind(f.log.records(), EventKind::CloudForward) == 1);
}

TEST_CASE("every nf endpoint answers the health convention") {
  NfFixture f;
  for (const std::string nf : {"udm", "nrf", "srf", "asf", "upf"}) {
    auto r = f.bus.send_request(nf, Message::request(Method::Get, "/sbi/" + nf + "/health"));
    REQUIRE(r.ok());
    CHECK(r.value().status == 200);
  }
}

TEST_SUITE_END();
