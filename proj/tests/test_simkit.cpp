#include <doctest.h>

#include "osmec/osmec.hpp"
#include "support.hpp"

using namespace osmec;

namespace {

Template tiny_template(std::vector<std::pair<std::string, std::int64_t>> containers) {
  Template t;
  t.template_id = "tpl-tiny";
  t.app_class = ServiceClass::IntensiveComputation;
  t.managed_nfs = {"udm", "nrf", "srf", "cpcf", "asf", "upf"};
  for (const auto& [name, cost] : containers) {
    t.managed_nfs.push_back("app:" + name);
    t.container_costs["app:" + name] = VirtTime::from_units(cost);
  }
  t.attributes.table = "tpl_tiny_params";
  t.attributes.schema = {"param", "value"};
  t.attributes.rows = {{"rate_cpu", "1"}, {"rate_mem", "1"}, {"cpu_rate_units_per_s", "1000"}};
  t.actions = {"invoke_service"};
  t.resource_profile = ResourceVector::of(100, 64, 10, 10);
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("simkit");

TEST_CASE("the scheduler runs events in time order with stable ties") {
  SimEngine engine;
  std::vector<int> order;
  engine.schedule_at(VirtTime::from_units(5), [&] { order.push_back(3); });
  engine.schedule_at(VirtTime::from_units(1), [&] { order.push_back(1); });
  engine.schedule_at(VirtTime::from_units(5), [&] { order.push_back(4); });  // tie: later tick
  engine.schedule_at(VirtTime::from_units(2), [&] {
    order.push_back(2);
    engine.schedule_in(VirtTime::from_units(10), [&] { order.push_back(5); });
  });
  engine.run();
  CHECK(order == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(engine.now() == VirtTime::from_units(12));
}

TEST_CASE("event records round-trip through their canonical lines") {
  EventLog log;
  log.append(VirtTime::from_seconds(1.5), EventKind::RequestReceived, "request:1",
             Payload{}.set("origin", "cli").set("svc", "sum"));
  log.append(VirtTime::from_seconds(2.25), EventKind::ContainerStarted, "pod:3",
             Payload{}.set("container", "app:sum#1").set("instance", std::uint64_t{1}));
  const std::string text = log.to_text();
  const auto parsed = EventLog::parse_text(text);
  REQUIRE(parsed.size() == 2);
  CHECK(records_to_text(parsed) == text);
  CHECK(fnv1a64(records_to_text(parsed)) == log.digest());
}

TEST_CASE("log timestamps never precede their predecessors") {
  EdgeSystem system([] {
    SystemConfig cfg;
    cfg.nodes.push_back(NodeSpec{ResourceVector::of(8000, 32768, 100000, 1000), 0});
    return cfg;
  }());
  system.submit_request("scenario", "http", "intensive_computation", "prime_sum", {{"n", 50}},
                        StartMode::Parallel, VirtTime::zero());
  system.run();
  const auto& recs = system.log().records();
  for (std::size_t i = 1; i < recs.size(); ++i) {
    CHECK(recs[i].seq == recs[i - 1].seq + 1);
    CHECK(recs[i - 1].t <= recs[i].t);
  }
  // namespace totality: every message on the wire carries one of the three
  // interface prefixes
  for (const auto& r : recs) {
    if (r.kind != EventKind::BusSend) continue;
    CHECK(path_has_namespace(r.payload.get("path").value_or("")));
  }
}

TEST_CASE("measure_instantiation matches max plus overhead in parallel mode") {
  const auto t = tiny_template({{"a", 5}, {"b", 7}, {"c", 4}});
  auto d = measure_instantiation(t, StartMode::Parallel);
  REQUIRE(d.ok());
  CHECK(d.value() == VirtTime::from_units(8));
}

TEST_CASE("measure_instantiation matches sum plus overhead in sequential mode") {
  const auto t = tiny_template({{"a", 5}, {"b", 7}, {"c", 4}});
  auto d = measure_instantiation(t, StartMode::Sequential);
  REQUIRE(d.ok());
  CHECK(d.value() == VirtTime::from_units(17));
}

TEST_CASE("parallel narrows the gap between the built-in templates") {
  const Template intensive = builtin_intensive_template();
  const Template video = builtin_high_throughput_template();
  const auto ip = measure_instantiation(intensive, StartMode::Parallel).value();
  const auto vp = measure_instantiation(video, StartMode::Parallel).value();
  const auto is = measure_instantiation(intensive, StartMode::Sequential).value();
  const auto vs = measure_instantiation(video, StartMode::Sequential).value();
  CHECK(ip > vp);  // three containers take a little longer than one
  const auto parallel_gap = ip - vp;
  const auto sequential_gap = is - vs;
  CHECK(parallel_gap < sequential_gap);
}

TEST_CASE("single-container templates instantiate equally in both modes") {
  const auto t = tiny_template({{"only", 6}});
  CHECK(measure_instantiation(t, StartMode::Parallel).value() ==
        measure_instantiation(t, StartMode::Sequential).value());
}

TEST_CASE("fig8 reproduces the release asymmetry") {
  auto cfg = parse_scenario(scenarios::fig8());
  REQUIRE(cfg.ok());
  auto run = run_scenario(cfg.value());
  REQUIRE(run.ok());
  const auto recs = EventLog::parse_text(run.value().events_text);

  // per instance: CpuReleased at the ServiceCompleted instant, MemoryReleased
  // exactly 2 s later
  std::map<std::uint64_t, VirtTime> completed, cpu_released, memory_released;
  for (const auto& r : recs) {
    if (r.kind == EventKind::ServiceCompleted) {
      std::uint64_t iid = 0;
      parse_u64(std::string_view(r.subject).substr(9), iid);
      completed[iid] = r.t;
    }
    if (r.kind == EventKind::CpuReleased || r.kind == EventKind::MemoryReleased) {
      std::uint64_t iid = 0;
      if (auto v = r.payload.get("instance")) parse_u64(*v, iid);
      (r.kind == EventKind::CpuReleased ? cpu_released : memory_released)[iid] = r.t;
    }
  }
  REQUIRE(completed.size() == 2);
  for (const auto& [iid, t_completed] : completed) {
    CHECK(cpu_released.at(iid) == t_completed);
    CHECK(memory_released.at(iid) == t_completed + VirtTime::from_seconds(2.0));
  }
}

TEST_CASE("sample_usage shows the 83.9 MB memory plateau after cpu drops") {
  auto cfg = parse_scenario(scenarios::fig8());
  REQUIRE(cfg.ok());
  auto run = run_scenario(cfg.value());
  REQUIRE(run.ok());
  const auto& rep = run.value().report;

  // face recognition is instance 2 in this scenario
  VirtTime cpu_drop, mem_drop;
  for (const auto& r : EventLog::parse_text(run.value().events_text)) {
    if (r.kind == EventKind::CpuReleased && r.payload.get("instance").value_or("") == "2")
      cpu_drop = r.t;
    if (r.kind == EventKind::MemoryReleased && r.payload.get("instance").value_or("") == "2")
      mem_drop = r.t;
  }
  const auto level = usage_level_before(rep, 1, mem_drop);
  CHECK(level.cpu_millicores == 0);
  CHECK(level.memory_kb == 83900);
  CHECK(cpu_drop < mem_drop);

  // cpu plateau ratio face : prime = 4.0
  const auto prime_peak = usage_level_before(rep, 1, VirtTime::from_seconds(54.0));
  CHECK(prime_peak.cpu_millicores == 500);
  const auto face_peak = usage_level_before(rep, 1, VirtTime::from_seconds(158.0));
  CHECK(face_peak.cpu_millicores == 2000);
}

TEST_CASE("empty usage windows yield empty series") {
  MetricsReport rep;
  CHECK(sample_usage(rep, 1, VirtTime::zero(), VirtTime::from_units(10)).empty());
}

TEST_CASE("identical seeds give byte-identical logs, different seeds do not") {
  auto cfg = parse_scenario(scenarios::fig7_2());
  REQUIRE(cfg.ok());
  // shrink for test runtime: 50 repetitions
  for (auto& r : cfg.value().requests) r.repeat = 50;
  auto a = run_scenario(cfg.value());
  auto b = run_scenario(cfg.value());
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(a.value().events_text == b.value().events_text);
  CHECK(a.value().log_hash == b.value().log_hash);
  CHECK(a.value().report == b.value().report);

  auto c = run_scenario(cfg.value(), 999);
  REQUIRE(c.ok());
  CHECK(c.value().log_hash != a.value().log_hash);  // jittered times differ
}

TEST_CASE("reports are recomputable from the persisted log") {
  auto cfg = parse_scenario(scenarios::fig9());
  REQUIRE(cfg.ok());
  auto run = run_scenario(cfg.value());
  REQUIRE(run.ok());
  const auto reparsed = EventLog::parse_text(run.value().events_text);
  const MetricsReport rebuilt = build_report(reparsed);
  CHECK(rebuilt == run.value().report);
}

TEST_CASE("empty request lists produce an empty but valid report") {
  ScenarioConfig cfg;
  cfg.system.nodes.push_back(NodeSpec{ResourceVector::of(1000, 1024, 1000, 100), 0});
  auto run = run_scenario(cfg);
  REQUIRE(run.ok());
  CHECK(run.value().report.requests_total == 0);
  CHECK(run.value().report.instantiation.empty());
  CHECK(run.value().report.log_hash != 0);  // boot preamble still hashes
  auto files = export_report(run.value().report, "empty_report_out");
  REQUIRE(files.ok());
  std::filesystem::remove_all("empty_report_out");
}

TEST_CASE("bundled scenario traces conform to the workflow") {
  for (const auto& name : {std::string("fig8"), std::string("fig9")}) {
    auto cfg = parse_scenario(*scenarios::bundled(name));
    REQUIRE(cfg.ok());
    auto run = run_scenario(cfg.value());
    REQUIRE(run.ok());
    const auto issues = check_trace_conformance(EventLog::parse_text(run.value().events_text));
    CHECK(issues.empty());
  }
}

TEST_CASE("unrecognized raw bytes fail the request at ingest") {
  SystemConfig syscfg;
  syscfg.nodes.push_back(NodeSpec{ResourceVector::of(8000, 32768, 100000, 1000), 0});
  EdgeSystem system(syscfg);
  const auto rid = system.submit_raw("scenario", "????", VirtTime::zero());
  system.run();
  const auto* rec = system.request(rid);
  REQUIRE(rec);
  CHECK(rec->outcome == RequestOutcome::Failed);
  CHECK(rec->error.find("UnrecognizedProtocol") != std::string::npos);
  CHECK(test::count_kind(system.log().records(), EventKind::RequestFailed) == 1);
  CHECK(system.mano().instances().empty());  // no instance was ever selected
}

TEST_CASE("raw SBM bytes flow through ingest like native submissions") {
  SystemConfig syscfg;
  syscfg.nodes.push_back(NodeSpec{ResourceVector::of(8000, 32768, 100000, 1000), 0});
  syscfg.remote_fetch_delay = VirtTime::zero();
  EdgeSystem system(syscfg);
  Message unified = Message::request(
      Method::Post, "/ebi/mano/requests",
      EdgeSystem::make_request_body("intensive_computation", "sum", {{"n", 4}},
                                    StartMode::Parallel)
          .dump());
  const auto rid = system.submit_raw("scenario", sbm::serialize(unified), VirtTime::zero());
  system.run();
  const auto* rec = system.request(rid);
  CHECK(rec->outcome == RequestOutcome::Completed);
  CHECK(rec->result == "10");
}

TEST_CASE("a service failure after activation rolls the instance back") {
  SystemConfig syscfg;
  syscfg.nodes.push_back(NodeSpec{ResourceVector::of(8000, 32768, 100000, 1000), 0});
  syscfg.remote_fetch_delay = VirtTime::zero();
  EdgeSystem system(syscfg);  // no videos: serving anything yields NoRoute
  const auto rid = system.submit_request("scenario", "http", "high_throughput", "video_cache",
                                         {{"video_id", "ghost"}, {"size_mb", 10}},
                                         StartMode::Parallel, VirtTime::zero());
  system.run();
  const auto* rec = system.request(rid);
  REQUIRE(rec);
  CHECK(rec->outcome == RequestOutcome::Failed);
  CHECK(rec->error.find("NoRoute") != std::string::npos);
  const Instance* inst = system.mano().instance(rec->instance_id);
  REQUIRE(inst);
  CHECK(inst->state == InstanceState::Failed);
  CHECK(system.cluster().node(1).free == system.cluster().node(1).capacity);
  CHECK(test::count_kind(system.log().records(), EventKind::InstanceFailed) == 1);
}

TEST_CASE("direct EBI submissions complete and stay conformant") {
  SystemConfig syscfg;
  syscfg.nodes.push_back(NodeSpec{ResourceVector::of(8000, 32768, 100000, 1000), 0});
  syscfg.remote_fetch_delay = VirtTime::zero();
  EdgeSystem system(syscfg);
  auto r = system.bus().send_request(
      "mano", Message::request(Method::Post, "/ebi/mano/requests",
                               EdgeSystem::make_request_body("intensive_computation", "sum",
                                                             {{"n", 6}}, StartMode::Parallel)
                                   .dump()));
  REQUIRE(r.ok());
  CHECK(r.value().status == 202);
  system.run();
  const auto* rec = system.request(1);
  REQUIRE(rec);
  CHECK(rec->origin == "ebi");
  CHECK(rec->outcome == RequestOutcome::Completed);
  CHECK(rec->result == "21");
  CHECK(check_trace_conformance(system.log().records()).empty());
}

TEST_CASE("legacy traces carry a Converted event, http traces never do") {
  SystemConfig syscfg;
  syscfg.nodes.push_back(NodeSpec{ResourceVector::of(8000, 32768, 100000, 1000), 0});
  EdgeSystem system(syscfg);
  system.submit_request("scenario", "legacy", "intensive_computation", "prime_sum", {{"n", 10}},
                        StartMode::Parallel, VirtTime::zero());
  system.submit_request("scenario", "http", "intensive_computation", "sum", {{"n", 5}},
                        StartMode::Parallel, VirtTime::from_units(200));
  system.run();
  const auto& recs = system.log().records();
  CHECK(check_trace_conformance(recs).empty());
  std::size_t converted = 0;
  for (const auto& r : recs) {
    if (r.kind == EventKind::Converted) {
      ++converted;
      CHECK(r.payload.get("request").value_or("") == "1");
    }
  }
  CHECK(converted == 1);
  // both requests completed, and the legacy one got the same answer
  CHECK(system.request(1)->result == "17");
  CHECK(system.request(2)->result == "15");
}

TEST_CASE("export writes byte-stable csv files") {
  auto cfg = parse_scenario(scenarios::fig9());
  REQUIRE(cfg.ok());
  auto run = run_scenario(cfg.value());
  REQUIRE(run.ok());
  REQUIRE(export_report(run.value().report, "csv_stability_a").ok());
  REQUIRE(export_report(run.value().report, "csv_stability_b").ok());
  for (const auto& name : {"durations.csv", "compute_times.csv", "usage.csv", "video_times.csv",
                           "durations_hist.csv", "compute_hist.csv", "summary.csv"}) {
    std::ifstream fa(std::string("csv_stability_a/") + name, std::ios::binary);
    std::ifstream fb(std::string("csv_stability_b/") + name, std::ios::binary);
    REQUIRE(fa);
    REQUIRE(fb);
    std::string a((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string b((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK(a == b);
  }
  std::filesystem::remove_all("csv_stability_a");
  std::filesystem::remove_all("csv_stability_b");
}

TEST_CASE("fig9 export carries the size/edge/cloud column shape") {
  auto cfg = parse_scenario(scenarios::fig9());
  REQUIRE(cfg.ok());
  auto run = run_scenario(cfg.value());
  REQUIRE(run.ok());
  REQUIRE(export_report(run.value().report, "fig9_export_out").ok());
  std::ifstream f("fig9_export_out/video_times.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header == "size_mb,edge_tx,cloud_tx,edge_compute,cloud_compute");
  std::size_t rows = 0;
  for (std::string line; std::getline(f, line);) ++rows;
  CHECK(rows == 3);
  std::filesystem::remove_all("fig9_export_out");
}

TEST_SUITE_END();
