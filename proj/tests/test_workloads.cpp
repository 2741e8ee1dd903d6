#include <doctest.h>

#include "osmec/osmec.hpp"
#include "support.hpp"

using namespace osmec;

namespace {

SystemConfig video_system() {
  SystemConfig cfg;
  cfg.nodes.push_back(NodeSpec{ResourceVector::of(8000, 32768, 100000, 1000), 0});
  cfg.remote_fetch_delay = VirtTime::zero();
  cfg.cache_capacity_mb = 1000;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("workloads");

TEST_CASE("compute_sum examples") {
  CHECK(compute_sum(100) == 5050);
  CHECK(compute_sum(0) == 0);
  CHECK(compute_sum(1) == 1);
}

TEST_CASE("compute_sum matches the closed form on a sample") {
  for (std::uint64_t n : {2ull, 10ull, 999ull, 12345ull, 100000ull}) {
    CHECK(compute_sum(n) == test::sum_closed_form(n));
  }
}

TEST_CASE("compute_prime_sum examples against the trial-division oracle") {
  CHECK(compute_prime_sum(10) == 17);
  CHECK(compute_prime_sum(10) == test::trial_division_prime_sum(10));
  CHECK(compute_prime_sum(2) == 2);
  CHECK(compute_prime_sum(1) == 0);
  CHECK(compute_prime_sum(0) == 0);
}

TEST_CASE("compute_prime_sum agrees with trial division up to 500") {
  for (std::uint64_t n = 0; n <= 500; ++n) {
    CHECK(compute_prime_sum(n) == test::trial_division_prime_sum(n));
  }
}

TEST_CASE("face recognition is a deterministic surrogate") {
  auto a = face_recognition("blob-1", 5.0, 100.0, 2000.0, 1000.0);
  auto b = face_recognition("blob-1", 5.0, 100.0, 2000.0, 1000.0);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(a.value().label == b.value().label);
  CHECK(a.value().transfer_time_s == doctest::Approx(0.4));  // 5 MB x 8 / 100 Mbps
  CHECK(a.value().compute_time_s == doctest::Approx(2.0));
}

TEST_CASE("face recognition work defaults to four times the prime-sum baseline") {
  const Template t = builtin_intensive_template();
  double face_work = 0, prime_work = 0, face_cpu = 0, prime_cpu = 0;
  for (const auto& row : t.attributes.rows) {
    if (row[0] == "svc:face_recognition:work") face_work = std::stod(row[1]);
    if (row[0] == "svc:prime_sum:work") prime_work = std::stod(row[1]);
    if (row[0] == "svc:face_recognition:cpu_mc") face_cpu = std::stod(row[1]);
    if (row[0] == "svc:prime_sum:cpu_mc") prime_cpu = std::stod(row[1]);
  }
  CHECK(face_work / prime_work == doctest::Approx(4.0));
  CHECK(face_cpu / prime_cpu == doctest::Approx(4.0));
}

TEST_CASE("face recognition holds 83.9 MB while completed") {
  SystemConfig cfg;
  cfg.nodes.push_back(NodeSpec{ResourceVector::of(8000, 32768, 100000, 1000), 0});
  cfg.remote_fetch_delay = VirtTime::zero();
  EdgeSystem system(cfg);
  system.submit_request("scenario", "http", "intensive_computation", "face_recognition",
                        {{"blob_id", "b"}, {"size_mb", 5}}, StartMode::Parallel, VirtTime::zero());
  system.run();
  const Instance* inst = system.mano().instance(1);
  REQUIRE(inst);
  REQUIRE(inst->state == InstanceState::MemoryHeld);
  const auto& grant = system.cluster().grants().at(inst->grant_ids[0]);
  CHECK(!grant.cpu_held);
  CHECK(grant.memory_held);
  CHECK(grant.amount.memory_kb == 83900);  // 83.9 MB exactly
}

TEST_CASE("an empty image blob is rejected") {
  auto r = face_recognition("blob", 0.0, 100.0, 2000.0, 1000.0);
  REQUIRE(!r.ok());
  CHECK(r.code() == Errc::EmptyImage);
}

TEST_CASE("cache insert then lookup hits and bumps popularity") {
  SimEngine engine;
  EventLog log;
  VideoCacheStore cache(engine, log, 1000000);
  REQUIRE(cache.insert("v1", 100000).ok());
  CHECK(cache.lookup("v1"));
  CHECK(cache.asset("v1")->popularity_count == 1);
}

TEST_CASE("lookup of an unknown video misses and still counts") {
  SimEngine engine;
  EventLog log;
  VideoCacheStore cache(engine, log, 1000000);
  CHECK(!cache.lookup("v2"));
  CHECK(cache.asset("v2")->popularity_count == 1);
}

TEST_CASE("popularity never decreases") {
  SimEngine engine;
  EventLog log;
  VideoCacheStore cache(engine, log, 1000000);
  std::uint64_t last = 0;
  for (int i = 0; i < 20; ++i) {
    const auto count = cache.bump("v");
    CHECK(count > last);
    last = count;
  }
}

TEST_CASE("insertion evicts the least popular asset when full") {
  SimEngine engine;
  EventLog log;
  VideoCacheStore cache(engine, log, 250000);  // 250 MB
  REQUIRE(cache.insert("a", 100000).ok());
  REQUIRE(cache.insert("b", 100000).ok());
  cache.lookup("a");
  cache.lookup("a");
  cache.lookup("b");
  REQUIRE(cache.insert("c", 100000).ok());  // evicts b (popularity 1 < 2)
  CHECK(cache.locate("a").value() == "edge");
  CHECK(cache.locate("b").value() == "cloud");
  CHECK(cache.locate("c").value() == "edge");
  CHECK(test::count_kind(log.records(), EventKind::CacheEvicted) == 1);
}

TEST_CASE("an asset larger than the whole cache is rejected") {
  SimEngine engine;
  EventLog log;
  VideoCacheStore cache(engine, log, 250000);
  auto st = cache.insert("huge", 250001);
  REQUIRE(!st.ok());
  CHECK(st.code() == Errc::AssetTooLarge);
}

TEST_CASE("serving a cached video uses the edge path") {
  SystemConfig cfg = video_system();
  cfg.videos = {{"v1", 100.0, "edge"}};
  EdgeSystem system(cfg);
  auto r = system.serve_video("v1", 100.0);
  REQUIRE(r.ok());
  CHECK(r.value().served_from == "edge");
  CHECK(r.value().transmission_time_s == doctest::Approx(1.0));  // 100 x 8 / 800
  CHECK(r.value().compute_time_s == doctest::Approx(0.13));
}

TEST_CASE("serving an uncached video forwards to the cloud") {
  SystemConfig cfg = video_system();
  cfg.videos = {{"v1", 100.0, "cloud"}};
  EdgeSystem system(cfg);
  auto r = system.serve_video("v1", 100.0);
  REQUIRE(r.ok());
  CHECK(r.value().served_from == "cloud");
  CHECK(r.value().transmission_time_s == doctest::Approx(4.05));  // 100x8/200 + 0.05
  CHECK(r.value().compute_time_s == doctest::Approx(0.15));
  CHECK(test::count_kind(system.log().records(), EventKind::CloudForward) == 1);
}

TEST_CASE("the cloud-edge transmission gap grows with video size") {
  SystemConfig cfg = video_system();
  cfg.videos = {{"e100", 100.0, "edge"},  {"e200", 200.0, "edge"},  {"e400", 400.0, "edge"},
                {"c100", 100.0, "cloud"}, {"c200", 200.0, "cloud"}, {"c400", 400.0, "cloud"}};
  EdgeSystem system(cfg);
  double last_gap = -1.0;
  for (double size : {100.0, 200.0, 400.0}) {
    const std::string tag = std::to_string(static_cast<int>(size));
    const double edge = system.serve_video("e" + tag, size).value().transmission_time_s;
    const double cloud = system.serve_video("c" + tag, size).value().transmission_time_s;
    const double gap = cloud - edge;
    CHECK(gap > last_gap);
    last_gap = gap;
  }
}

TEST_CASE("serve compute time is size-invariant") {
  SystemConfig cfg = video_system();
  cfg.videos = {{"e100", 100.0, "edge"}, {"e200", 200.0, "edge"}, {"e400", 400.0, "edge"}};
  EdgeSystem system(cfg);
  const double c1 = system.serve_video("e100", 100.0).value().compute_time_s;
  const double c2 = system.serve_video("e200", 200.0).value().compute_time_s;
  const double c3 = system.serve_video("e400", 400.0).value().compute_time_s;
  CHECK(c1 == c2);
  CHECK(c2 == c3);
}

TEST_CASE("serving an unknown video propagates NoRoute") {
  EdgeSystem system(video_system());
  auto r = system.serve_video("ghost", 50.0);
  REQUIRE(!r.ok());
  CHECK(r.code() == Errc::NoRoute);
}

TEST_CASE("charging record arithmetic") {
  const auto r = make_charging_record(1, 10.0, 0.0, 2.0, 1.0);
  CHECK(r.cost == doctest::Approx(20.0));
  const auto zero = make_charging_record(1, 0.0, 0.0, 2.0, 1.0);
  CHECK(zero.cost == 0.0);
  const auto both = make_charging_record(1, 10.0, 4.0, 2.0, 1.5);
  CHECK(both.cost == doctest::Approx(26.0));
}

TEST_CASE("charging requires a completed instance and lands in the UDM table") {
  EdgeSystem system(video_system());
  system.submit_request("scenario", "http", "intensive_computation", "sum", {{"n", 10}},
                        StartMode::Parallel, VirtTime::zero());
  system.run();
  // the pipeline already charged once at completion
  const auto* table = system.udm().table("charging");
  REQUIRE(table);
  CHECK(table->rows.size() == 1);

  auto again = system.charge(1, 5.0, 0.0);  // explicit charge on a held instance
  REQUIRE(!again.ok());                     // duplicate row for the same instance
  CHECK(again.code() == Errc::DuplicateKey);

  CHECK(system.charge(42, 1.0, 0.0).code() == Errc::UnknownInstance);
}

TEST_CASE("charging an active instance is rejected") {
  SystemConfig cfg = video_system();
  EdgeSystem system(cfg);
  // drive an instance only as far as Selected
  system.mano().select_template(ServiceClass::IntensiveComputation, "sum", 0,
                                [](Result<std::uint64_t> r) { REQUIRE(r.ok()); });
  system.run();
  auto r = system.charge(1, 1.0, 0.0);
  REQUIRE(!r.ok());
  CHECK(r.code() == Errc::InstanceNotCompleted);
}

TEST_SUITE_END();
