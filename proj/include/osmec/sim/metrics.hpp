#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "osmec/core/result.hpp"
#include "osmec/core/text.hpp"
#include "osmec/core/vtime.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

struct InstantiationSample {
  std::uint64_t instance_id = 0;
  std::uint64_t request_id = 0;
  std::string template_id;
  std::string mode;
  double duration_s = 0.0;
};

struct ComputeSample {
  std::string service;
  std::uint64_t instance_id = 0;
  double compute_s = 0.0;
  double transfer_s = 0.0;
};

struct UsagePoint {
  VirtTime t;
  std::int64_t cpu_millicores = 0;
  std::int64_t memory_kb = 0;

  bool operator==(const UsagePoint& o) const {
    return t == o.t && cpu_millicores == o.cpu_millicores && memory_kb == o.memory_kb;
  }
};

struct VideoSample {
  std::string video_id;
  double size_mb = 0.0;
  std::string served_from;
  double transmission_s = 0.0;
  double compute_s = 0.0;
};

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t count = 0;
};

/// Everything here is derived solely from the event log, so a report can be
/// rebuilt from a persisted events.log and compared field for field.
struct MetricsReport {
  std::vector<InstantiationSample> instantiation;
  std::vector<ComputeSample> compute;
  std::map<std::uint64_t, std::vector<UsagePoint>> usage;  // per node
  std::vector<VideoSample> videos;
  std::uint64_t requests_total = 0;
  std::uint64_t requests_completed = 0;
  std::uint64_t requests_failed = 0;
  std::uint64_t instances_total = 0;
  std::uint64_t events = 0;
  std::uint64_t log_hash = 0;

  std::vector<double> compute_samples(const std::string& service) const {
    std::vector<double> out;
    for (const auto& s : compute) {
      if (s.service == service) out.push_back(s.compute_s);
    }
    return out;
  }

  static double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
  }

  bool operator==(const MetricsReport& o) const {
    auto inst_eq = [](const InstantiationSample& a, const InstantiationSample& b) {
      return a.instance_id == b.instance_id && a.request_id == b.request_id &&
             a.template_id == b.template_id && a.mode == b.mode && a.duration_s == b.duration_s;
    };
    auto comp_eq = [](const ComputeSample& a, const ComputeSample& b) {
      return a.service == b.service && a.instance_id == b.instance_id &&
             a.compute_s == b.compute_s && a.transfer_s == b.transfer_s;
    };
    auto vid_eq = [](const VideoSample& a, const VideoSample& b) {
      return a.video_id == b.video_id && a.size_mb == b.size_mb && a.served_from == b.served_from &&
             a.transmission_s == b.transmission_s && a.compute_s == b.compute_s;
    };
    if (instantiation.size() != o.instantiation.size() || compute.size() != o.compute.size() ||
        videos.size() != o.videos.size())
      return false;
    for (std::size_t i = 0; i < instantiation.size(); ++i) {
      if (!inst_eq(instantiation[i], o.instantiation[i])) return false;
    }
    for (std::size_t i = 0; i < compute.size(); ++i) {
      if (!comp_eq(compute[i], o.compute[i])) return false;
    }
    for (std::size_t i = 0; i < videos.size(); ++i) {
      if (!vid_eq(videos[i], o.videos[i])) return false;
    }
    return usage == o.usage && requests_total == o.requests_total &&
           requests_completed == o.requests_completed && requests_failed == o.requests_failed &&
           instances_total == o.instances_total && events == o.events && log_hash == o.log_hash;
  }
};

namespace detail {

inline double payload_num(const Payload& p, std::string_view key, double fallback = 0.0) {
  auto v = p.get(key);
  if (!v) return fallback;
  try {
    return std::stod(std::string(*v));
  } catch (...) {
    return fallback;
  }
}

inline std::uint64_t payload_u64(const Payload& p, std::string_view key) {
  std::uint64_t out = 0;
  if (auto v = p.get(key)) parse_u64(*v, out);
  return out;
}

inline std::int64_t payload_i64(const Payload& p, std::string_view key) {
  std::int64_t out = 0;
  if (auto v = p.get(key)) parse_i64(*v, out);
  return out;
}

}  // namespace detail

/// Rebuilds the canonical text of a record span (used to hash a parsed log
/// identically to the original file).
inline std::string records_to_text(const std::vector<EventRecord>& recs) {
  std::string out;
  for (const auto& r : recs) {
    out += r.to_line();
    out += '\n';
  }
  return out;
}

inline MetricsReport build_report(const std::vector<EventRecord>& recs) {
  MetricsReport rep;
  rep.events = recs.size();
  rep.log_hash = fnv1a64(records_to_text(recs));

  std::map<std::uint64_t, VirtTime> request_received;
  std::map<std::uint64_t, std::string> instance_template;
  std::set<std::uint64_t> completed_requests;
  std::map<std::uint64_t, std::pair<std::int64_t, std::int64_t>> node_running;  // cpu, mem

  auto subject_id = [](const std::string& subject, std::string_view prefix) -> std::uint64_t {
    if (!starts_with(subject, prefix)) return 0;
    std::uint64_t id = 0;
    parse_u64(std::string_view(subject).substr(prefix.size()), id);
    return id;
  };

  for (const auto& r : recs) {
    switch (r.kind) {
      case EventKind::RequestReceived: {
        ++rep.requests_total;
        request_received[subject_id(r.subject, "request:")] = r.t;
        break;
      }
      case EventKind::RequestFailed:
        ++rep.requests_failed;
        break;
      case EventKind::TemplateSelected: {
        ++rep.instances_total;
        instance_template[subject_id(r.subject, "instance:")] =
            std::string(r.payload.get("template").value_or(""));
        break;
      }
      case EventKind::InstanceActive: {
        const std::uint64_t iid = subject_id(r.subject, "instance:");
        const std::uint64_t rid = detail::payload_u64(r.payload, "request");
        auto it = request_received.find(rid);
        if (it == request_received.end()) break;
        InstantiationSample s;
        s.instance_id = iid;
        s.request_id = rid;
        s.template_id = std::string(r.payload.get("template").value_or(""));
        s.mode = std::string(r.payload.get("mode").value_or(""));
        s.duration_s = (r.t - it->second).seconds();
        rep.instantiation.push_back(std::move(s));
        break;
      }
      case EventKind::ServiceCompleted: {
        const std::uint64_t rid = detail::payload_u64(r.payload, "request");
        if (completed_requests.insert(rid).second) ++rep.requests_completed;
        const auto svc = r.payload.get("svc").value_or("");
        if (svc != "*" && !svc.empty()) {
          ComputeSample s;
          s.service = std::string(svc);
          s.instance_id = subject_id(r.subject, "instance:");
          s.compute_s = detail::payload_num(r.payload, "compute_s");
          s.transfer_s = detail::payload_num(r.payload, "transfer_s");
          rep.compute.push_back(std::move(s));
        }
        break;
      }
      case EventKind::ResourceGranted: {
        const std::uint64_t node = detail::payload_u64(r.payload, "node");
        auto& [cpu, mem] = node_running[node];
        cpu += detail::payload_i64(r.payload, "cpu_mc");
        mem += detail::payload_i64(r.payload, "mem_kb");
        rep.usage[node].push_back(UsagePoint{r.t, cpu, mem});
        break;
      }
      case EventKind::CpuReleased: {
        const std::uint64_t node = detail::payload_u64(r.payload, "node");
        auto& [cpu, mem] = node_running[node];
        cpu -= detail::payload_i64(r.payload, "cpu_mc");
        rep.usage[node].push_back(UsagePoint{r.t, cpu, mem});
        break;
      }
      case EventKind::MemoryReleased: {
        const std::uint64_t node = detail::payload_u64(r.payload, "node");
        auto& [cpu, mem] = node_running[node];
        mem -= detail::payload_i64(r.payload, "mem_kb");
        rep.usage[node].push_back(UsagePoint{r.t, cpu, mem});
        break;
      }
      case EventKind::VideoServed: {
        VideoSample v;
        v.video_id = std::string(r.payload.get("video").value_or(""));
        v.size_mb = detail::payload_num(r.payload, "size_mb");
        v.served_from = std::string(r.payload.get("from").value_or(""));
        v.transmission_s = detail::payload_num(r.payload, "tx_s");
        v.compute_s = detail::payload_num(r.payload, "compute_s");
        rep.videos.push_back(std::move(v));
        break;
      }
      default:
        break;
    }
  }
  return rep;
}

/// Step series of (t, cpu, memory) in use on a node inside [from, to],
/// reconstructed from grant and release events.
inline std::vector<UsagePoint> sample_usage(const MetricsReport& rep, std::uint64_t node,
                                            VirtTime from, VirtTime to) {
  std::vector<UsagePoint> out;
  auto it = rep.usage.find(node);
  if (it == rep.usage.end()) return out;
  for (const auto& p : it->second) {
    if (p.t < from || to < p.t) continue;
    out.push_back(p);
  }
  return out;
}

/// In-use level just before time `at` (the running value of the step
/// function), for plateau checks between events.
inline UsagePoint usage_level_before(const MetricsReport& rep, std::uint64_t node, VirtTime at) {
  UsagePoint level{VirtTime::zero(), 0, 0};
  auto it = rep.usage.find(node);
  if (it == rep.usage.end()) return level;
  for (const auto& p : it->second) {
    if (at <= p.t) break;
    level = p;
  }
  return level;
}

// ---- Fig. 5_2 workflow conformance ----

struct TraceIssue {
  std::uint64_t request_id = 0;
  std::string detail;
};

/// Every successful request trace must contain, as an ordered subsequence:
/// RequestReceived, ProtocolIdentified, (Converted iff legacy),
/// TemplateSelected, ParamsInserted, NfResolved, ParamsUpdated, PodAssigned,
/// ResourceGranted, ContainerStarted x k, InstanceActive, ServiceCompleted.
inline std::vector<TraceIssue> check_trace_conformance(const std::vector<EventRecord>& recs) {
  std::vector<TraceIssue> issues;

  std::set<std::uint64_t> successful;
  std::map<std::uint64_t, std::uint64_t> instance_of;  // request -> instance
  std::map<std::uint64_t, std::string> protocol_of;
  std::map<std::uint64_t, std::string> origin_of;

  auto subject_id = [](const std::string& subject, std::string_view prefix) -> std::uint64_t {
    if (!starts_with(subject, prefix)) return 0;
    std::uint64_t id = 0;
    parse_u64(std::string_view(subject).substr(prefix.size()), id);
    return id;
  };

  for (const auto& r : recs) {
    if (r.kind == EventKind::ServiceCompleted) {
      successful.insert(detail::payload_u64(r.payload, "request"));
    } else if (r.kind == EventKind::TemplateSelected) {
      instance_of[detail::payload_u64(r.payload, "request")] = subject_id(r.subject, "instance:");
    } else if (r.kind == EventKind::ProtocolIdentified) {
      protocol_of[detail::payload_u64(r.payload, "request")] =
          std::string(r.payload.get("protocol").value_or(""));
    } else if (r.kind == EventKind::RequestReceived) {
      origin_of[subject_id(r.subject, "request:")] =
          std::string(r.payload.get("origin").value_or(""));
    }
  }

  for (std::uint64_t rid : successful) {
    if (rid == 0) continue;
    const std::uint64_t iid = instance_of.count(rid) ? instance_of[rid] : 0;
    const bool legacy = protocol_of.count(rid) && protocol_of[rid] == "legacy";
    // administrative EBI entries address MANO directly, past the CPCF leg
    const bool via_cpcf = origin_of.count(rid) && origin_of[rid] != "ebi";

    std::vector<EventKind> expected{EventKind::RequestReceived};
    if (via_cpcf) expected.push_back(EventKind::ProtocolIdentified);
    if (via_cpcf && legacy) expected.push_back(EventKind::Converted);
    expected.insert(expected.end(),
                    {EventKind::TemplateSelected, EventKind::ParamsInserted, EventKind::NfResolved,
                     EventKind::ParamsUpdated, EventKind::PodAssigned, EventKind::ResourceGranted,
                     EventKind::ContainerStarted, EventKind::InstanceActive,
                     EventKind::ServiceCompleted});

    auto belongs = [&](const EventRecord& r) {
      switch (r.kind) {
        case EventKind::RequestReceived:
          return subject_id(r.subject, "request:") == rid;
        case EventKind::ProtocolIdentified:
        case EventKind::Converted:
          return detail::payload_u64(r.payload, "request") == rid;
        case EventKind::TemplateSelected:
        case EventKind::ParamsInserted:
        case EventKind::ParamsUpdated:
        case EventKind::InstanceActive:
        case EventKind::ServiceCompleted:
        case EventKind::NfResolved:
          return subject_id(r.subject, "instance:") == iid;
        case EventKind::PodAssigned:
        case EventKind::ContainerStarted:
        case EventKind::ResourceGranted:
          return detail::payload_u64(r.payload, "instance") == iid;
        default:
          return false;
      }
    };

    std::size_t next = 0;
    for (const auto& r : recs) {
      if (next == expected.size()) break;
      if (r.kind == expected[next] && belongs(r)) ++next;
    }
    if (next != expected.size()) {
      issues.push_back(TraceIssue{
          rid, std::string("missing ") + event_kind_name(expected[next]) + " in ordered trace"});
      continue;
    }
    if (!legacy) {
      for (const auto& r : recs) {
        if (r.kind == EventKind::Converted && detail::payload_u64(r.payload, "request") == rid) {
          issues.push_back(TraceIssue{rid, "http request carries a Converted event"});
          break;
        }
      }
    }
  }
  return issues;
}

// ---- CSV export ----

enum class ExportFormat { Csv, HistogramCsv, All };

inline std::vector<HistogramBin> make_histogram(std::vector<double> xs, int bins = 20) {
  std::vector<HistogramBin> out;
  if (xs.empty()) return out;
  std::sort(xs.begin(), xs.end());
  const double lo = xs.front();
  const double hi = xs.back();
  if (lo == hi) {
    out.push_back(HistogramBin{lo, hi, xs.size()});
    return out;
  }
  const double width = (hi - lo) / bins;
  out.resize(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) {
    out[static_cast<std::size_t>(i)] = HistogramBin{lo + i * width, lo + (i + 1) * width, 0};
  }
  for (double x : xs) {
    auto idx = static_cast<std::size_t>((x - lo) / width);
    if (idx >= out.size()) idx = out.size() - 1;
    ++out[idx].count;
  }
  return out;
}

/// Writes the report as byte-stable CSV files under out_dir. Returns the
/// list of files written.
inline Result<std::vector<std::string>> export_report(const MetricsReport& rep,
                                                      const std::string& out_dir,
                                                      ExportFormat format = ExportFormat::All) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) return Error{Errc::IoError, "cannot create " + out_dir};

  std::vector<std::string> written;
  auto open = [&](const std::string& name) -> std::ofstream {
    std::ofstream f(out_dir + "/" + name, std::ios::binary);
    if (f) written.push_back(name);
    return f;
  };

  const bool samples = format != ExportFormat::HistogramCsv;
  const bool hist = format != ExportFormat::Csv;

  if (samples) {
    {
      auto f = open("durations.csv");
      if (!f) return Error{Errc::IoError, "write durations.csv"};
      f << "template,mode,instance,request,duration_s\n";
      for (const auto& s : rep.instantiation) {
        f << s.template_id << ',' << s.mode << ',' << s.instance_id << ',' << s.request_id << ','
          << double_to_string(s.duration_s) << '\n';
      }
    }
    {
      auto f = open("compute_times.csv");
      if (!f) return Error{Errc::IoError, "write compute_times.csv"};
      f << "service,instance,compute_s,transfer_s\n";
      for (const auto& s : rep.compute) {
        f << s.service << ',' << s.instance_id << ',' << double_to_string(s.compute_s) << ','
          << double_to_string(s.transfer_s) << '\n';
      }
    }
    {
      auto f = open("usage.csv");
      if (!f) return Error{Errc::IoError, "write usage.csv"};
      f << "node,t_s,cpu_mc,memory_mb\n";
      for (const auto& [node, points] : rep.usage) {
        for (const auto& p : points) {
          f << node << ',' << p.t.to_string() << ',' << p.cpu_millicores << ','
            << kilo_to_unit_string(p.memory_kb) << '\n';
        }
      }
    }
    {
      auto f = open("video_times.csv");
      if (!f) return Error{Errc::IoError, "write video_times.csv"};
      f << "size_mb,edge_tx,cloud_tx,edge_compute,cloud_compute\n";
      std::map<double, std::pair<std::optional<VideoSample>, std::optional<VideoSample>>> by_size;
      for (const auto& v : rep.videos) {
        auto& slot = by_size[v.size_mb];
        if (v.served_from == "edge") slot.first = v;
        else slot.second = v;
      }
      for (const auto& [size, pair] : by_size) {
        f << double_to_string(size) << ','
          << (pair.first ? double_to_string(pair.first->transmission_s) : "") << ','
          << (pair.second ? double_to_string(pair.second->transmission_s) : "") << ','
          << (pair.first ? double_to_string(pair.first->compute_s) : "") << ','
          << (pair.second ? double_to_string(pair.second->compute_s) : "") << '\n';
      }
    }
  }

  if (hist) {
    auto write_hist = [&](const std::string& name, const std::string& group_header,
                          const std::vector<std::pair<std::string, std::vector<double>>>& groups)
        -> Status {
      auto f = open(name);
      if (!f) return {Errc::IoError, "write " + name};
      f << group_header << ",bin_lo,bin_hi,count\n";
      for (const auto& [group, xs] : groups) {
        for (const auto& bin : make_histogram(xs)) {
          f << group << ',' << double_to_string(bin.lo) << ',' << double_to_string(bin.hi) << ','
            << bin.count << '\n';
        }
      }
      return Status::success();
    };

    std::map<std::string, std::vector<double>> duration_groups;
    for (const auto& s : rep.instantiation) {
      duration_groups[s.template_id + "/" + s.mode].push_back(s.duration_s);
    }
    std::vector<std::pair<std::string, std::vector<double>>> dg(duration_groups.begin(),
                                                                duration_groups.end());
    if (auto st = write_hist("durations_hist.csv", "template_mode", dg); !st.ok()) return st.error();

    std::map<std::string, std::vector<double>> compute_groups;
    for (const auto& s : rep.compute) compute_groups[s.service].push_back(s.compute_s);
    std::vector<std::pair<std::string, std::vector<double>>> cg(compute_groups.begin(),
                                                                compute_groups.end());
    if (auto st = write_hist("compute_hist.csv", "service", cg); !st.ok()) return st.error();
  }

  {
    auto f = open("summary.csv");
    if (!f) return Error{Errc::IoError, "write summary.csv"};
    f << "key,value\n";
    f << "requests_total," << rep.requests_total << '\n';
    f << "requests_completed," << rep.requests_completed << '\n';
    f << "requests_failed," << rep.requests_failed << '\n';
    f << "instances_total," << rep.instances_total << '\n';
    f << "events," << rep.events << '\n';
    f << "log_hash," << hex64(rep.log_hash) << '\n';
  }

  return written;
}

}  // namespace osmec
