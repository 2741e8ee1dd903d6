#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "osmec/core/text.hpp"
#include "osmec/sim/event_log.hpp"

namespace osmec {

/// Computing, caching and communication quantities. Stored in integral
/// milli-units (millicores, KB with 1 MB = 1000 KB, Kbps) so that pool
/// arithmetic is exact; configs speak millicores / MB / MB / Mbps.
struct ResourceVector {
  std::int64_t cpu_millicores = 0;
  std::int64_t memory_kb = 0;
  std::int64_t storage_kb = 0;
  std::int64_t bandwidth_kbps = 0;

  static ResourceVector of(std::int64_t cpu_millicores, double memory_mb, double storage_mb,
                           double bandwidth_mbps) {
    ResourceVector v;
    v.cpu_millicores = cpu_millicores;
    v.memory_kb = std::llround(memory_mb * 1000.0);
    v.storage_kb = std::llround(storage_mb * 1000.0);
    v.bandwidth_kbps = std::llround(bandwidth_mbps * 1000.0);
    return v;
  }

  bool non_negative() const {
    return cpu_millicores >= 0 && memory_kb >= 0 && storage_kb >= 0 && bandwidth_kbps >= 0;
  }
  bool is_zero() const {
    return cpu_millicores == 0 && memory_kb == 0 && storage_kb == 0 && bandwidth_kbps == 0;
  }

  /// Componentwise partial order.
  bool fits_within(const ResourceVector& o) const {
    return cpu_millicores <= o.cpu_millicores && memory_kb <= o.memory_kb &&
           storage_kb <= o.storage_kb && bandwidth_kbps <= o.bandwidth_kbps;
  }

  friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) {
    a += b;
    return a;
  }
  friend ResourceVector operator-(ResourceVector a, const ResourceVector& b) {
    a -= b;
    return a;
  }
  ResourceVector& operator+=(const ResourceVector& o) {
    cpu_millicores += o.cpu_millicores;
    memory_kb += o.memory_kb;
    storage_kb += o.storage_kb;
    bandwidth_kbps += o.bandwidth_kbps;
    return *this;
  }
  ResourceVector& operator-=(const ResourceVector& o) {
    cpu_millicores -= o.cpu_millicores;
    memory_kb -= o.memory_kb;
    storage_kb -= o.storage_kb;
    bandwidth_kbps -= o.bandwidth_kbps;
    return *this;
  }
  bool operator==(const ResourceVector& o) const {
    return cpu_millicores == o.cpu_millicores && memory_kb == o.memory_kb &&
           storage_kb == o.storage_kb && bandwidth_kbps == o.bandwidth_kbps;
  }

  /// Config-unit rendering: "cpu=1000mc mem=512MB sto=0MB bw=100Mbps".
  std::string to_string() const {
    return "cpu=" + std::to_string(cpu_millicores) + "mc mem=" + kilo_to_unit_string(memory_kb) +
           "MB sto=" + kilo_to_unit_string(storage_kb) + "MB bw=" +
           kilo_to_unit_string(bandwidth_kbps) + "Mbps";
  }

  Payload& fill_payload(Payload& p) const {
    p.set("cpu_mc", cpu_millicores)
        .set("mem_kb", memory_kb)
        .set("sto_kb", storage_kb)
        .set("bw_kbps", bandwidth_kbps);
    return p;
  }
};

}  // namespace osmec
