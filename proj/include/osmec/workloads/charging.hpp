#pragma once

#include <cstdint>
#include <string>

namespace osmec {

struct ChargingRecord {
  std::uint64_t instance_id = 0;
  double cpu_work_consumed = 0.0;
  double memory_mb_time = 0.0;  // MB x time-units held while running
  double cost = 0.0;
};

/// cost = cpu_work x rate_cpu + memory_MB_time x rate_mem; rates come from
/// the computation-intensive template's attribute rows.
inline ChargingRecord make_charging_record(std::uint64_t instance_id, double cpu_work_consumed,
                                           double memory_mb_time, double rate_cpu, double rate_mem) {
  ChargingRecord r;
  r.instance_id = instance_id;
  r.cpu_work_consumed = cpu_work_consumed;
  r.memory_mb_time = memory_mb_time;
  r.cost = cpu_work_consumed * rate_cpu + memory_mb_time * rate_mem;
  return r;
}

}  // namespace osmec
