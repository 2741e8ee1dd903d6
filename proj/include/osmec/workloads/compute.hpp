#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osmec/core/result.hpp"
#include "osmec/core/text.hpp"

namespace osmec {

/// Running total 1..n. The iterative route is the service; the closed form
/// n(n+1)/2 stays in the tests as the independent oracle.
inline std::uint64_t compute_sum(std::uint64_t n) {
  std::uint64_t acc = 0;
  for (std::uint64_t k = 1; k <= n; ++k) acc += k;
  return acc;
}

/// Sum of all primes <= n, sieve of Eratosthenes.
inline std::uint64_t compute_prime_sum(std::uint64_t n) {
  if (n < 2) return 0;
  std::vector<bool> composite(n + 1, false);
  std::uint64_t total = 0;
  for (std::uint64_t p = 2; p <= n; ++p) {
    if (composite[p]) continue;
    total += p;
    for (std::uint64_t q = p * p; q <= n; q += p) composite[q] = true;
  }
  return total;
}

struct FaceRecognitionOutcome {
  std::string label;
  double transfer_time_s = 0.0;
  double compute_time_s = 0.0;
};

/// Deterministic face-recognition surrogate: the label is a stable hash
/// bucket of the blob id; the upload leg and the compute leg carry the cost.
/// The recognition result itself is irrelevant — the resource profile is
/// what the service exercises.
inline Result<FaceRecognitionOutcome> face_recognition(const std::string& blob_id, double image_mb,
                                                       double uplink_mbps, double cpu_work,
                                                       double cpu_rate_units_per_s) {
  if (image_mb <= 0.0) return Error{Errc::EmptyImage, "image blob size must be positive"};
  FaceRecognitionOutcome out;
  out.label = "person_" + std::to_string(fnv1a64(blob_id) % 16);
  out.transfer_time_s = image_mb * 8.0 / uplink_mbps;
  out.compute_time_s = cpu_work / cpu_rate_units_per_s;
  return out;
}

}  // namespace osmec
