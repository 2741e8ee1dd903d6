#pragma once

#include <string>

#include "osmec/core/result.hpp"
#include "osmec/mano/resources.hpp"

namespace osmec {

enum class NfKind { Udm, Nrf, Srf, Cpcf, Asf, Upf, App };
enum class StorageClass { Local, Remote };

inline const char* nf_kind_name(NfKind k) {
  switch (k) {
    case NfKind::Udm: return "UDM";
    case NfKind::Nrf: return "NRF";
    case NfKind::Srf: return "SRF";
    case NfKind::Cpcf: return "CPCF";
    case NfKind::Asf: return "ASF";
    case NfKind::Upf: return "UPF";
    case NfKind::App: return "APP";
  }
  return "APP";
}

/// General NFs live in local storage; ASF and APP images sit in the remote
/// repository and are fetched on demand.
inline StorageClass storage_class_for(NfKind kind) {
  switch (kind) {
    case NfKind::Asf:
    case NfKind::App:
      return StorageClass::Remote;
    default:
      return StorageClass::Local;
  }
}

struct NfDescriptor {
  std::string nf_id;
  NfKind nf_kind = NfKind::App;
  StorageClass storage_class = StorageClass::Remote;
  std::string image_ref;
  ResourceVector resource_request;

  /// storage_class is derived from the kind, so the local/remote partition
  /// holds by construction.
  static NfDescriptor make(std::string nf_id, NfKind kind, std::string image_ref = {},
                           ResourceVector request = {}) {
    NfDescriptor d;
    d.nf_id = std::move(nf_id);
    d.nf_kind = kind;
    d.storage_class = storage_class_for(kind);
    d.image_ref = image_ref.empty() ? "img/" + d.nf_id : std::move(image_ref);
    d.resource_request = request;
    return d;
  }

  Status validate() const {
    if (nf_id.empty()) return {Errc::PreconditionViolated, "empty nf_id"};
    if (storage_class != storage_class_for(nf_kind))
      return {Errc::PreconditionViolated, "storage class does not match nf kind"};
    return Status::success();
  }
};

}  // namespace osmec
