#pragma once

#include <cassert>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace osmec {

/// Error taxonomy shared by every module. Bus handlers map these onto
/// response status codes; library entry points return them in Result<T>.
enum class Errc {
  // framing / bus
  MalformedFrame,
  UnknownNamespace,
  DuplicateEndpoint,
  UnknownEndpoint,
  Timeout,
  // cpcf
  UnrecognizedProtocol,
  // udm
  TableNotFound,
  KeyNotFound,
  DuplicateKey,
  DuplicateTable,
  ArityMismatch,
  // nrf / srf / asf / upf
  ImageNotFound,
  NoActiveApp,
  NoRoute,
  PreconditionViolated,
  // mano / vim
  UnknownServiceClass,
  UnknownServiceName,
  ClusterExhausted,
  InsufficientResources,
  ZeroRequest,
  UnknownGrant,
  ContainerStartFailure,
  UnknownInstance,
  WrongState,
  InvalidTemplate,
  // workloads
  InstanceNotCompleted,
  EmptyImage,
  AssetTooLarge,
  // harness
  ConfigError,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedFrame: return "MalformedFrame";
    case Errc::UnknownNamespace: return "UnknownNamespace";
    case Errc::DuplicateEndpoint: return "DuplicateEndpoint";
    case Errc::UnknownEndpoint: return "UnknownEndpoint";
    case Errc::Timeout: return "Timeout";
    case Errc::UnrecognizedProtocol: return "UnrecognizedProtocol";
    case Errc::TableNotFound: return "TableNotFound";
    case Errc::KeyNotFound: return "KeyNotFound";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::DuplicateTable: return "DuplicateTable";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::ImageNotFound: return "ImageNotFound";
    case Errc::NoActiveApp: return "NoActiveApp";
    case Errc::NoRoute: return "NoRoute";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::UnknownServiceClass: return "UnknownServiceClass";
    case Errc::UnknownServiceName: return "UnknownServiceName";
    case Errc::ClusterExhausted: return "ClusterExhausted";
    case Errc::InsufficientResources: return "InsufficientResources";
    case Errc::ZeroRequest: return "ZeroRequest";
    case Errc::UnknownGrant: return "UnknownGrant";
    case Errc::ContainerStartFailure: return "ContainerStartFailure";
    case Errc::UnknownInstance: return "UnknownInstance";
    case Errc::WrongState: return "WrongState";
    case Errc::InvalidTemplate: return "InvalidTemplate";
    case Errc::InstanceNotCompleted: return "InstanceNotCompleted";
    case Errc::EmptyImage: return "EmptyImage";
    case Errc::AssetTooLarge: return "AssetTooLarge";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

struct Error {
  Errc code;
  std::string detail;

  std::string to_string() const {
    std::string s = errc_name(code);
    if (!detail.empty()) {
      s += ": ";
      s += detail;
    }
    return s;
  }
};

inline Error make_error(Errc c, std::string detail = {}) {
  return Error{c, std::move(detail)};
}

/// Minimal expected-style result. value() / error() assert on misuse.
template <typename T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}          // NOLINT implicit
  Result(Error err) : v_(std::move(err)) {}          // NOLINT implicit
  Result(Errc code, std::string detail = {}) : v_(Error{code, std::move(detail)}) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() {
    assert(ok());
    return std::get<T>(v_);
  }
  const T& value() const {
    assert(ok());
    return std::get<T>(v_);
  }
  T value_or(T fallback) const { return ok() ? std::get<T>(v_) : std::move(fallback); }

  const Error& error() const {
    assert(!ok());
    return std::get<Error>(v_);
  }
  Errc code() const { return error().code; }

 private:
  std::variant<T, Error> v_;
};

/// Result for operations without a payload.
class Status {
 public:
  Status() = default;
  Status(Error err) : err_(std::move(err)), failed_(true) {}  // NOLINT implicit
  Status(Errc code, std::string detail = {}) : err_{code, std::move(detail)}, failed_(true) {}

  static Status success() { return Status(); }

  bool ok() const { return !failed_; }
  explicit operator bool() const { return ok(); }

  const Error& error() const {
    assert(failed_);
    return err_;
  }
  Errc code() const { return error().code; }

 private:
  Error err_{};
  bool failed_ = false;
};

}  // namespace osmec
