#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "osmec/core/text.hpp"

namespace osmec {

struct StateRecord {
  std::string key;
  std::string value;
  std::uint64_t revision = 0;
};

/// One update as seen by a watch stream.
struct StateUpdate {
  std::string key;
  std::string value;
  std::uint64_t revision = 0;
};

/// Buffered prefix watch; updates arrive in revision order.
class StateWatch {
 public:
  explicit StateWatch(std::string prefix) : prefix_(std::move(prefix)) {}

  const std::string& prefix() const { return prefix_; }
  const std::vector<StateUpdate>& updates() const { return updates_; }

  /// Drains and returns everything received so far.
  std::vector<StateUpdate> take() {
    std::vector<StateUpdate> out;
    out.swap(updates_);
    return out;
  }

 private:
  friend class StateStore;
  std::string prefix_;
  std::vector<StateUpdate> updates_;
};

/// Master-node state store: linearizable per key, one global revision
/// counter (so revisions strictly increase per key as well). Mutations enter
/// exclusively through the API server, which wraps this store.
class StateStore {
 public:
  std::uint64_t put(const std::string& key, std::string value) {
    const std::uint64_t rev = ++revision_;
    entries_[key] = Entry{value, rev};
    for (auto& w : watches_) {
      if (auto watch = w.lock(); watch && starts_with(key, watch->prefix())) {
        watch->updates_.push_back(StateUpdate{key, value, rev});
      }
    }
    return rev;
  }

  std::optional<StateRecord> get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return StateRecord{key, it->second.value, it->second.revision};
  }

  /// All records under a key prefix, key order.
  std::vector<StateRecord> list(const std::string& prefix) const {
    std::vector<StateRecord> out;
    for (auto it = entries_.lower_bound(prefix); it != entries_.end(); ++it) {
      if (!starts_with(it->first, prefix)) break;
      out.push_back(StateRecord{it->first, it->second.value, it->second.revision});
    }
    return out;
  }

  std::shared_ptr<StateWatch> watch(const std::string& prefix) {
    auto w = std::make_shared<StateWatch>(prefix);
    watches_.push_back(w);
    return w;
  }

  std::uint64_t last_revision() const { return revision_; }

 private:
  struct Entry {
    std::string value;
    std::uint64_t revision;
  };

  std::map<std::string, Entry> entries_;
  std::vector<std::weak_ptr<StateWatch>> watches_;
  std::uint64_t revision_ = 0;
};

}  // namespace osmec
