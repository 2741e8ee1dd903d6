#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "osmec/bus/bus.hpp"
#include "osmec/bus/message.hpp"
#include "osmec/core/text.hpp"

namespace osmec {

/// Path parameters captured from {placeholder} segments.
using RouteParams = std::map<std::string, std::string>;
using RouteFn = std::function<HandlerResult(const Message&, const RouteParams&)>;

/// Tiny exact/placeholder path dispatcher shared by all NF endpoints.
/// Every NF answers GET <prefix>/health with 200 "ok" by convention.
class Router {
 public:
  explicit Router(std::string prefix) : prefix_(std::move(prefix)) {
    add(Method::Get, prefix_ + "/health", [](const Message& m, const RouteParams&) {
      return reply(Message::response(200, m.path, "ok"));
    });
  }

  void add(Method method, const std::string& pattern, RouteFn fn) {
    routes_.push_back(Route{method, split_path(pattern), std::move(fn)});
  }

  HandlerResult operator()(const Message& m) const {
    const auto segments = split_path(m.path);
    for (const auto& route : routes_) {
      const bool tail = !route.pattern.empty() && route.pattern.back().front() == '*';
      if (route.method != m.method) continue;
      if (tail ? segments.size() < route.pattern.size() : segments.size() != route.pattern.size())
        continue;
      RouteParams params;
      bool matched = true;
      for (std::size_t i = 0; i < route.pattern.size(); ++i) {
        const std::string& pat = route.pattern[i];
        if (pat.front() == '*') {
          // tail capture: the rest of the path, slashes preserved
          std::string rest;
          for (std::size_t j = i; j < segments.size(); ++j) {
            if (!rest.empty()) rest += '/';
            rest += segments[j];
          }
          params[pat.substr(1)] = rest;
          break;
        }
        if (pat.size() >= 2 && pat.front() == '{' && pat.back() == '}') {
          params[pat.substr(1, pat.size() - 2)] = segments[i];
        } else if (pat != segments[i]) {
          matched = false;
          break;
        }
      }
      if (matched) return route.fn(m, params);
    }
    return reply(Message::response(404, m.path, "no route"));
  }

 private:
  struct Route {
    Method method;
    std::vector<std::string> pattern;
    RouteFn fn;
  };

  static std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> out;
    for (auto part : split(path, '/')) {
      if (!part.empty()) out.emplace_back(part);
    }
    return out;
  }

  std::string prefix_;
  std::vector<Route> routes_;
};

}  // namespace osmec
