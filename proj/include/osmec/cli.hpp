#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "osmec/core/log.hpp"
#include "osmec/core/result.hpp"
#include "osmec/sim/measure.hpp"
#include "osmec/sim/metrics.hpp"
#include "osmec/sim/scenario.hpp"
#include "osmec/sim/scenario_library.hpp"
#include "osmec/system.hpp"

namespace osmec::cli {

/// Exit-code map (scripts depend on it): 0 success, 1 runtime error,
/// 2 configuration error, 3 I/O error.
inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConfigError:
    case Errc::UnknownServiceClass:
    case Errc::UnknownServiceName:
    case Errc::UnrecognizedProtocol:
    case Errc::InvalidTemplate:
      return 2;
    case Errc::IoError:
      return 3;
    default:
      return 1;
  }
}

namespace detail {

inline Status write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return {Errc::IoError, "cannot open " + path};
  out << content;
  return out ? Status::success() : Status{Errc::IoError, "write failed: " + path};
}

inline Result<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Errc::IoError, "cannot open " + path};
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace detail

/// A session journals every state-changing command and rebuilds the live
/// system by deterministic replay, giving one continuous event log across
/// CLI invocations.
class Session {
 public:
  explicit Session(std::string dir, std::uint64_t seed = 1) : dir_(std::move(dir)), seed_(seed) {}

  Status load() {
    if (dir_.empty()) return Status::success();
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) return {Errc::IoError, "cannot create session dir " + dir_};
    const std::string path = journal_path();
    if (!std::filesystem::exists(path)) return Status::success();
    auto text = detail::read_file(path);
    if (!text.ok()) return text.error();
    nlohmann::json j = nlohmann::json::parse(text.value(), nullptr, false);
    if (j.is_discarded()) return {Errc::ConfigError, "corrupt session journal"};
    seed_ = j.value("seed", seed_);
    commands_ = j.value("commands", nlohmann::json::array());
    return Status::success();
  }

  /// Replays the journal into a fresh system. Commands run one after
  /// another, each to quiescence, exactly as the original invocations did —
  /// pre-scheduling them all would reorder work that shares a timestamp.
  Result<std::unique_ptr<EdgeSystem>> replay() const {
    SystemConfig cfg;
    cfg.seed = seed_;
    auto system = std::make_unique<EdgeSystem>(cfg);
    for (const auto& c : commands_) {
      const std::string verb = c.value("verb", std::string{});
      VirtTime at = VirtTime::from_seconds(c.value("t", 0.0));
      if (at < system->engine().now()) at = system->engine().now();
      if (verb == "request") {
        auto mode = start_mode_from(c.value("mode", std::string{"parallel"}));
        system->submit_request("cli", c.value("protocol", std::string{"http"}),
                               c.value("class", std::string{}), c.value("name", std::string{}),
                               c.value("input", nlohmann::json::object()),
                               mode.value_or(StartMode::Parallel), at);
        system->run();
      } else if (verb == "release-memory") {
        const std::uint64_t iid = c.value("instance", std::uint64_t{0});
        if (at == system->engine().now()) {
          system->mano().release_memory(iid, "cli");
        } else {
          system->schedule_release(iid, at, "cli");
          system->run();
        }
      }
    }
    return system;
  }

  void journal(nlohmann::json command) { commands_.push_back(std::move(command)); }

  Status save(const EdgeSystem& system) const {
    if (dir_.empty()) return Status::success();
    nlohmann::json j;
    j["seed"] = seed_;
    j["commands"] = commands_;
    if (auto st = detail::write_file(journal_path(), j.dump(2) + "\n"); !st.ok()) return st;
    return detail::write_file(dir_ + "/events.log", system.log().to_text());
  }

  std::uint64_t seed() const { return seed_; }
  bool persistent() const { return !dir_.empty(); }

 private:
  std::string journal_path() const { return dir_ + "/commands.json"; }

  std::string dir_;
  std::uint64_t seed_;
  nlohmann::json commands_ = nlohmann::json::array();
};

// ---- verbs ----

inline int cmd_run(const std::string& scenario_arg, const std::string& out_dir,
                   std::optional<std::uint64_t> seed, const std::string& format_name) {
  std::string text;
  if (auto bundled = scenarios::bundled(scenario_arg)) {
    text = *bundled;
  } else {
    auto file = detail::read_file(scenario_arg);
    if (!file.ok()) {
      log_error(file.error().to_string());
      return 3;
    }
    text = std::move(file.value());
  }

  auto cfg = parse_scenario(text);
  if (!cfg.ok()) {
    log_error(cfg.error().to_string());
    return 2;
  }
  auto run = run_scenario(cfg.value(), seed);
  if (!run.ok()) {
    log_error(run.error().to_string());
    return exit_code_for(run.error().code);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    log_error("cannot create " + out_dir);
    return 3;
  }
  if (auto st = detail::write_file(out_dir + "/events.log", run.value().events_text); !st.ok()) {
    log_error(st.error().to_string());
    return 3;
  }
  ExportFormat format = ExportFormat::All;
  if (format_name == "csv") format = ExportFormat::Csv;
  if (format_name == "histogram-csv") format = ExportFormat::HistogramCsv;
  auto files = export_report(run.value().report, out_dir, format);
  if (!files.ok()) {
    log_error(files.error().to_string());
    return 3;
  }

  const auto& rep = run.value().report;
  std::cout << "scenario " << cfg.value().name << ": requests " << rep.requests_total
            << " completed " << rep.requests_completed << " failed " << rep.requests_failed
            << " events " << rep.events << " log_hash " << hex64(rep.log_hash) << "\n";
  std::cout << "wrote " << out_dir << "/events.log";
  for (const auto& f : files.value()) std::cout << " " << out_dir << "/" << f;
  std::cout << "\n";
  return 0;
}

inline int cmd_request(const std::string& session_dir, const std::string& service_class,
                       const std::string& service_name, const std::string& input_json,
                       const std::string& protocol, const std::string& mode_name,
                       std::optional<std::uint64_t> seed) {
  nlohmann::json input = nlohmann::json::object();
  if (!input_json.empty()) {
    input = nlohmann::json::parse(input_json, nullptr, false);
    if (input.is_discarded()) {
      log_error("--input is not valid JSON");
      return 2;
    }
  }
  auto mode = start_mode_from(mode_name);
  if (!mode) {
    log_error("--mode must be parallel or sequential");
    return 2;
  }
  if (protocol != "http" && protocol != "legacy") {
    log_error("--protocol must be http or legacy");
    return 2;
  }

  Session session(session_dir, seed.value_or(1));
  if (auto st = session.load(); !st.ok()) {
    log_error(st.error().to_string());
    return exit_code_for(st.error().code);
  }
  auto replayed = session.replay();
  if (!replayed.ok()) {
    log_error(replayed.error().to_string());
    return 1;
  }
  EdgeSystem& system = *replayed.value();

  const double at = system.engine().now().seconds();
  const std::uint64_t rid = system.submit_request("cli", protocol, service_class, service_name,
                                                  input, *mode, system.engine().now());
  system.run();

  const auto* rec = system.request(rid);
  if (!rec) {
    log_error("request lost");
    return 1;
  }
  session.journal({{"verb", "request"},
                   {"t", at},
                   {"protocol", protocol},
                   {"class", service_class},
                   {"name", service_name},
                   {"input", input},
                   {"mode", mode_name}});
  if (auto st = session.save(system); !st.ok()) {
    log_error(st.error().to_string());
    return 3;
  }

  if (rec->outcome == RequestOutcome::Failed) {
    std::cout << "request " << rid << " failed: " << rec->error << "\n";
    for (Errc code :
         {Errc::UnknownServiceClass, Errc::UnknownServiceName, Errc::UnrecognizedProtocol}) {
      if (rec->error.rfind(errc_name(code), 0) == 0) return 2;
    }
    return 1;
  }
  const Instance* inst = system.mano().instance(rec->instance_id);
  std::cout << "request " << rid << " instance " << rec->instance_id << " state "
            << (inst ? instance_state_name(inst->state) : "?") << " result " << rec->result << "\n";
  return 0;
}

inline int cmd_release_memory(const std::string& session_dir, std::uint64_t instance_id,
                              std::optional<double> at_time) {
  Session session(session_dir);
  if (auto st = session.load(); !st.ok()) {
    log_error(st.error().to_string());
    return exit_code_for(st.error().code);
  }
  auto replayed = session.replay();
  if (!replayed.ok()) {
    log_error(replayed.error().to_string());
    return 1;
  }
  EdgeSystem& system = *replayed.value();

  const VirtTime at = at_time ? VirtTime::from_seconds(*at_time) : system.engine().now();
  if (at < system.engine().now()) {
    log_error("--at lies in the replayed past");
    return 2;
  }
  auto st = [&] {
    if (at == system.engine().now()) return system.mano().release_memory(instance_id, "cli");
    system.schedule_release(instance_id, at, "cli");
    system.run();
    return Status::success();
  }();
  if (!st.ok()) {
    log_error(st.error().to_string());
    return exit_code_for(st.error().code);
  }
  session.journal({{"verb", "release-memory"}, {"t", at.seconds()}, {"instance", instance_id}});
  if (auto save = session.save(system); !save.ok()) {
    log_error(save.error().to_string());
    return 3;
  }
  const Instance* inst = system.mano().instance(instance_id);
  std::cout << "instance " << instance_id << " state "
            << (inst ? instance_state_name(inst->state) : "?") << "\n";
  return 0;
}

inline int cmd_inspect(const std::string& session_dir, std::optional<std::uint64_t> instance_id,
                       std::optional<std::uint64_t> node_id, bool templates) {
  Session session(session_dir);
  if (auto st = session.load(); !st.ok()) {
    log_error(st.error().to_string());
    return exit_code_for(st.error().code);
  }
  auto replayed = session.replay();
  if (!replayed.ok()) {
    log_error(replayed.error().to_string());
    return 1;
  }
  EdgeSystem& system = *replayed.value();

  if (templates) {
    for (const auto& [id, t] : system.mano().templates()) {
      std::cout << "template " << id << " class " << service_class_name(t.app_class) << "\n";
      std::cout << "  managed:";
      for (const auto& nf : t.managed_nfs) std::cout << " " << nf;
      std::cout << "\n  actions:";
      for (const auto& a : t.actions) std::cout << " " << a;
      std::cout << "\n  profile " << t.resource_profile.to_string() << "\n";
    }
    return 0;
  }
  if (instance_id) {
    const Instance* inst = system.mano().instance(*instance_id);
    if (!inst) {
      log_error("unknown instance " + std::to_string(*instance_id));
      return 1;
    }
    std::cout << "instance " << inst->instance_id << " template " << inst->template_id << " svc "
              << inst->service_name << " state " << instance_state_name(inst->state) << "\n";
    std::cout << "  pod " << inst->pod_id << " request " << inst->request_id << "\n";
    std::cout << "  created " << inst->created_at.to_string() << " active "
              << inst->active_at.to_string() << " completed " << inst->completed_at.to_string()
              << " released " << inst->released_at.to_string() << "\n";
    for (auto gid : inst->grant_ids) {
      const auto& g = system.cluster().grants().at(gid);
      std::cout << "  grant " << gid << " node " << g.node_id << " " << g.amount.to_string()
                << " cpu_held " << (g.cpu_held ? "true" : "false") << " memory_held "
                << (g.memory_held ? "true" : "false") << "\n";
    }
    return 0;
  }
  if (node_id) {
    if (!system.cluster().has_node(*node_id)) {
      log_error("unknown node " + std::to_string(*node_id));
      return 1;
    }
    const Node& n = system.cluster().node(*node_id);
    std::cout << "node " << n.node_id << (n.alive ? " alive" : " failed") << "\n";
    std::cout << "  capacity " << n.capacity.to_string() << "\n";
    std::cout << "  free     " << n.free.to_string() << "\n";
    for (auto pid : n.pod_ids) {
      const Pod& p = system.cluster().pod(pid);
      std::cout << "  pod " << pid << " " << pod_state_name(p.state) << " containers "
                << p.containers.size() << "\n";
    }
    return 0;
  }
  log_error("inspect needs --instance, --node or --templates");
  return 2;
}

inline int cmd_export(const std::string& log_path, const std::string& out_dir,
                      const std::string& format_name) {
  auto text = detail::read_file(log_path);
  if (!text.ok()) {
    log_error(text.error().to_string());
    return 3;
  }
  const auto records = EventLog::parse_text(text.value());
  const MetricsReport rep = build_report(records);
  ExportFormat format = ExportFormat::All;
  if (format_name == "csv") format = ExportFormat::Csv;
  if (format_name == "histogram-csv") format = ExportFormat::HistogramCsv;
  auto files = export_report(rep, out_dir, format);
  if (!files.ok()) {
    log_error(files.error().to_string());
    return 3;
  }
  std::cout << "report from " << records.size() << " events, log_hash " << hex64(rep.log_hash)
            << "\n";
  for (const auto& f : files.value()) std::cout << "wrote " << out_dir << "/" << f << "\n";
  return 0;
}

inline int cmd_validate(const std::string& template_path) {
  auto loaded = load_template_file(template_path);
  if (!loaded.ok()) {
    log_error(loaded.error().to_string());
    return loaded.error().code == Errc::IoError ? 3 : 2;
  }
  // invariants against the built-ins it would sit beside
  for (const auto& builtin : {builtin_intensive_template(), builtin_high_throughput_template()}) {
    if (builtin.template_id == loaded.value().template_id) continue;
    if (builtin.app_class == loaded.value().app_class) continue;  // replaces nothing, other class
    if (auto st = validate_disjoint(builtin, loaded.value()); !st.ok()) {
      log_error(st.error().to_string());
      return 2;
    }
  }
  std::cout << "template " << loaded.value().template_id << " valid\n";
  return 0;
}

// ---- argv wiring ----

inline int run(std::vector<std::string> args) {
  CLI::App app{"osmec: service-based edge control plane and deterministic simulator"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "run a scenario and export its metrics");
  std::string scenario, out_dir = "out", format = "all";
  std::uint64_t seed_value = 0;
  bool seed_set = false;
  run_cmd->add_option("--scenario", scenario, "bundled name (fig7_1, fig7_2, fig8, fig9) or path")
      ->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--seed", seed_value, "seed override")->each([&](const std::string&) {
    seed_set = true;
  });
  run_cmd->add_option("--format", format, "csv | histogram-csv | all");

  // request
  auto* req_cmd = app.add_subcommand("request", "submit a live service request");
  std::string session_dir, service_class, service_name, input_json, protocol = "http",
                           mode = "parallel";
  std::uint64_t req_seed = 1;
  req_cmd->add_option("--session", session_dir, "session directory (persists state)");
  req_cmd->add_option("--class", service_class, "service class")->required();
  req_cmd->add_option("--name", service_name, "service name")->required();
  req_cmd->add_option("--input", input_json, "input JSON");
  req_cmd->add_option("--protocol", protocol, "http | legacy");
  req_cmd->add_option("--mode", mode, "parallel | sequential");
  req_cmd->add_option("--seed", req_seed, "seed for a fresh session");

  // release-memory
  auto* rel_cmd = app.add_subcommand("release-memory", "manually release an instance's memory");
  std::string rel_session;
  std::uint64_t rel_instance = 0;
  double rel_at = -1.0;
  rel_cmd->add_option("--session", rel_session, "session directory")->required();
  rel_cmd->add_option("--instance", rel_instance, "instance id")->required();
  rel_cmd->add_option("--at", rel_at, "virtual time of the release");

  // inspect
  auto* ins_cmd = app.add_subcommand("inspect", "inspect instances, nodes or templates");
  std::string ins_session;
  std::uint64_t ins_instance = 0, ins_node = 0;
  bool ins_templates = false;
  bool ins_instance_set = false, ins_node_set = false;
  ins_cmd->add_option("--session", ins_session, "session directory");
  ins_cmd->add_option("--instance", ins_instance, "instance id")->each([&](const std::string&) {
    ins_instance_set = true;
  });
  ins_cmd->add_option("--node", ins_node, "node id")->each([&](const std::string&) {
    ins_node_set = true;
  });
  ins_cmd->add_flag("--templates", ins_templates, "list registered templates");

  // export
  auto* exp_cmd = app.add_subcommand("export", "recompute metrics from an event log");
  std::string exp_log, exp_out = "out", exp_format = "all";
  exp_cmd->add_option("--log", exp_log, "events.log path")->required();
  exp_cmd->add_option("--out", exp_out, "output directory");
  exp_cmd->add_option("--format", exp_format, "csv | histogram-csv | all");

  // validate
  auto* val_cmd = app.add_subcommand("validate", "validate a template definition file");
  std::string val_template;
  val_cmd->add_option("--template", val_template, "template JSON path")->required();

  std::vector<const char*> argv;
  argv.push_back("osmec");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    log_error(e.what());
    return 2;
  }

  if (run_cmd->parsed())
    return cmd_run(scenario, out_dir,
                   seed_set ? std::optional<std::uint64_t>(seed_value) : std::nullopt, format);
  if (req_cmd->parsed())
    return cmd_request(session_dir, service_class, service_name, input_json, protocol, mode,
                       req_seed);
  if (rel_cmd->parsed())
    return cmd_release_memory(rel_session, rel_instance,
                              rel_at >= 0 ? std::optional<double>(rel_at) : std::nullopt);
  if (ins_cmd->parsed())
    return cmd_inspect(ins_session,
                       ins_instance_set ? std::optional<std::uint64_t>(ins_instance) : std::nullopt,
                       ins_node_set ? std::optional<std::uint64_t>(ins_node) : std::nullopt,
                       ins_templates);
  if (exp_cmd->parsed()) return cmd_export(exp_log, exp_out, exp_format);
  if (val_cmd->parsed()) return cmd_validate(val_template);
  return 2;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args));
}

}  // namespace osmec::cli
