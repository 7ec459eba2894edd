#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qparch/adl/parser.hpp"
#include "qparch/adl/printer.hpp"
#include "qparch/adl/validate.hpp"
#include "qparch/analysis/bounds.hpp"
#include "qparch/monitor/checks.hpp"
#include "qparch/monitor/query.hpp"
#include "qparch/scenario/registry.hpp"
#include "qparch/sim/engine.hpp"
#include "qparch/support/hash.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

using qparch::Micros;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// write-temp-rename so partially written outputs never appear
bool write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    if (!out) return false;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  return !ec;
}

struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, hash
  std::vector<std::pair<std::string, std::string>> outputs;  // path, hash
};

bool write_manifest(const std::string& output_path, const Manifest& m) {
  nlohmann::json j;
  j["tool"] = "qparch";
  j["version"] = kVersion;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["created_unix_us"] =
      std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  auto files = [](const std::vector<std::pair<std::string, std::string>>& fs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [path, hash] : fs)
      arr.push_back({{"path", path}, {"fnv1a64", hash}});
    return arr;
  };
  j["inputs"] = files(m.inputs);
  j["outputs"] = files(m.outputs);
  return write_file_atomic(output_path + ".manifest.json", j.dump(2) + "\n");
}

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out.push_back(' ');
    out += argv[i];
  }
  return out;
}

Micros effective_grid(Micros flag_value) {
  if (const char* env = std::getenv("QPARCH_GRID")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    std::cerr << "qparch: ignoring malformed QPARCH_GRID='" << env << "'\n";
  }
  return flag_value;
}

std::optional<qparch::adl::ArchitectureSpec> load_spec(
    const std::string& path, std::string* source_out, bool* io_error) {
  *io_error = false;
  auto source = read_file(path);
  if (!source) {
    std::cerr << "qparch: cannot read '" << path << "'\n";
    *io_error = true;
    return std::nullopt;
  }
  if (source_out) *source_out = *source;
  std::string module_name = std::filesystem::path(path).stem().string();
  auto result = qparch::adl::parse_architecture(*source, module_name);
  for (const auto& d : result.diagnostics) {
    std::cerr << path << ":" << d.pos.line << ":" << d.pos.col << ": "
              << (d.severity == qparch::adl::Diagnostic::Severity::Error
                      ? "error: "
                      : "warning: ")
              << d.message << "\n";
  }
  return result.spec;
}

std::optional<Micros> parse_duration_flag(const std::string& text) {
  if (auto v = qparch::parse_duration(text)) return v;
  // bare integers are microseconds
  char* end = nullptr;
  long long v = std::strtoll(text.c_str(), &end, 10);
  if (end && *end == '\0' && v >= 0) return v;
  return std::nullopt;
}

int emit_report(const std::string& report, const std::string& out_path,
                Manifest manifest) {
  if (out_path.empty()) {
    std::cout << report;
    return kExitOk;
  }
  if (!write_file_atomic(out_path, report)) {
    std::cerr << "qparch: cannot write '" << out_path << "'\n";
    return kExitUsage;
  }
  manifest.outputs.emplace_back(out_path,
                                qparch::to_hex(qparch::fnv1a64(report)));
  if (!write_manifest(out_path, manifest)) {
    std::cerr << "qparch: cannot write manifest for '" << out_path << "'\n";
    return kExitUsage;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_check(const std::string& path, const std::string& format,
              const std::string& out_path, const std::string& command_line) {
  std::string source;
  bool io_error = false;
  auto spec = load_spec(path, &source, &io_error);
  if (!spec) return kExitUsage;

  auto report = qparch::adl::validate(*spec);
  std::string output;
  bool analyzed = false;
  std::vector<qparch::analysis::ChannelAnalysis> channels;
  if (!report.has_errors()) {
    channels = qparch::analysis::analyze(*spec);
    analyzed = true;
  }
  if (format == "records") {
    output = report.to_records();
    if (analyzed) output += qparch::analysis::to_records(channels);
  } else {
    if (report.empty()) {
      output = "validation: clean (" + std::to_string(spec->nodes.size()) +
               " nodes, " + std::to_string(spec->topics.size()) + " topics)\n";
    } else {
      output = "validation findings:\n" + report.to_records();
    }
    if (analyzed) {
      output += "channel bounds (" + std::to_string(channels.size()) + "):\n";
      output += qparch::analysis::to_records(channels);
    }
  }

  Manifest manifest;
  manifest.command = command_line;
  manifest.inputs.emplace_back(path, qparch::to_hex(qparch::fnv1a64(source)));
  int rc = emit_report(output, out_path, manifest);
  if (rc != kExitOk) return rc;
  return report.has_errors() ? kExitViolation : kExitOk;
}

int cmd_simulate(const std::string& path, const std::string& scenario_name,
                 std::uint64_t seed, const std::string& horizon_text,
                 const std::string& trace_path, const std::string& jitter,
                 const std::string& latency, const std::string& script_path,
                 Micros grid, const std::string& command_line) {
  std::string source;
  bool io_error = false;
  auto spec = load_spec(path, &source, &io_error);
  if (!spec) return kExitUsage;
  auto validation = qparch::adl::validate(*spec);
  if (validation.has_errors()) {
    std::cerr << validation.to_records();
    return kExitUsage;
  }
  if (!qparch::scenario::has_scenario(scenario_name)) {
    std::cerr << "qparch: unknown scenario '" << scenario_name << "'\n";
    return kExitUsage;
  }
  auto horizon = parse_duration_flag(horizon_text);
  if (!horizon) {
    std::cerr << "qparch: bad horizon '" << horizon_text << "'\n";
    return kExitUsage;
  }

  qparch::scenario::ScenarioOptions opts;
  Manifest manifest;
  manifest.command = command_line;
  manifest.seed = seed;
  manifest.inputs.emplace_back(path, qparch::to_hex(qparch::fnv1a64(source)));
  if (!script_path.empty()) {
    auto script_text = read_file(script_path);
    if (!script_text) {
      std::cerr << "qparch: cannot read '" << script_path << "'\n";
      return kExitUsage;
    }
    try {
      opts.script = qparch::scenario::InputScript::parse_csv(*script_text);
    } catch (const std::exception& e) {
      std::cerr << "qparch: " << e.what() << "\n";
      return kExitUsage;
    }
    manifest.inputs.emplace_back(script_path,
                                 qparch::to_hex(qparch::fnv1a64(*script_text)));
  }

  qparch::sim::SimConfig cfg;
  cfg.seed = seed;
  cfg.horizon = *horizon;
  cfg.grid = effective_grid(grid);
  if (jitter == "uniform")
    cfg.jitter = qparch::sim::JitterModel::Uniform;
  else if (jitter == "fixed-min")
    cfg.jitter = qparch::sim::JitterModel::FixedMin;
  else if (jitter == "fixed-max")
    cfg.jitter = qparch::sim::JitterModel::FixedMax;
  else {
    std::cerr << "qparch: unknown jitter model '" << jitter << "'\n";
    return kExitUsage;
  }
  if (latency == "uniform")
    cfg.latency = qparch::sim::LatencyModel::Uniform;
  else if (latency == "fixed")
    cfg.latency = qparch::sim::LatencyModel::Fixed;
  else {
    std::cerr << "qparch: unknown latency model '" << latency << "'\n";
    return kExitUsage;
  }

  qparch::sim::Trace trace;
  try {
    auto run = qparch::scenario::bind_scenario(scenario_name, *spec, opts);
    trace = qparch::sim::run(*spec, run.bindings, cfg,
                             qparch::to_hex(qparch::fnv1a64(source)));
  } catch (const std::exception& e) {
    std::cerr << "qparch: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string serialized = trace.serialize();
  if (!write_file_atomic(trace_path, serialized)) {
    std::cerr << "qparch: cannot write '" << trace_path << "'\n";
    return kExitUsage;
  }
  manifest.outputs.emplace_back(trace_path,
                                qparch::to_hex(qparch::fnv1a64(serialized)));
  if (!write_manifest(trace_path, manifest)) return kExitUsage;
  if (trace.faulted) {
    std::cerr << "qparch: simulation faulted; see FAULT event in the trace\n";
    return kExitViolation;
  }
  std::cout << "trace: " << trace_path << " (" << trace.events.size()
            << " events)\n";
  return kExitOk;
}

int cmd_monitor(const std::string& trace_path, const std::string& arch_path,
                const std::string& checks_list, const std::string& format,
                const std::string& out_path, const std::string& command_line) {
  auto trace_text = read_file(trace_path);
  if (!trace_text) {
    std::cerr << "qparch: cannot read '" << trace_path << "'\n";
    return kExitUsage;
  }
  qparch::sim::TraceFormatError fmt_error;
  auto trace = qparch::sim::Trace::parse(*trace_text, &fmt_error);
  if (fmt_error.line > 0) {
    std::cerr << trace_path << ":" << fmt_error.line << ": " << fmt_error.message
              << "\n";
    return kExitUsage;
  }

  std::string arch_source;
  bool io_error = false;
  auto spec = load_spec(arch_path, &arch_source, &io_error);
  if (!spec) return kExitUsage;
  const std::string arch_hash = qparch::to_hex(qparch::fnv1a64(arch_source));
  if (!trace.arch_hash.empty() && trace.arch_hash != arch_hash) {
    std::cerr << "qparch: trace was produced from a different architecture "
                 "(hash mismatch)\n";
    return kExitUsage;
  }
  auto validation = qparch::adl::validate(*spec);
  if (validation.has_errors()) {
    std::cerr << validation.to_records();
    return kExitUsage;
  }

  auto channels = qparch::analysis::analyze(*spec);
  auto report = qparch::monitor::monitor(trace, channels);
  if (!checks_list.empty()) {
    std::vector<qparch::monitor::CheckResult> kept;
    for (auto& c : report.checks)
      if (checks_list.find(c.check) != std::string::npos) kept.push_back(std::move(c));
    report.checks = std::move(kept);
  }

  std::string output;
  if (format == "records") {
    output = report.to_records();
  } else {
    output = "monitor: " + std::to_string(report.violation_count()) +
             " violation(s) across " + std::to_string(report.checks.size()) +
             " check(s)\n";
    output += report.to_records();
  }
  Manifest manifest;
  manifest.command = command_line;
  manifest.inputs.emplace_back(trace_path,
                               qparch::to_hex(qparch::fnv1a64(*trace_text)));
  manifest.inputs.emplace_back(arch_path, arch_hash);
  int rc = emit_report(output, out_path, manifest);
  if (rc != kExitOk) return rc;
  return report.clean() ? kExitOk : kExitViolation;
}

int cmd_query(const std::string& trace_path,
              const std::vector<std::string>& query_paths,
              const std::string& period_text) {
  auto trace_text = read_file(trace_path);
  if (!trace_text) {
    std::cerr << "qparch: cannot read '" << trace_path << "'\n";
    return kExitUsage;
  }
  qparch::sim::TraceFormatError fmt_error;
  auto trace = qparch::sim::Trace::parse(*trace_text, &fmt_error);
  if (fmt_error.line > 0) {
    std::cerr << trace_path << ":" << fmt_error.line << ": " << fmt_error.message
              << "\n";
    return kExitUsage;
  }
  auto period = parse_duration_flag(period_text);
  if (!period || *period <= 0) {
    std::cerr << "qparch: bad period '" << period_text << "'\n";
    return kExitUsage;
  }

  bool all_hold = true;
  for (const auto& qpath : query_paths) {
    auto qtext = read_file(qpath);
    if (!qtext) {
      std::cerr << "qparch: cannot read '" << qpath << "'\n";
      return kExitUsage;
    }
    qparch::monitor::QueryParseError perr;
    auto query = qparch::monitor::parse_query(*qtext, &perr);
    if (!query) {
      std::cerr << qpath << ": offset " << perr.offset << ": " << perr.message
                << "\n";
      return kExitUsage;
    }
    try {
      auto unfolded = qparch::monitor::unfold_query(*query, *period);
      auto outcome = qparch::monitor::eval_query(trace, unfolded.plain);
      if (outcome.holds) {
        std::cout << qpath << ": holds";
        if (outcome.vacuous) std::cout << " (vacuous: " << outcome.warning << ")";
        std::cout << "\n";
      } else {
        all_hold = false;
        std::cout << qpath << ": fails at step "
                  << *outcome.counterexample_step << " of node "
                  << unfolded.plain.system << "\n";
        for (const auto& [name, value] : outcome.valuation)
          std::cout << "  " << name << " = " << value.to_string() << "\n";
      }
    } catch (const qparch::monitor::QueryError& e) {
      std::cerr << qpath << ": " << e.what() << "\n";
      return kExitUsage;
    }
  }
  return all_hold ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-periodic pub/sub architecture toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  const std::string command_line = join_args(argc, argv);

  // check
  std::string check_path, check_format = "text", check_out;
  auto* check = app.add_subcommand("check", "parse, validate, and derive bounds");
  check->add_option("path", check_path, "architecture file (.radl)")->required();
  check->add_option("--format", check_format, "text|records");
  check->add_option("--out", check_out, "write the report to a file");

  // simulate
  std::string sim_path, sim_scenario, sim_horizon = "60sec", sim_trace;
  std::string sim_jitter = "uniform", sim_latency = "uniform", sim_script;
  std::uint64_t sim_seed = 0;
  Micros sim_grid = 1;
  auto* simulate = app.add_subcommand("simulate", "run a seeded scenario");
  simulate->add_option("path", sim_path, "architecture file (.radl)")->required();
  simulate->add_option("--scenario", sim_scenario, "scenario name")->required();
  simulate->add_option("--seed", sim_seed, "run seed (default 0)");
  simulate->add_option("--horizon", sim_horizon, "duration, e.g. 60sec");
  simulate->add_option("--trace", sim_trace, "output trace path")->required();
  simulate->add_option("--jitter", sim_jitter, "uniform|fixed-min|fixed-max");
  simulate->add_option("--latency", sim_latency, "uniform|fixed");
  simulate->add_option("--script", sim_script, "exogenous input CSV");
  simulate->add_option("--grid", sim_grid, "time grid in microseconds");

  // monitor
  std::string mon_trace, mon_arch, mon_checks, mon_format = "text", mon_out;
  auto* monitor = app.add_subcommand("monitor", "verify a trace against bounds");
  monitor->add_option("trace", mon_trace, "trace file")->required();
  monitor->add_option("--arch", mon_arch, "architecture file")->required();
  monitor->add_option("--checks", mon_checks, "comma list of check ids");
  monitor->add_option("--format", mon_format, "text|records");
  monitor->add_option("--out", mon_out, "write the report to a file");

  // query
  std::string q_trace, q_period = "1sec";
  std::vector<std::string> q_files;
  auto* query = app.add_subcommand("query", "evaluate temporal queries");
  query->add_option("trace", q_trace, "trace file")->required();
  query->add_option("--query", q_files, "query file (repeatable)")->required();
  query->add_option("--period", q_period, "step period, e.g. 100msec");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed())
      return cmd_check(check_path, check_format, check_out, command_line);
    if (simulate->parsed())
      return cmd_simulate(sim_path, sim_scenario, sim_seed, sim_horizon,
                          sim_trace, sim_jitter, sim_latency, sim_script,
                          sim_grid, command_line);
    if (monitor->parsed())
      return cmd_monitor(mon_trace, mon_arch, mon_checks, mon_format, mon_out,
                         command_line);
    if (query->parsed()) return cmd_query(q_trace, q_files, q_period);
  } catch (const std::exception& e) {
    std::cerr << "qparch: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
