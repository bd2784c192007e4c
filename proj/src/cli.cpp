#include "smate/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "smate/report.hpp"
#include "smate/scenario_file.hpp"
#include "smate/simnet.hpp"
#include "smate/verify.hpp"

namespace smate {

namespace {

struct CommonOptions {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
  std::string format = "table";
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("scenario", o.scenario, "Scenario file")->required();
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_flag("--quiet", o.quiet, "Suppress standard output");
}

Scenario load(const CommonOptions& o) {
  Scenario sc = load_scenario(o.scenario);
  if (o.seed) sc.seed = *o.seed;
  return sc;
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  return true;
}

int simulate(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const Scenario sc = load(o);
  const auto start = std::chrono::steady_clock::now();
  const TraceSummary trace = run(sc);
  MetricsReport report = make_report(trace);
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string text = o.format == "json" ? to_json(report, o.timing) : to_table(report);
  if (!o.out.empty() && !write_file(o.out, text, err)) return kExitUsage;
  if (!o.quiet) out << text;
  return kExitOk;
}

int schedule(const CommonOptions& o, std::ostream& out) {
  const Scenario sc = load(o);
  if (!o.quiet) out << render(build_schedule(sc));
  return kExitOk;
}

int verify(const CommonOptions& o, std::ostream& out) {
  const Scenario sc = load(o);
  const VerifyOutcome v = verify_scheme(sc);
  if (!o.quiet) {
    for (const auto& line : v.lines) out << line << "\n";
  }
  return v.pass ? kExitOk : kExitVerifyFailed;
}

int trace(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  Scenario sc = load(o);
  sc.capture_trace = true;
  const TraceSummary t = run(sc);
  try {
    write_trace_file(o.out, t.trace_frames);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!o.quiet) out << "captured " << t.trace_frames.size() << " frames to " << o.out << "\n";
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coding-based multipath protection simulator", "smate"};
  app.require_subcommand(1);

  CommonOptions sim_o, sched_o, verify_o, trace_o;
  auto* sim = app.add_subcommand("simulate", "Run a scenario and report metrics");
  add_common(sim, sim_o);
  sim->add_option("--out", sim_o.out, "Also write the report to this file");
  sim->add_option("--format", sim_o.format, "Report format")->check(CLI::IsMember({"table", "json"}));
  sim->add_flag("--timing", sim_o.timing, "Include wall-clock runtime in JSON output");

  auto* sched = app.add_subcommand("schedule", "Print the schedule grid");
  add_common(sched, sched_o);

  auto* ver = app.add_subcommand("verify", "Exhaustive failure-pattern sweep");
  add_common(ver, verify_o);

  auto* tr = app.add_subcommand("trace", "Capture the wire trace of a run");
  add_common(tr, trace_o);
  tr->add_option("--out", trace_o.out, "Trace file")->required();

  std::vector<std::string> argv_store{"smate"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return simulate(sim_o, out, err);
    if (sched->parsed()) return schedule(sched_o, out);
    if (ver->parsed()) return verify(verify_o, out);
    if (tr->parsed()) return trace(trace_o, out, err);
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace smate
