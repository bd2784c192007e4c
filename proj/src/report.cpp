#include "smate/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace smate {

const char* to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::Single: return "single";
    case SchemeKind::Dual: return "dual";
    case SchemeKind::Priority: return "priority";
  }
  return "unknown";
}

MetricsReport make_report(const TraceSummary& trace) {
  MetricsReport r;
  r.scheme = to_string(trace.scheme);
  r.k = trace.k;
  r.t = trace.t;
  r.m = trace.m;
  r.cycles = trace.cycles;
  r.seed = trace.seed;
  r.adversary = to_string(trace.adversary);
  r.rounds = trace.rounds();
  r.capacity = trace.k - trace.t;
  r.effective_capacity = trace.effective_capacity();
  r.goodput = trace.goodput;
  for (const auto& rep : trace.reports) {
    r.recovery_counts[static_cast<std::size_t>(rep.scenario)]++;
    if (rep.unrecoverable) r.unrecoverable_rounds++;
  }
  r.lost_payloads = trace.lost_payloads;
  r.paths = trace.paths;
  r.stream_intact = trace.stream_intact;
  r.balancer_enabled = !trace.balancer.empty();
  if (r.balancer_enabled) {
    const auto& last = trace.balancer.back();
    r.final_rates.assign(last.rates.data(), last.rates.data() + last.rates.size());
    r.initial_gap = trace.balancer.front().gap;
    r.final_gap = last.gap;
  }
  return r;
}

std::string to_json(const MetricsReport& r, bool include_runtime) {
  nlohmann::ordered_json j;
  j["scheme"] = r.scheme;
  j["k"] = r.k;
  j["t"] = r.t;
  j["m"] = r.m;
  j["cycles"] = r.cycles;
  j["seed"] = r.seed;
  j["adversary"] = r.adversary;
  j["rounds"] = r.rounds;
  j["capacity"] = r.capacity;
  j["effective_capacity"] = r.effective_capacity;
  j["goodput"] = r.goodput;
  auto& rec = j["recovery"];
  for (std::size_t i = 0; i < r.recovery_counts.size(); ++i) {
    rec[to_string(static_cast<FailureScenario>(i))] = r.recovery_counts[i];
  }
  j["unrecoverable_rounds"] = r.unrecoverable_rounds;
  j["lost_payloads"] = r.lost_payloads;
  j["stream_intact"] = r.stream_intact;
  auto& paths = j["paths"] = nlohmann::ordered_json::array();
  for (const auto& p : r.paths) {
    paths.push_back({{"sent", p.sent},
                     {"delivered", p.delivered},
                     {"dropped", p.dropped},
                     {"in_flight", p.in_flight},
                     {"late", p.late},
                     {"flows", p.flows}});
  }
  auto& bal = j["balancer"];
  bal["enabled"] = r.balancer_enabled;
  bal["final_rates"] = r.final_rates;
  bal["initial_gap"] = r.initial_gap;
  bal["final_gap"] = r.final_gap;
  if (include_runtime && r.runtime_seconds) j["runtime_seconds"] = *r.runtime_seconds;
  return j.dump(2) + "\n";
}

std::string to_table(const MetricsReport& r) {
  std::ostringstream out;
  char buf[64];
  out << "scheme              " << r.scheme << " (k=" << r.k << ", t=" << r.t << ", m=" << r.m
      << ", cycles=" << r.cycles << ")\n";
  out << "seed                " << r.seed << "\n";
  out << "adversary           " << r.adversary << "\n";
  out << "rounds              " << r.rounds << "\n";
  out << "capacity (k-t)      " << r.capacity << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", r.effective_capacity);
  out << "effective capacity  " << buf << "\n";
  out << "lost payloads       " << r.lost_payloads << "\n";
  out << "unrecoverable       " << r.unrecoverable_rounds << "\n";
  out << "stream intact       " << (r.stream_intact ? "yes" : "no") << "\n";
  out << "recovery classes\n";
  for (std::size_t i = 0; i < r.recovery_counts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "  %-28s %zu", to_string(static_cast<FailureScenario>(i)), r.recovery_counts[i]);
    out << buf << "\n";
  }
  out << "path   sent  delivered  dropped  late\n";
  for (std::size_t i = 0; i < r.paths.size(); ++i) {
    const auto& p = r.paths[i];
    std::snprintf(buf, sizeof buf, "L%-4zu %5llu %10llu %8llu %5llu", i, static_cast<unsigned long long>(p.sent),
                  static_cast<unsigned long long>(p.delivered), static_cast<unsigned long long>(p.dropped),
                  static_cast<unsigned long long>(p.late));
    out << buf << "\n";
  }
  if (r.balancer_enabled) {
    std::snprintf(buf, sizeof buf, "%.3g -> %.3g", r.initial_gap, r.final_gap);
    out << "balancer gap        " << buf << "\n";
  }
  if (r.runtime_seconds) {
    std::snprintf(buf, sizeof buf, "%.3f s", *r.runtime_seconds);
    out << "runtime             " << buf << "\n";
  }
  return out.str();
}

}  // namespace smate
