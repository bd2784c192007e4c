#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smate/simnet.hpp"

namespace smate {

struct MetricsReport {
  std::string scheme;
  std::size_t k = 0;
  std::size_t t = 0;
  std::size_t m = 0;
  std::size_t cycles = 0;
  std::uint64_t seed = 0;
  std::string adversary;

  std::size_t rounds = 0;
  std::size_t capacity = 0;
  double effective_capacity = 0.0;
  std::vector<std::size_t> goodput;
  /// Indexed by FailureScenario.
  std::array<std::size_t, 5> recovery_counts{};
  std::size_t unrecoverable_rounds = 0;
  std::size_t lost_payloads = 0;
  std::vector<PathCounters> paths;
  bool stream_intact = false;

  bool balancer_enabled = false;
  std::vector<double> final_rates;
  double initial_gap = 0.0;
  double final_gap = 0.0;

  std::optional<double> runtime_seconds;
};

MetricsReport make_report(const TraceSummary& trace);

/// Stable key set; see README. Runtime is only emitted when requested.
std::string to_json(const MetricsReport& report, bool include_runtime = false);
std::string to_table(const MetricsReport& report);

const char* to_string(SchemeKind s);

}  // namespace smate
