#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "smate/schedule.hpp"
#include "smate/simnet.hpp"

namespace smate {

struct SweepResult {
  std::size_t passed = 0;
  std::size_t total = 0;
  bool ok() const { return passed == total; }
};

/// Every (round, single failed path) pattern of one cycle.
SweepResult single_failure_sweep(const Schedule& sched, std::size_t payload_size, std::uint64_t seed);
/// Every (round, unordered failed pair) pattern of one cycle.
SweepResult pair_failure_sweep(const Schedule& sched, std::size_t payload_size, std::uint64_t seed);
/// Every (round, failure set of size t) pattern of one cycle.
SweepResult t_failure_sweep(const Schedule& sched, std::size_t payload_size, std::uint64_t seed);
/// Invertibility of every 2x2 minor of the dual coefficient rows.
SweepResult coefficient_minor_check(const Schedule& sched);
/// Rounds whose Encoded-slot count equals t.
SweepResult column_budget_check(const Schedule& sched);

struct VerifyOutcome {
  std::vector<std::string> lines;
  bool pass = true;
};

/// Exhaustive failure-pattern verification for the scenario's scheme.
VerifyOutcome verify_scheme(const Scenario& sc);

}  // namespace smate
