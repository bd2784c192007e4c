#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "smate/simnet.hpp"

namespace smate {

/// Parse or validation failure, located at a line of the scenario file
/// (line 0 when no single line is responsible).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string source, std::size_t line, const std::string& message);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string message_;
};

/// Parses `key = value` lines with `[paths]`, `[adversary]` and
/// `[balancer]` sections; `#` starts a comment. The result is validated.
/// When the text sets no seed, SMATE_SEED from the environment is used.
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");

/// Reads and parses a scenario file. Throws ScenarioError.
Scenario load_scenario(const std::string& path);

}  // namespace smate
