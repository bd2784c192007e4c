#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "smate/codec.hpp"
#include "smate/framing.hpp"
#include "smate/schedule.hpp"

namespace smate {

struct DelayFn {
  enum class Kind : std::uint8_t { Linear, MM1 };
  Kind kind = Kind::Linear;
  double slope = 0.0;          // Linear: seconds per (packet/second)
  double service_rate = 0.0;   // MM1: packets/second

  /// Queueing delay at offered rate `lambda`; +inf once an M/M/1 queue saturates.
  double queueing_delay(double lambda) const;
};

struct PathModel {
  double base_delay = 0.010;
  double rate_capacity = 1e12;
  DelayFn delay;
  /// Extra delivery delay drawn uniformly from [0, jitter).
  double jitter = 0.0;

  double total_delay(double lambda) const { return base_delay + delay.queueing_delay(lambda); }
};

enum class AdversaryMode : std::uint8_t { None, SingleLink, TwoLink, Tamper, Eavesdrop };

const char* to_string(AdversaryMode mode);

struct Adversary {
  AdversaryMode mode = AdversaryMode::None;
  std::vector<std::size_t> paths;
  /// Inclusive window of global round indices (cycle * m + round).
  std::uint64_t start_round = 0;
  std::uint64_t end_round = std::numeric_limits<std::uint64_t>::max();
  /// Tamper: flip this bit of the frame (mod frame bits), or a random bit if unset.
  std::optional<std::uint64_t> tamper_bit;
  std::uint64_t rng_seed = 0;

  bool active(std::uint64_t global_round) const { return global_round >= start_round && global_round <= end_round; }
  bool targets(std::size_t path) const;
};

struct SchemeConfig {
  SchemeKind kind = SchemeKind::Single;
  std::optional<std::pair<std::size_t, std::size_t>> protection_paths;
  /// Priority scheme: protection slots per path, and slots per round.
  std::vector<std::size_t> priority_p;
  std::size_t t = 1;
};

struct BalancerConfig {
  bool enabled = false;
  double gamma = 0.05;
  /// Total offered load in packets/second; 0 means k / round_interval.
  double offered_rate = 0.0;
  /// Rate perturbation used for the second delay sample of each path.
  double probe = 0.01;
  std::size_t flows_per_round = 0;
};

struct Scenario {
  SchemeConfig scheme;
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t cycles = 1;
  std::size_t payload_size = 16;
  /// Source message length; defaults to filling every Plain slot.
  std::optional<std::size_t> message_bytes;
  std::vector<PathModel> paths;
  Adversary adversary;
  BalancerConfig balancer;
  std::uint64_t seed = 0;
  std::uint16_t sender_id = 1;
  double round_interval = 0.001;
  /// Round closes deadline_factor * max base delay after its send.
  double deadline_factor = 3.0;
  bool capture_trace = false;
};

/// A scenario field (named by its scenario-file key) holds an inconsistent value.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what) : std::runtime_error(what), field_(std::move(field)) {}
  explicit ValidationError(const std::string& what) : ValidationError("", what) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Throws ValidationError on any inconsistency. Fills `paths` with
/// defaults if it is empty.
void validate_scenario(Scenario& sc);
Schedule build_schedule(const Scenario& sc);

enum class SimEventKind : std::uint8_t { Deliver = 0, Drop = 1, RoundClose = 2, Send = 3 };

const char* to_string(SimEventKind kind);

struct SimEventRecord {
  double time = 0.0;
  SimEventKind kind = SimEventKind::Send;
  std::size_t path = 0;
  std::uint64_t round = 0;

  friend bool operator==(const SimEventRecord&, const SimEventRecord&) = default;
};

struct PathCounters {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t late = 0;
  std::uint64_t flows = 0;

  friend bool operator==(const PathCounters&, const PathCounters&) = default;
};

struct BalancerPoint {
  std::uint64_t round = 0;
  Eigen::VectorXd rates;
  Eigen::VectorXd congestion;
  double gap = 0.0;
};

struct TraceSummary {
  SchemeKind scheme = SchemeKind::Single;
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t t = 0;
  std::size_t cycles = 0;
  std::size_t payload_size = 0;
  std::uint64_t seed = 0;
  AdversaryMode adversary = AdversaryMode::None;

  /// One report per global round.
  std::vector<RecoveryReport> reports;
  /// Plain payloads delivered or recovered, per global round.
  std::vector<std::size_t> goodput;
  std::size_t lost_payloads = 0;
  std::vector<PathCounters> paths;
  std::vector<SimEventRecord> events;
  std::vector<BalancerPoint> balancer;

  Bytes source_message;
  Bytes delivered_message;
  bool stream_intact = false;

  /// Frames copied by an eavesdropper.
  std::vector<Bytes> observer_log;
  /// Frames as they arrived at the egress, when capture was requested.
  std::vector<Bytes> trace_frames;

  std::size_t rounds() const { return goodput.size(); }
  double effective_capacity() const;
};

/// Runs the scenario to completion. Deterministic in (scenario, seed).
TraceSummary run(Scenario sc);

/// True iff no eavesdropped payload equals a plaintext chunk of the source
/// message. Throws UsageError unless the run used Eavesdrop mode.
bool eavesdrop_check(const TraceSummary& trace);

}  // namespace smate
