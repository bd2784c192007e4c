#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <variant>
#include <vector>

#include "smate/framing.hpp"
#include "smate/schedule.hpp"

namespace smate {

struct PacketHeader {
  std::uint16_t sender_id = 0;
  std::uint16_t session = 0;
};

/// Builds one packet per path for `round`. Plain slots carry their payload
/// verbatim; Encoded slots carry the slot's linear combination of the
/// round's Plain payloads. Throws UsageError if `plain_payloads` does not
/// hold exactly the round's ordinals or the lengths differ.
std::vector<Packet> encode_round(const Schedule& sched, std::size_t round,
                                 const std::map<std::size_t, Bytes>& plain_payloads, PacketHeader header = {});

enum class PathFault : std::uint8_t { Absent, Integrity, Duplicate, Misrouted };

/// Egress-side collection point for one (session, round).
class RoundBuffer {
 public:
  struct Failed {
    PathFault reason;
  };
  using Entry = std::variant<std::monostate, Packet, Failed>;

  RoundBuffer(std::uint16_t session, std::uint16_t round, std::size_t k);

  std::uint16_t session() const { return session_; }
  std::uint16_t round() const { return round_; }
  std::size_t k() const { return entries_.size(); }
  bool deadline_reached() const { return closed_; }

  /// Records what arrived on `path`. Checksum failures and duplicates mark
  /// the path failed for this round. Throws UsageError if a decoded packet
  /// belongs to another session or round.
  void ingest(std::size_t path, const DecodeResult& arrival);
  /// Closes the round; paths with nothing stored count as failed.
  void close();

  const Entry& entry(std::size_t path) const { return entries_.at(path); }
  const Packet* packet(std::size_t path) const { return std::get_if<Packet>(&entries_.at(path)); }
  bool failed(std::size_t path) const { return std::holds_alternative<Failed>(entries_.at(path)); }

 private:
  std::uint16_t session_;
  std::uint16_t round_;
  std::vector<Entry> entries_;
  bool closed_ = false;
};

/// Failure classes; names follow the two-path attack analysis. TwoWorking
/// covers any failure set confined to working slots.
enum class FailureScenario : std::uint8_t {
  NoFailure,
  ProtectionOnly,
  OneWorkingOneProtection,
  TwoWorking,
  ExceedsBudget,
};

const char* to_string(FailureScenario s);

struct RecoveryReport {
  std::size_t round = 0;
  std::set<std::size_t> failed_paths;
  /// Payloads rebuilt from Encoded slots, keyed by data ordinal.
  std::map<std::size_t, Bytes> recovered;
  /// Ordinals of this round that could not be delivered or rebuilt.
  std::vector<std::size_t> lost;
  bool unrecoverable = false;
  FailureScenario scenario = FailureScenario::NoFailure;

  friend bool operator==(const RecoveryReport&, const RecoveryReport&) = default;
};

/// Plain payloads that arrived intact in a buffer, keyed by data ordinal.
std::map<std::size_t, Bytes> received_plain(const Schedule& sched, const RoundBuffer& buf);

/// Detects failed paths and rebuilds missing Plain payloads from the
/// surviving Encoded slots. Throws UsageError if the buffer is still open.
RecoveryReport recover_round(const Schedule& sched, const RoundBuffer& buf);

/// Solves c00*a + c01*b = s0, c10*a + c11*b = s1 byte-wise by scaling the
/// first equation and subtracting. Returns nullopt for a singular system.
std::optional<std::pair<Bytes, Bytes>> solve_pair(const Field& f, std::uint8_t c00, std::uint8_t c01, std::uint8_t c10,
                                                  std::uint8_t c11, std::span<const std::uint8_t> s0,
                                                  std::span<const std::uint8_t> s1);

/// Gaussian elimination for `rows` equations in `unknowns` byte-vector
/// unknowns. coeffs is row-major rows x unknowns. Returns nullopt if the
/// system has rank below `unknowns`.
std::optional<std::vector<Bytes>> solve_linear(const Field& f, std::vector<std::uint8_t> coeffs, std::size_t rows,
                                               std::size_t unknowns, std::vector<Bytes> rhs);

struct SessionOutput {
  /// One entry per data ordinal of the cycle; nullopt where lost.
  std::vector<std::optional<Bytes>> payloads;
  std::vector<std::size_t> lost_ordinals;
};

/// Reassembles a cycle in data-ordinal order from the received Plain
/// payloads and the per-round recovery reports.
SessionOutput decode_session(const Schedule& sched, std::span<const RecoveryReport> reports,
                             const std::map<std::size_t, Bytes>& plain_stream);

}  // namespace smate
