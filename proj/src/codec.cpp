#include "smate/codec.hpp"

#include <algorithm>
#include <string>

#include "smate/errors.hpp"

namespace smate {

std::vector<Packet> encode_round(const Schedule& sched, std::size_t round,
                                 const std::map<std::size_t, Bytes>& plain_payloads, PacketHeader header) {
  if (round >= sched.m()) throw UsageError("round " + std::to_string(round) + " outside the schedule");
  const auto ordinals = sched.round_ordinals(round);
  if (plain_payloads.size() != ordinals.size()) {
    throw UsageError("round " + std::to_string(round) + " needs " + std::to_string(ordinals.size()) +
                     " payloads, got " + std::to_string(plain_payloads.size()));
  }
  std::optional<std::size_t> length;
  for (auto ord : ordinals) {
    auto it = plain_payloads.find(ord);
    if (it == plain_payloads.end()) throw UsageError("missing payload for ordinal " + std::to_string(ord));
    if (length && *length != it->second.size()) throw UsageError("payloads of one round must have equal length");
    length = it->second.size();
  }

  std::vector<Packet> out(sched.k());
  for (std::size_t i = 0; i < sched.k(); ++i) {
    Packet& p = out[i];
    p.sender_id = header.sender_id;
    p.session = header.session;
    p.path_index = static_cast<std::uint8_t>(i);
    p.round = static_cast<std::uint16_t>(round);
    const auto& slot = sched.at(i, round);
    if (const auto* plain = std::get_if<PlainSlot>(&slot)) {
      p.kind = PayloadKind::Plain;
      p.payload = plain_payloads.at(plain->data_ordinal);
    } else {
      const auto& enc = std::get<EncodedSlot>(slot);
      p.kind = PayloadKind::Encoded;
      p.payload.assign(length.value_or(0), 0);
      for (const auto& term : enc.terms) {
        const auto& src = plain_payloads.at(std::get<PlainSlot>(sched.at(term.path, round)).data_ordinal);
        sched.field().axpy(p.payload, term.coeff.value, src);
      }
    }
  }
  return out;
}

RoundBuffer::RoundBuffer(std::uint16_t session, std::uint16_t round, std::size_t k)
    : session_(session), round_(round), entries_(k) {}

void RoundBuffer::ingest(std::size_t path, const DecodeResult& arrival) {
  if (path >= entries_.size()) throw UsageError("path index out of range");
  auto& e = entries_[path];
  if (std::holds_alternative<Failed>(e)) return;
  if (std::holds_alternative<Packet>(e)) {
    e = Failed{PathFault::Duplicate};
    return;
  }
  if (std::holds_alternative<WireFault>(arrival)) {
    e = Failed{PathFault::Integrity};
    return;
  }
  const auto& p = std::get<Packet>(arrival);
  if (p.session != session_ || p.round != round_) {
    throw UsageError("packet for session " + std::to_string(p.session) + " round " + std::to_string(p.round) +
                     " ingested into buffer for session " + std::to_string(session_) + " round " +
                     std::to_string(round_));
  }
  if (p.path_index != path) {
    e = Failed{PathFault::Misrouted};
    return;
  }
  e = p;
}

void RoundBuffer::close() {
  for (auto& e : entries_) {
    if (std::holds_alternative<std::monostate>(e)) e = Failed{PathFault::Absent};
  }
  closed_ = true;
}

const char* to_string(FailureScenario s) {
  switch (s) {
    case FailureScenario::NoFailure: return "no_failure";
    case FailureScenario::ProtectionOnly: return "protection_only";
    case FailureScenario::OneWorkingOneProtection: return "one_working_one_protection";
    case FailureScenario::TwoWorking: return "two_working";
    case FailureScenario::ExceedsBudget: return "exceeds_budget";
  }
  return "unknown";
}

namespace {

// Paths whose contribution is usable this round: an intact packet of the
// kind the schedule expects, with the round's payload length.
std::vector<const Packet*> usable_packets(const Schedule& sched, const RoundBuffer& buf) {
  std::vector<const Packet*> usable(sched.k(), nullptr);
  std::optional<std::size_t> length;
  for (std::size_t i = 0; i < sched.k(); ++i) {
    const Packet* p = buf.packet(i);
    if (p == nullptr) continue;
    const auto expected = sched.is_plain(i, buf.round()) ? PayloadKind::Plain : PayloadKind::Encoded;
    if (p->kind != expected) continue;
    if (length && *length != p->payload.size()) continue;
    length = p->payload.size();
    usable[i] = p;
  }
  return usable;
}

}  // namespace

std::map<std::size_t, Bytes> received_plain(const Schedule& sched, const RoundBuffer& buf) {
  std::map<std::size_t, Bytes> out;
  const auto usable = usable_packets(sched, buf);
  for (std::size_t i = 0; i < sched.k(); ++i) {
    if (usable[i] != nullptr && sched.is_plain(i, buf.round())) {
      out.emplace(std::get<PlainSlot>(sched.at(i, buf.round())).data_ordinal, usable[i]->payload);
    }
  }
  return out;
}

std::optional<std::pair<Bytes, Bytes>> solve_pair(const Field& f, std::uint8_t c00, std::uint8_t c01, std::uint8_t c10,
                                                  std::uint8_t c11, std::span<const std::uint8_t> s0,
                                                  std::span<const std::uint8_t> s1) {
  if (c00 == 0) {
    if (c10 == 0) return std::nullopt;
    std::swap(c00, c10);
    std::swap(c01, c11);
    std::swap(s0, s1);
  }
  // Scale the first equation by c10 / c00 and subtract it from the second,
  // leaving (c11 - factor * c01) * b = s1 - factor * s0.
  const std::uint8_t factor = f.mul_raw(c10, f.inv_raw(c00));
  const std::uint8_t pivot = c11 ^ f.mul_raw(factor, c01);
  if (pivot == 0) return std::nullopt;

  Bytes b(s1.begin(), s1.end());
  f.axpy(b, factor, s0);
  f.scale(b, f.inv_raw(pivot));

  Bytes a(s0.begin(), s0.end());
  f.axpy(a, c01, b);
  f.scale(a, f.inv_raw(c00));
  return std::pair{std::move(a), std::move(b)};
}

std::optional<std::vector<Bytes>> solve_linear(const Field& f, std::vector<std::uint8_t> coeffs, std::size_t rows,
                                               std::size_t unknowns, std::vector<Bytes> rhs) {
  if (coeffs.size() != rows * unknowns || rhs.size() != rows) throw UsageError("system dimensions disagree");
  auto c = [&](std::size_t r, std::size_t u) -> std::uint8_t& { return coeffs[r * unknowns + u]; };

  for (std::size_t col = 0; col < unknowns; ++col) {
    std::size_t pivot = col;
    while (pivot < rows && c(pivot, col) == 0) ++pivot;
    if (pivot == rows) return std::nullopt;
    if (pivot != col) {
      for (std::size_t u = 0; u < unknowns; ++u) std::swap(c(pivot, u), c(col, u));
      std::swap(rhs[pivot], rhs[col]);
    }
    const std::uint8_t inv = f.inv_raw(c(col, col));
    for (std::size_t u = 0; u < unknowns; ++u) c(col, u) = f.mul_raw(c(col, u), inv);
    f.scale(rhs[col], inv);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == col || c(r, col) == 0) continue;
      const std::uint8_t factor = c(r, col);
      for (std::size_t u = 0; u < unknowns; ++u) c(r, u) ^= f.mul_raw(factor, c(col, u));
      f.axpy(rhs[r], factor, rhs[col]);
    }
  }
  rhs.resize(unknowns);
  return rhs;
}

RecoveryReport recover_round(const Schedule& sched, const RoundBuffer& buf) {
  if (!buf.deadline_reached()) throw UsageError("recover_round needs a closed round buffer");
  const std::size_t round = buf.round();
  const Field& f = sched.field();
  const auto usable = usable_packets(sched, buf);

  RecoveryReport report;
  report.round = round;

  std::vector<std::size_t> missing_paths;
  std::vector<std::size_t> surviving_encoded;
  bool lost_encoded = false;
  for (std::size_t i = 0; i < sched.k(); ++i) {
    const bool plain = sched.is_plain(i, round);
    if (usable[i] == nullptr) {
      report.failed_paths.insert(i);
      if (plain) {
        missing_paths.push_back(i);
      } else {
        lost_encoded = true;
      }
    } else if (!plain) {
      surviving_encoded.push_back(i);
    }
  }

  if (report.failed_paths.empty()) return report;
  if (missing_paths.empty()) {
    report.scenario = FailureScenario::ProtectionOnly;
    return report;
  }

  // The column position of each missing path inside an encoded slot's terms.
  auto coeff_for = [&](std::size_t enc_path, std::size_t plain_path) -> std::uint8_t {
    for (const auto& term : std::get<EncodedSlot>(sched.at(enc_path, round)).terms) {
      if (term.path == plain_path) return term.coeff.value;
    }
    return 0;
  };

  std::optional<std::vector<Bytes>> solution;
  const std::size_t unknowns = missing_paths.size();
  if (unknowns <= surviving_encoded.size()) {
    // Strip the known Plain contributions from every surviving Encoded slot.
    std::vector<Bytes> syndromes;
    for (auto e : surviving_encoded) {
      Bytes syn = usable[e]->payload;
      for (const auto& term : std::get<EncodedSlot>(sched.at(e, round)).terms) {
        if (usable[term.path] != nullptr) f.axpy(syn, term.coeff.value, usable[term.path]->payload);
      }
      syndromes.push_back(std::move(syn));
    }

    if (unknowns == 1) {
      for (std::size_t s = 0; s < surviving_encoded.size() && !solution; ++s) {
        const std::uint8_t c = coeff_for(surviving_encoded[s], missing_paths[0]);
        if (c == 0) continue;
        Bytes x = syndromes[s];
        f.scale(x, f.inv_raw(c));
        solution = std::vector<Bytes>{std::move(x)};
      }
    } else if (unknowns == 2) {
      const auto e0 = surviving_encoded[0];
      const auto e1 = surviving_encoded[1];
      auto pair = solve_pair(f, coeff_for(e0, missing_paths[0]), coeff_for(e0, missing_paths[1]),
                             coeff_for(e1, missing_paths[0]), coeff_for(e1, missing_paths[1]), syndromes[0],
                             syndromes[1]);
      if (pair) solution = std::vector<Bytes>{std::move(pair->first), std::move(pair->second)};
    }
    if (!solution) {
      std::vector<std::uint8_t> coeffs;
      for (auto e : surviving_encoded) {
        for (auto mp : missing_paths) coeffs.push_back(coeff_for(e, mp));
      }
      solution = solve_linear(f, std::move(coeffs), surviving_encoded.size(), unknowns, syndromes);
    }
  }

  for (std::size_t u = 0; u < unknowns; ++u) {
    const auto ord = std::get<PlainSlot>(sched.at(missing_paths[u], round)).data_ordinal;
    if (solution) {
      report.recovered.emplace(ord, std::move((*solution)[u]));
    } else {
      report.lost.push_back(ord);
    }
  }
  if (!solution) {
    report.unrecoverable = true;
    report.scenario = FailureScenario::ExceedsBudget;
  } else {
    report.scenario = lost_encoded ? FailureScenario::OneWorkingOneProtection : FailureScenario::TwoWorking;
  }
  return report;
}

SessionOutput decode_session(const Schedule& sched, std::span<const RecoveryReport> reports,
                             const std::map<std::size_t, Bytes>& plain_stream) {
  SessionOutput out;
  out.payloads.resize(sched.payloads_per_cycle());
  for (const auto& [ord, payload] : plain_stream) {
    if (ord < out.payloads.size()) out.payloads[ord] = payload;
  }
  for (const auto& rep : reports) {
    for (const auto& [ord, payload] : rep.recovered) {
      if (ord < out.payloads.size() && !out.payloads[ord]) out.payloads[ord] = payload;
    }
  }
  for (std::size_t ord = 0; ord < out.payloads.size(); ++ord) {
    if (!out.payloads[ord]) out.lost_ordinals.push_back(ord);
  }
  return out;
}

}  // namespace smate
