#include "smate/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "smate/balancer.hpp"
#include "smate/errors.hpp"
#include "smate/rng.hpp"

namespace smate {

double DelayFn::queueing_delay(double lambda) const {
  switch (kind) {
    case Kind::Linear: return slope * lambda;
    case Kind::MM1:
      if (lambda >= service_rate) return std::numeric_limits<double>::infinity();
      return 1.0 / (service_rate - lambda);
  }
  return 0.0;
}

const char* to_string(AdversaryMode mode) {
  switch (mode) {
    case AdversaryMode::None: return "none";
    case AdversaryMode::SingleLink: return "single";
    case AdversaryMode::TwoLink: return "two";
    case AdversaryMode::Tamper: return "tamper";
    case AdversaryMode::Eavesdrop: return "eavesdrop";
  }
  return "unknown";
}

const char* to_string(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::Deliver: return "deliver";
    case SimEventKind::Drop: return "drop";
    case SimEventKind::RoundClose: return "round_close";
    case SimEventKind::Send: return "send";
  }
  return "unknown";
}

bool Adversary::targets(std::size_t path) const {
  return std::find(paths.begin(), paths.end(), path) != paths.end();
}

namespace {

std::string str(std::size_t v) { return std::to_string(v); }

}  // namespace

void validate_scenario(Scenario& sc) {
  // Scheme feasibility first, so that e.g. an oversized dual scheme reports
  // the field bound rather than the wire-format limit.
  const Schedule sched = [&] {
    try {
      return build_schedule(sc);
    } catch (const FieldTooSmallError& e) {
      throw ValidationError("k", e.what());
    } catch (const InfeasibleError& e) {
      throw ValidationError(sc.scheme.kind == SchemeKind::Priority && sc.k >= 2 ? "protection_counts" : "k", e.what());
    } catch (const UsageError& e) {
      throw ValidationError("protection_paths", e.what());
    }
  }();

  if (sc.k > 255) throw ValidationError("k", "k = " + str(sc.k) + " exceeds the 8-bit path index");
  if (sc.m < 1) throw ValidationError("m", "m must be at least 1");
  if (sc.m > 0xFFFF) throw ValidationError("m", "m exceeds the 16-bit round field");
  if (sc.cycles < 1) throw ValidationError("cycles", "cycles must be at least 1");
  if (sc.cycles > 0x10000) throw ValidationError("cycles", "cycles exceed the 16-bit session field");
  if (sc.payload_size < 1 || sc.payload_size > 0xFFFF) throw ValidationError("payload_size", "payload_size must be in [1, 65535]");
  if (!(sc.round_interval > 0.0)) throw ValidationError("round_interval", "round_interval must be positive");
  if (!(sc.deadline_factor > 0.0)) throw ValidationError("deadline_factor", "deadline_factor must be positive");

  if (sc.paths.empty()) sc.paths.assign(sc.k, PathModel{});
  if (sc.paths.size() != sc.k) throw ValidationError("paths", "expected " + str(sc.k) + " path models");
  for (std::size_t i = 0; i < sc.k; ++i) {
    const auto& p = sc.paths[i];
    if (!(p.base_delay >= 0.0)) throw ValidationError("paths", "path " + str(i) + ": base_delay must be >= 0");
    if (!(p.rate_capacity > 0.0)) throw ValidationError("paths", "path " + str(i) + ": rate_capacity must be > 0");
    if (!(p.jitter >= 0.0)) throw ValidationError("paths", "path " + str(i) + ": jitter must be >= 0");
    if (p.delay.kind == DelayFn::Kind::MM1 && !(p.delay.service_rate > 0.0)) {
      throw ValidationError("paths", "path " + str(i) + ": mm1 service_rate must be > 0");
    }
  }

  const auto& adv = sc.adversary;
  for (auto p : adv.paths) {
    if (p >= sc.k) throw ValidationError("adversary.paths", "adversary path " + str(p) + " out of range for k = " + str(sc.k));
  }
  const std::size_t want = [&]() -> std::size_t {
    switch (adv.mode) {
      case AdversaryMode::None: return 0;
      case AdversaryMode::TwoLink: return 2;
      default: return 1;
    }
  }();
  if (adv.paths.size() != want) {
    throw ValidationError("adversary.paths", std::string("adversary mode ") + to_string(adv.mode) + " needs " + str(want) + " path(s)");
  }
  if (adv.mode == AdversaryMode::TwoLink && adv.paths[0] == adv.paths[1]) {
    throw ValidationError("adversary.paths", "two-link adversary paths must be distinct");
  }
  if (adv.start_round > adv.end_round) throw ValidationError("adversary.end_round", "adversary window is empty");

  if (sc.balancer.enabled && !(sc.balancer.gamma > 0.0)) throw ValidationError("balancer.gamma", "balancer gamma must be positive");
  if (!(sc.balancer.probe > 0.0)) throw ValidationError("balancer.probe", "balancer probe must be positive");

  const std::size_t capacity_bytes = sc.cycles * sched.payloads_per_cycle() * sc.payload_size;
  if (sc.message_bytes && *sc.message_bytes > capacity_bytes) {
    throw ValidationError("message_bytes", "message_bytes exceeds the " + str(capacity_bytes) + " bytes the run can carry");
  }
}

Schedule build_schedule(const Scenario& sc) {
  switch (sc.scheme.kind) {
    case SchemeKind::Single: return single_protection(sc.k, sc.m);
    case SchemeKind::Dual: return dual_protection(sc.k, sc.m, sc.scheme.protection_paths);
    case SchemeKind::Priority: {
      if (sc.scheme.priority_p.size() != sc.k) {
        throw InfeasibleError("invalid plan: expected " + str(sc.k) + " protection counts, got " +
                              str(sc.scheme.priority_p.size()));
      }
      return priority_schedule(PriorityPlan::from_protection_counts(sc.scheme.priority_p, sc.m), sc.scheme.t);
    }
  }
  throw UsageError("unknown scheme");
}

double TraceSummary::effective_capacity() const {
  if (goodput.empty()) return 0.0;
  std::size_t total = 0;
  for (auto g : goodput) total += g;
  return static_cast<double>(total) / static_cast<double>(goodput.size());
}

namespace {

struct QueuedEvent {
  double time;
  SimEventKind kind;
  std::size_t path;
  std::uint64_t round;
  std::uint64_t seq;
  Bytes frame;
};

struct Later {
  bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    if (a.path != b.path) return a.path > b.path;
    return a.seq > b.seq;
  }
};

std::uint64_t nonce_for(std::uint64_t session, std::uint64_t round) { return (session << 32) | round; }

}  // namespace

TraceSummary run(Scenario sc) {
  validate_scenario(sc);
  const Schedule sched = build_schedule(sc);
  const std::size_t k = sc.k;
  const std::size_t m = sc.m;
  const std::size_t per_cycle = sched.payloads_per_cycle();
  const std::uint64_t total_rounds = static_cast<std::uint64_t>(sc.cycles) * m;

  TraceSummary out;
  out.scheme = sched.scheme();
  out.k = k;
  out.m = m;
  out.t = sched.t();
  out.cycles = sc.cycles;
  out.payload_size = sc.payload_size;
  out.seed = sc.seed;
  out.adversary = sc.adversary.mode;
  out.paths.assign(k, PathCounters{});
  out.goodput.assign(total_rounds, 0);

  // Independent random streams.
  std::vector<Rng> path_rng;
  for (std::size_t i = 0; i < k; ++i) path_rng.push_back(Rng::stream(sc.seed, "path", i));
  Rng adversary_rng = Rng::stream(sc.adversary.rng_seed ^ sc.seed, "adversary");
  Rng source_rng = Rng::stream(sc.seed, "source");
  Rng key_rng = Rng::stream(sc.seed, "keys");
  Rng flow_rng = Rng::stream(sc.seed, "flows");

  std::vector<Bytes> keys(k, Bytes(16));
  for (auto& key : keys) key_rng.fill(key);
  const KeyRing ring(keys);

  const std::size_t capacity_bytes = sc.cycles * per_cycle * sc.payload_size;
  out.source_message.resize(sc.message_bytes.value_or(capacity_bytes));
  source_rng.fill(out.source_message);
  std::vector<Bytes> chunks = chunk(out.source_message, Chunker(sc.payload_size));
  chunks.resize(sc.cycles * per_cycle, Bytes(sc.payload_size, 0x00));

  // Where each local ordinal travels within a cycle.
  std::vector<std::pair<std::size_t, std::size_t>> slot_of(per_cycle);
  for (std::size_t r = 0; r < m; ++r) {
    for (auto i : sched.plain_paths(r)) slot_of[std::get<PlainSlot>(sched.at(i, r)).data_ordinal] = {i, r};
  }

  double max_base = 0.0;
  for (const auto& p : sc.paths) max_base = std::max(max_base, p.base_delay);
  const double deadline = sc.deadline_factor * (max_base > 0.0 ? max_base : sc.round_interval);

  const double offered_total =
      sc.balancer.offered_rate > 0.0 ? sc.balancer.offered_rate : static_cast<double>(k) / sc.round_interval;
  PathLoad load = PathLoad::uniform(k);
  FlowTable flows;

  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, Later> queue;
  std::uint64_t seq = 0;
  auto push = [&](double time, SimEventKind kind, std::size_t path, std::uint64_t round, Bytes frame = {}) {
    queue.push(QueuedEvent{time, kind, path, round, seq++, std::move(frame)});
  };
  for (std::uint64_t g = 0; g < total_rounds; ++g) {
    const double t0 = static_cast<double>(g) * sc.round_interval;
    for (std::size_t i = 0; i < k; ++i) push(t0, SimEventKind::Send, i, g);
    push(t0 + deadline, SimEventKind::RoundClose, 0, g);
  }

  std::vector<std::optional<std::vector<Packet>>> outgoing(total_rounds);
  std::vector<std::optional<RoundBuffer>> buffers(total_rounds);
  std::vector<bool> closed(total_rounds, false);
  std::vector<RecoveryReport> cycle_reports;
  std::map<std::size_t, Bytes> cycle_plain;
  std::vector<std::optional<Bytes>> delivered(chunks.size());
  Eigen::VectorXd current_rates = load.rates;

  auto prepare_round = [&](std::uint64_t g) {
    const std::uint64_t cycle = g / m;
    const std::size_t r = static_cast<std::size_t>(g % m);
    if (sc.balancer.enabled) {
      std::vector<std::vector<DelaySample>> samples(k);
      for (std::size_t i = 0; i < k; ++i) {
        const double ri = load.rates[static_cast<Eigen::Index>(i)];
        const double rp = ri + sc.balancer.probe;
        samples[i].push_back({ri, sc.paths[i].total_delay(ri * offered_total)});
        samples[i].push_back({rp, sc.paths[i].total_delay(rp * offered_total)});
      }
      load.congestion = monitor(samples, load.congestion);
      out.balancer.push_back({g, load.rates, load.congestion, congestion_gap(load)});
      current_rates = load.rates;
      for (std::size_t f = 0; f < sc.balancer.flows_per_round; ++f) {
        const std::uint64_t a = flow_rng.next();
        const std::uint64_t b = flow_rng.next();
        const FlowKey key{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint16_t>(b), static_cast<std::uint16_t>(b >> 16),
                          static_cast<std::uint8_t>((b >> 32) & 1U ? 17 : 6)};
        out.paths[flows.place(key, load.rates)].flows++;
      }
      load = balance_step(load, sc.balancer.gamma);
    }

    std::map<std::size_t, Bytes> payloads;
    for (auto i : sched.plain_paths(r)) {
      const auto ord = std::get<PlainSlot>(sched.at(i, r)).data_ordinal;
      payloads.emplace(ord, encrypt(ring.key(i), chunks[cycle * per_cycle + ord], nonce_for(cycle, r)));
    }
    outgoing[g] = encode_round(sched, r, payloads,
                               PacketHeader{sc.sender_id, static_cast<std::uint16_t>(cycle)});
    buffers[g].emplace(static_cast<std::uint16_t>(cycle), static_cast<std::uint16_t>(r), k);
  };

  while (!queue.empty()) {
    QueuedEvent ev = queue.top();
    queue.pop();
    out.events.push_back({ev.time, ev.kind, ev.path, ev.round});
    const std::uint64_t g = ev.round;

    switch (ev.kind) {
      case SimEventKind::Send: {
        if (!outgoing[g]) prepare_round(g);
        Bytes frame = encode_wire((*outgoing[g])[ev.path]);
        auto& counters = out.paths[ev.path];
        counters.sent++;

        const auto& adv = sc.adversary;
        const bool hit = adv.active(g) && adv.targets(ev.path);
        if (hit && (adv.mode == AdversaryMode::SingleLink || adv.mode == AdversaryMode::TwoLink)) {
          push(ev.time, SimEventKind::Drop, ev.path, g);
          break;
        }
        if (hit && adv.mode == AdversaryMode::Tamper) {
          const std::uint64_t bits = frame.size() * 8;
          const std::uint64_t bit = adv.tamper_bit ? *adv.tamper_bit % bits : adversary_rng.below(bits);
          frame[bit / 8] ^= static_cast<std::uint8_t>(0x80U >> (bit % 8));
        }
        if (hit && adv.mode == AdversaryMode::Eavesdrop) out.observer_log.push_back(frame);

        const auto& model = sc.paths[ev.path];
        const double lambda = current_rates[static_cast<Eigen::Index>(ev.path)] * offered_total;
        const double delay = model.total_delay(lambda);
        if (lambda >= model.rate_capacity || !std::isfinite(delay)) {
          push(ev.time, SimEventKind::Drop, ev.path, g);
          break;
        }
        const double jitter = model.jitter > 0.0 ? model.jitter * path_rng[ev.path].uniform() : 0.0;
        push(ev.time + delay + jitter, SimEventKind::Deliver, ev.path, g, std::move(frame));
        break;
      }
      case SimEventKind::Drop:
        out.paths[ev.path].dropped++;
        break;
      case SimEventKind::Deliver: {
        out.paths[ev.path].delivered++;
        if (sc.capture_trace) out.trace_frames.push_back(ev.frame);
        if (closed[g]) {
          out.paths[ev.path].late++;
          break;
        }
        buffers[g]->ingest(ev.path, decode_wire(ev.frame));
        break;
      }
      case SimEventKind::RoundClose: {
        if (!outgoing[g]) prepare_round(g);
        auto& buf = *buffers[g];
        buf.close();
        closed[g] = true;
        RecoveryReport rep = recover_round(sched, buf);
        auto plain = received_plain(sched, buf);
        out.goodput[g] = plain.size() + rep.recovered.size();
        cycle_plain.merge(plain);
        cycle_reports.push_back(std::move(rep));

        if (g % m == m - 1) {
          const std::uint64_t cycle = g / m;
          const SessionOutput session = decode_session(sched, cycle_reports, cycle_plain);
          for (std::size_t ord = 0; ord < per_cycle; ++ord) {
            if (!session.payloads[ord]) continue;
            const auto [path, r] = slot_of[ord];
            delivered[cycle * per_cycle + ord] = decrypt(ring.key(path), *session.payloads[ord], nonce_for(cycle, r));
          }
          out.lost_payloads += session.lost_ordinals.size();
          for (auto& rp : cycle_reports) out.reports.push_back(std::move(rp));
          cycle_reports.clear();
          cycle_plain.clear();
        }
        buffers[g].reset();
        outgoing[g].reset();
        break;
      }
    }
  }

  std::vector<Bytes> received;
  received.reserve(delivered.size());
  bool complete = true;
  for (auto& d : delivered) {
    complete = complete && d.has_value();
    received.push_back(d.value_or(Bytes(sc.payload_size, 0x00)));
  }
  out.delivered_message = unchunk(received, out.source_message.size());
  out.stream_intact = complete && out.delivered_message == out.source_message;
  return out;
}

bool eavesdrop_check(const TraceSummary& trace) {
  if (trace.adversary != AdversaryMode::Eavesdrop) throw UsageError("eavesdrop_check needs an eavesdrop run");
  const auto plain_chunks = chunk(trace.source_message, Chunker(trace.payload_size));
  for (const auto& frame : trace.observer_log) {
    const auto decoded = decode_wire(frame);
    const auto* p = std::get_if<Packet>(&decoded);
    if (p == nullptr) continue;
    for (const auto& c : plain_chunks) {
      if (p->payload == c) return false;
    }
  }
  return true;
}

}  // namespace smate
