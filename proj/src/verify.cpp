#include "smate/verify.hpp"

#include <algorithm>
#include <map>

#include "smate/codec.hpp"
#include "smate/rng.hpp"

namespace smate {

namespace {

// Encodes random payloads for `round`, withholds `failed`, and checks that
// recovery returns every Plain payload of the round.
bool pattern_recovers(const Schedule& sched, std::size_t round, const std::vector<std::size_t>& failed,
                      std::size_t payload_size, Rng& rng) {
  std::map<std::size_t, Bytes> payloads;
  for (auto ord : sched.round_ordinals(round)) {
    Bytes b(payload_size);
    rng.fill(b);
    payloads.emplace(ord, std::move(b));
  }
  const auto packets = encode_round(sched, round, payloads);
  RoundBuffer buf(0, static_cast<std::uint16_t>(round), sched.k());
  for (std::size_t i = 0; i < sched.k(); ++i) {
    if (std::find(failed.begin(), failed.end(), i) == failed.end()) buf.ingest(i, packets[i]);
  }
  buf.close();
  const auto report = recover_round(sched, buf);
  if (report.unrecoverable) return false;
  auto got = received_plain(sched, buf);
  for (const auto& [ord, p] : report.recovered) got.emplace(ord, p);
  return got == payloads;
}

void for_each_subset(std::size_t n, std::size_t size, std::vector<std::size_t>& cur, std::size_t from,
                     const auto& fn) {
  if (cur.size() == size) {
    fn(cur);
    return;
  }
  for (std::size_t i = from; i < n; ++i) {
    cur.push_back(i);
    for_each_subset(n, size, cur, i + 1, fn);
    cur.pop_back();
  }
}

SweepResult subset_sweep(const Schedule& sched, std::size_t size, std::size_t payload_size, std::uint64_t seed) {
  SweepResult res;
  Rng rng(seed);
  std::vector<std::size_t> cur;
  for (std::size_t r = 0; r < sched.m(); ++r) {
    for_each_subset(sched.k(), size, cur, 0, [&](const std::vector<std::size_t>& failed) {
      ++res.total;
      if (pattern_recovers(sched, r, failed, payload_size, rng)) ++res.passed;
    });
  }
  return res;
}

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string fraction(const SweepResult& s) { return std::to_string(s.passed) + "/" + std::to_string(s.total); }

}  // namespace

SweepResult single_failure_sweep(const Schedule& sched, std::size_t payload_size, std::uint64_t seed) {
  return subset_sweep(sched, 1, payload_size, seed);
}

SweepResult pair_failure_sweep(const Schedule& sched, std::size_t payload_size, std::uint64_t seed) {
  return subset_sweep(sched, 2, payload_size, seed);
}

SweepResult t_failure_sweep(const Schedule& sched, std::size_t payload_size, std::uint64_t seed) {
  return subset_sweep(sched, sched.t(), payload_size, seed);
}

SweepResult coefficient_minor_check(const Schedule& sched) {
  SweepResult res;
  const auto& f = sched.field();
  const auto enc = sched.encoded_paths(0);
  if (enc.size() != 2) return res;
  const auto& row0 = std::get<EncodedSlot>(sched.at(enc[0], 0)).terms;
  const auto& row1 = std::get<EncodedSlot>(sched.at(enc[1], 0)).terms;
  for (std::size_t a = 0; a < row0.size(); ++a) {
    for (std::size_t b = a + 1; b < row0.size(); ++b) {
      ++res.total;
      const std::uint8_t det =
          f.mul_raw(row0[a].coeff.value, row1[b].coeff.value) ^ f.mul_raw(row0[b].coeff.value, row1[a].coeff.value);
      if (det != 0) ++res.passed;
    }
  }
  return res;
}

SweepResult column_budget_check(const Schedule& sched) {
  SweepResult res;
  for (std::size_t r = 0; r < sched.m(); ++r) {
    ++res.total;
    if (sched.encoded_paths(r).size() == sched.t()) ++res.passed;
  }
  return res;
}

VerifyOutcome verify_scheme(const Scenario& sc) {
  const Schedule sched = build_schedule(sc);
  VerifyOutcome out;
  const std::size_t cap = capacity(sched);
  const bool cap_ok = cap == sched.k() - sched.t() && sched.round_ordinals(0).size() == cap;
  const std::string cap_part = "capacity " + std::to_string(cap) + " " + verdict(cap_ok);
  out.pass = cap_ok;

  switch (sched.scheme()) {
    case SchemeKind::Single: {
      const auto sweep = single_failure_sweep(sched, sc.payload_size, sc.seed);
      out.pass = out.pass && sweep.ok();
      out.lines.push_back("Lemma2: " + cap_part + "; single-failure sweep " + fraction(sweep) + " " +
                          verdict(sweep.ok()));
      break;
    }
    case SchemeKind::Dual: {
      const auto sweep = pair_failure_sweep(sched, sc.payload_size, sc.seed);
      const auto minors = coefficient_minor_check(sched);
      out.pass = out.pass && sweep.ok() && minors.ok();
      out.lines.push_back("Lemma3: " + cap_part + "; two-failure sweep " + fraction(sweep) + " " +
                          verdict(sweep.ok()) + "; coefficient minors " + fraction(minors) + " " +
                          verdict(minors.ok()));
      break;
    }
    case SchemeKind::Priority: {
      const auto columns = column_budget_check(sched);
      const auto sweep = t_failure_sweep(sched, sc.payload_size, sc.seed);
      out.pass = out.pass && columns.ok() && sweep.ok();
      out.lines.push_back("Lemma4: " + cap_part + "; column budget " + fraction(columns) + " " +
                          verdict(columns.ok()) + "; t-failure sweep " + fraction(sweep) + " " + verdict(sweep.ok()));
      break;
    }
  }
  return out;
}

}  // namespace smate
