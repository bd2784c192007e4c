#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "oracles/brute_decoder.hpp"
#include "oracles/gf_oracle.hpp"
#include "smate/codec.hpp"
#include "smate/errors.hpp"

using namespace smate;

namespace {

std::map<std::size_t, Bytes> payloads_for(const Schedule& s, std::size_t round, std::mt19937& rng,
                                          std::size_t len = 4) {
  std::map<std::size_t, Bytes> out;
  for (auto ord : s.round_ordinals(round)) {
    Bytes b(len);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    out[ord] = b;
  }
  return out;
}

RoundBuffer deliver(const Schedule& s, std::size_t round, const std::vector<Packet>& pkts,
                    const std::set<std::size_t>& failed) {
  RoundBuffer buf(0, static_cast<std::uint16_t>(round), s.k());
  for (std::size_t i = 0; i < s.k(); ++i) {
    if (!failed.count(i)) buf.ingest(i, pkts[i]);
  }
  buf.close();
  return buf;
}

// Checks that every ordinal of the round is either received or recovered
// with the original bytes.
bool fully_restored(const Schedule& s, std::size_t round, const std::map<std::size_t, Bytes>& truth,
                    const RoundBuffer& buf, const RecoveryReport& rep) {
  if (rep.unrecoverable || !rep.lost.empty()) return false;
  auto got = received_plain(s, buf);
  for (const auto& [ord, b] : rep.recovered) got[ord] = b;
  return got == truth;
}

}  // namespace

TEST_CASE("encode: xor of two payloads") {
  const auto s = single_protection(3, 1);
  // round 0 encodes on path 0, paths 1 and 2 carry ordinals 0 and 1
  const auto pkts = encode_round(s, 0, {{0, {0x0A}}, {1, {0x05}}});
  REQUIRE(pkts.size() == 3);
  CHECK(pkts[0].kind == PayloadKind::Encoded);
  CHECK(pkts[0].payload == Bytes{0x0F});
  CHECK(pkts[1].payload == Bytes{0x0A});
  CHECK(pkts[2].payload == Bytes{0x05});
}

TEST_CASE("encode: single k=5 round 0") {
  const auto s = single_protection(5, 5);
  std::mt19937 rng(3);
  const auto pl = payloads_for(s, 0, rng);
  const auto pkts = encode_round(s, 0, pl, {7, 9});
  Bytes y(4, 0);
  for (const auto& [ord, b] : pl) {
    for (std::size_t j = 0; j < 4; ++j) y[j] ^= b[j];
  }
  CHECK(pkts[0].payload == y);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(pkts[i].sender_id == 7);
    CHECK(pkts[i].session == 9);
    CHECK(pkts[i].path_index == i);
    CHECK(pkts[i].round == 0);
  }
}

TEST_CASE("encode: dual n=4 rows") {
  const auto s = dual_protection(4, 1);
  const auto pkts = encode_round(s, 0, {{0, {0x05}}, {1, {0x0A}}});
  CHECK(pkts[2].payload == Bytes{0x0F});
  CHECK(pkts[3].payload == Bytes{0x11});  // 0x05 ^ 2*0x0A
  CHECK(oracle::gf_mul(0x02, 0x0A, 0x11D) == 0x14);
}

TEST_CASE("encode: rejects mismatched inputs") {
  const auto s = single_protection(3, 2);
  CHECK_THROWS_AS(encode_round(s, 0, {{0, {1}}}), UsageError);
  CHECK_THROWS_AS(encode_round(s, 0, {{0, {1}}, {1, {2}}, {2, {3}}}), UsageError);
  CHECK_THROWS_AS(encode_round(s, 0, {{0, {1}}, {5, {2}}}), UsageError);
  CHECK_THROWS_AS(encode_round(s, 0, {{0, {1}}, {1, {2, 3}}}), UsageError);
  CHECK_THROWS_AS(encode_round(s, 9, {{0, {1}}, {1, {2}}}), std::exception);
  // zero-length payloads are fine as long as they agree
  const auto pkts = encode_round(s, 0, {{0, {}}, {1, {}}});
  CHECK(pkts[0].payload.empty());
}

TEST_CASE("round buffer ingest rules") {
  const auto s = single_protection(3, 3);
  const auto pkts = encode_round(s, 1, {{2, {1}}, {3, {2}}});
  RoundBuffer buf(0, 1, 3);
  buf.ingest(0, pkts[0]);
  CHECK(buf.packet(0) != nullptr);
  buf.ingest(0, pkts[0]);
  CHECK(buf.failed(0));
  CHECK(std::get<RoundBuffer::Failed>(buf.entry(0)).reason == PathFault::Duplicate);
  buf.ingest(1, WireFault::Integrity);
  CHECK(std::get<RoundBuffer::Failed>(buf.entry(1)).reason == PathFault::Integrity);
  buf.ingest(2, pkts[1]);  // path 1's packet arriving on path 2
  CHECK(std::get<RoundBuffer::Failed>(buf.entry(2)).reason == PathFault::Misrouted);

  RoundBuffer other(0, 0, 3);
  CHECK_THROWS_AS(other.ingest(0, pkts[0]), UsageError);
  RoundBuffer wrong_session(5, 1, 3);
  CHECK_THROWS_AS(wrong_session.ingest(0, pkts[0]), UsageError);

  RoundBuffer open(0, 1, 3);
  CHECK_THROWS_AS(recover_round(s, open), UsageError);
  open.close();
  CHECK(open.deadline_reached());
  CHECK(std::get<RoundBuffer::Failed>(open.entry(1)).reason == PathFault::Absent);
}

TEST_CASE("recover: single k=5 with path 2 lost") {
  const auto s = single_protection(5, 5);
  std::mt19937 rng(11);
  const auto pl = payloads_for(s, 0, rng);
  const auto pkts = encode_round(s, 0, pl);
  const auto buf = deliver(s, 0, pkts, {2});
  const auto rep = recover_round(s, buf);
  CHECK(rep.scenario == FailureScenario::TwoWorking);
  CHECK(rep.failed_paths == std::set<std::size_t>{2});
  const auto ord = std::get<PlainSlot>(s.at(2, 0)).data_ordinal;
  REQUIRE(rep.recovered.count(ord));
  // rebuilt value is y xor the other three
  Bytes expect = pkts[0].payload;
  for (std::size_t i : {1, 3, 4}) {
    for (std::size_t j = 0; j < expect.size(); ++j) expect[j] ^= pkts[i].payload[j];
  }
  CHECK(rep.recovered.at(ord) == expect);
  CHECK(rep.recovered.at(ord) == pl.at(ord));
}

TEST_CASE("solve_pair: worked example") {
  const Field f = default_field();
  const std::uint8_t a = 0x02;
  const std::uint8_t a3 = oracle::gf_pow(a, 3, 0x11D);
  const Bytes s0{0x0F};
  const Bytes s1{0x5A};
  const auto sol = solve_pair(f, 1, 1, a, a3, s0, s1);
  REQUIRE(sol);
  CHECK(sol->first == Bytes{0x05});
  CHECK(sol->second == Bytes{0x0A});
  // only one pair out of all 65536 satisfies both equations
  int hits = 0;
  for (int x = 0; x < 256; ++x) {
    for (int y = 0; y < 256; ++y) {
      if ((x ^ y) == 0x0F && (oracle::gf_mul(a, x, 0x11D) ^ oracle::gf_mul(a3, y, 0x11D)) == 0x5A) ++hits;
    }
  }
  CHECK(hits == 1);
  CHECK_FALSE(solve_pair(f, 1, 1, 1, 1, s0, s1));
}

TEST_CASE("recover: dual n=6 working paths 1 and 3 lost") {
  const auto s = dual_protection(6, 1, std::pair<std::size_t, std::size_t>{4, 5});
  std::map<std::size_t, Bytes> pl{{0, {0x33}}, {1, {0x05}}, {2, {0x77}}, {3, {0x0A}}};
  const auto pkts = encode_round(s, 0, pl);
  const auto buf = deliver(s, 0, pkts, {1, 3});
  const auto rep = recover_round(s, buf);
  CHECK(rep.scenario == FailureScenario::TwoWorking);
  CHECK(rep.recovered.at(1) == Bytes{0x05});
  CHECK(rep.recovered.at(3) == Bytes{0x0A});
}

TEST_CASE("recover: failure classes for dual") {
  const auto s = dual_protection(5, 3);
  std::mt19937 rng(5);
  const auto pl = payloads_for(s, 1, rng);
  const auto pkts = encode_round(s, 1, pl);

  auto rep = recover_round(s, deliver(s, 1, pkts, {}));
  CHECK(rep.scenario == FailureScenario::NoFailure);
  CHECK(rep.recovered.empty());

  rep = recover_round(s, deliver(s, 1, pkts, {3, 4}));
  CHECK(rep.scenario == FailureScenario::ProtectionOnly);
  CHECK_FALSE(rep.unrecoverable);

  for (std::size_t prot : {3, 4}) {
    for (std::size_t w = 0; w < 3; ++w) {
      const auto buf = deliver(s, 1, pkts, {w, prot});
      rep = recover_round(s, buf);
      CHECK(rep.scenario == FailureScenario::OneWorkingOneProtection);
      CHECK(fully_restored(s, 1, pl, buf, rep));
    }
  }

  const auto buf = deliver(s, 1, pkts, {0, 1, 2});
  rep = recover_round(s, buf);
  CHECK(rep.scenario == FailureScenario::ExceedsBudget);
  CHECK(rep.unrecoverable);
  CHECK(rep.recovered.empty());
  CHECK(rep.lost.size() == 3);
}

TEST_CASE("recover: single scheme every round, every path, k <= 16") {
  std::mt19937 rng(17);
  for (std::size_t k = 2; k <= 16; ++k) {
    const auto s = single_protection(k, k);
    for (std::size_t r = 0; r < k; ++r) {
      const auto pl = payloads_for(s, r, rng, 3);
      const auto pkts = encode_round(s, r, pl);
      for (std::size_t f = 0; f < k; ++f) {
        const auto buf = deliver(s, r, pkts, {f});
        const auto rep = recover_round(s, buf);
        REQUIRE(fully_restored(s, r, pl, buf, rep));
        CHECK(rep.scenario == (s.is_plain(f, r) ? FailureScenario::TwoWorking : FailureScenario::ProtectionOnly));
      }
      // two losses are beyond a single protection slot
      if (k >= 3) {
        const auto rep = recover_round(s, deliver(s, r, pkts, {0, 1}));
        CHECK(rep.unrecoverable);
      }
    }
  }
}

TEST_CASE("recover: dual scheme every pair, n <= 16") {
  std::mt19937 rng(23);
  for (std::size_t n = 3; n <= 16; ++n) {
    const auto s = dual_protection(n, 1);
    const auto pl = payloads_for(s, 0, rng, 2);
    const auto pkts = encode_round(s, 0, pl);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const auto buf = deliver(s, 0, pkts, {a, b});
        const auto rep = recover_round(s, buf);
        REQUIRE(fully_restored(s, 0, pl, buf, rep));
      }
    }
  }
}

TEST_CASE("recover: priority schedules tolerate any t losses for t <= 3") {
  std::mt19937 rng(29);
  const std::vector<std::pair<PriorityPlan, std::size_t>> cases{
      {PriorityPlan::from_protection_counts({1, 1, 1, 1}, 4), 1},
      {PriorityPlan::from_protection_counts({2, 2, 1, 1, 2}, 4), 2},
      {PriorityPlan::from_protection_counts({3, 1, 2, 2, 1, 3}, 6), 2},
      {PriorityPlan::from_protection_counts({3, 3, 3, 3, 3, 3}, 6), 3},
      {PriorityPlan::from_protection_counts({4, 4, 2, 2, 2, 1, 3}, 6), 3},
  };
  for (const auto& [plan, t] : cases) {
    const auto s = priority_schedule(plan, t);
    const std::size_t k = s.k();
    for (std::size_t r = 0; r < s.m(); ++r) {
      const auto pl = payloads_for(s, r, rng, 2);
      const auto pkts = encode_round(s, r, pl);
      for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
        std::set<std::size_t> failed;
        for (std::size_t i = 0; i < k; ++i) {
          if (mask & (1U << i)) failed.insert(i);
        }
        const auto buf = deliver(s, r, pkts, failed);
        const auto rep = recover_round(s, buf);
        if (failed.size() <= t) {
          REQUIRE(fully_restored(s, r, pl, buf, rep));
        } else {
          // whatever comes back must be correct
          for (const auto& [ord, b] : rep.recovered) CHECK(b == pl.at(ord));
        }
      }
    }
  }
}

TEST_CASE("recover: priority t=4 never returns wrong bytes") {
  std::mt19937 rng(31);
  const auto s = priority_schedule(PriorityPlan::from_protection_counts({4, 4, 4, 4, 4, 4}, 6), 4);
  for (std::size_t r = 0; r < s.m(); ++r) {
    const auto pl = payloads_for(s, r, rng, 2);
    const auto pkts = encode_round(s, r, pl);
    for (std::uint32_t mask = 0; mask < 64; ++mask) {
      std::set<std::size_t> failed;
      for (std::size_t i = 0; i < 6; ++i) {
        if (mask & (1U << i)) failed.insert(i);
      }
      const auto buf = deliver(s, r, pkts, failed);
      const auto rep = recover_round(s, buf);
      if (!rep.unrecoverable) CHECK(fully_restored(s, r, pl, buf, rep));
    }
  }
}

TEST_CASE("recover: brute-force oracle agrees on small schedules") {
  const std::vector<std::uint8_t> alphabet{0, 1, 2, 3};
  std::vector<Schedule> scheds{single_protection(3, 3), single_protection(4, 2), dual_protection(4, 1),
                               dual_protection(5, 1),
                               priority_schedule(PriorityPlan::from_protection_counts({2, 2, 1, 1}, 3), 2)};
  for (const auto& s : scheds) {
    const auto st = oracle::equivalence_sweep(s, alphabet, 64);
    CHECK(st.disagreements == 0);
    CHECK(st.recovered > 0);
    CHECK(st.unrecoverable > 0);
  }
}

TEST_CASE("recover: deterministic") {
  const auto s = dual_protection(7, 2);
  std::mt19937 rng(41);
  const auto pl = payloads_for(s, 1, rng);
  const auto pkts = encode_round(s, 1, pl);
  const auto a = recover_round(s, deliver(s, 1, pkts, {0, 4}));
  const auto b = recover_round(s, deliver(s, 1, pkts, {0, 4}));
  CHECK(a == b);
}

TEST_CASE("recover: unusable packets count as failures") {
  const auto s = single_protection(3, 1);
  auto pkts = encode_round(s, 0, {{0, {1, 2}}, {1, {3, 4}}});
  pkts[2].payload.push_back(9);  // wrong length
  const auto rep = recover_round(s, deliver(s, 0, pkts, {}));
  CHECK(rep.failed_paths == std::set<std::size_t>{2});
  CHECK(rep.recovered.at(1) == Bytes{3, 4});
}

TEST_CASE("solve_linear: rank check") {
  const Field f = default_field();
  // 3x3 Vandermonde on 1, 2, 4
  std::vector<std::uint8_t> c;
  const std::uint8_t xs[3] = {1, 2, 4};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) c.push_back(oracle::gf_pow(xs[j], i, 0x11D));
  }
  const std::uint8_t truth[3] = {9, 200, 77};
  std::vector<Bytes> rhs;
  for (int i = 0; i < 3; ++i) {
    std::uint8_t acc = 0;
    for (int j = 0; j < 3; ++j) acc ^= oracle::gf_mul(c[i * 3 + j], truth[j], 0x11D);
    rhs.push_back({acc});
  }
  const auto sol = solve_linear(f, c, 3, 3, rhs);
  REQUIRE(sol);
  for (int j = 0; j < 3; ++j) CHECK((*sol)[j] == Bytes{truth[j]});

  std::vector<std::uint8_t> singular{1, 1, 2, 2};
  CHECK_FALSE(solve_linear(f, singular, 2, 2, {{1}, {2}}));
  CHECK_FALSE(solve_linear(f, {1, 1}, 1, 2, {{1}}));
}

TEST_CASE("decode_session: ordering and loss accounting") {
  const auto s = single_protection(4, 4);
  std::mt19937 rng(43);
  std::map<std::size_t, Bytes> stream;
  std::vector<RecoveryReport> reports;
  std::map<std::size_t, Bytes> truth;
  for (std::size_t r = 0; r < 4; ++r) {
    const auto pl = payloads_for(s, r, rng);
    truth.insert(pl.begin(), pl.end());
    const auto pkts = encode_round(s, r, pl);
    const std::set<std::size_t> failed = r == 2 ? std::set<std::size_t>{0, 1} : std::set<std::size_t>{3};
    const auto buf = deliver(s, r, pkts, failed);
    for (const auto& [ord, b] : received_plain(s, buf)) stream[ord] = b;
    reports.push_back(recover_round(s, buf));
  }
  const auto out = decode_session(s, reports, stream);
  REQUIRE(out.payloads.size() == s.payloads_per_cycle());
  std::vector<std::size_t> expect_lost = reports[2].lost;
  std::sort(expect_lost.begin(), expect_lost.end());
  CHECK(out.lost_ordinals == expect_lost);
  CHECK(expect_lost.size() == 2);
  for (std::size_t ord = 0; ord < out.payloads.size(); ++ord) {
    const bool lost = std::find(expect_lost.begin(), expect_lost.end(), ord) != expect_lost.end();
    CHECK(out.payloads[ord].has_value() == !lost);
    if (!lost) CHECK(*out.payloads[ord] == truth.at(ord));
  }
}
