#include <doctest.h>

#include <map>
#include <set>

#include "rplsim/attack.hpp"
#include "rplsim/engine.hpp"

using namespace rplsim;

namespace {

Packet dio_from(NodeId src, std::uint32_t rank) {
  Packet p;
  p.kind = PacketKind::DIO;
  p.true_source = src;
  p.claimed_source = src;
  p.destination = kBroadcast;
  p.payload_rank = Rank{rank};
  p.size_bytes = kDioSizeBytes;
  return p;
}

}  // namespace

TEST_CASE("attacker stores only the first DIO heard after activation") {
  AttackerState st;
  st.listening = true;
  st.active_since_us = 90 * kUsPerSecond;

  // too early: ignored even with listening on
  CHECK_FALSE(attacker_on_dio(st, dio_from(2, 512), SimTime::from_seconds(50)));
  CHECK_FALSE(st.captured_dio.has_value());

  CHECK(attacker_on_dio(st, dio_from(2, 512), SimTime::from_seconds(91)));
  REQUIRE(st.captured_dio.has_value());
  CHECK(st.captured_dio->claimed_source == 2);

  // a later, better-ranked DIO does not replace the stored one
  CHECK_FALSE(attacker_on_dio(st, dio_from(7, 256), SimTime::from_seconds(92)));
  CHECK(st.captured_dio->claimed_source == 2);
  CHECK(st.captured_dio->payload_rank.value == 512);
}

TEST_CASE("replay frames carry the variant's source identity") {
  AttackerState st;
  st.listening = true;
  st.active_since_us = 0;
  attacker_on_dio(st, dio_from(2, 512), SimTime::from_seconds(1));

  st.variant = AttackVariant::NON_SPOOFED;
  Packet ns = attacker_replay_packet(st, 31);
  CHECK(ns.claimed_source == 31);
  CHECK(ns.true_source == 31);
  CHECK(ns.payload_rank.value == 512);
  CHECK(ns.destination == kBroadcast);

  st.variant = AttackVariant::SPOOFED;
  Packet sp = attacker_replay_packet(st, 31);
  CHECK(sp.claimed_source == 2);
  CHECK(sp.true_source == 31);
  CHECK(sp.payload_rank.value == 512);
}

TEST_CASE("replay schedule: exact gaps, exact count, silence before activation") {
  ScenarioConfig cfg;
  cfg.seed = 8;
  cfg.attack_variant = AttackVariant::NON_SPOOFED;
  cfg.replay_interval_s = 1.0;
  Trace tr = run(cfg);
  CHECK(tr.counters.attacker_tx_before_activation == 0);

  std::map<NodeId, std::vector<std::int64_t>> fires;
  std::map<NodeId, std::int64_t> capture_at;
  for (const auto& r : tr.records) {
    if (r.kind == Rec::ReplayFire) fires[r.a].push_back(r.t_us);
    if (r.kind == Rec::AttackerCapture) capture_at[r.a] = r.t_us;
    if (r.kind == Rec::ReplayTx) CHECK(r.t_us >= cfg.activation_us());
    if (r.kind == Rec::RadioTx) {
      // attackers transmit nothing before activation
      if (tr.nodes[static_cast<std::size_t>(r.a)].role == Role::ATTACKER) {
        CHECK(r.x >= cfg.activation_us());
      }
    }
  }
  CHECK(!fires.empty());
  const std::int64_t interval = cfg.replay_interval_us();
  for (const auto& [att, times] : fires) {
    REQUIRE(capture_at.count(att) == 1);
    // fire times are capture + k * interval, exactly
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(times[i] == capture_at[att] + static_cast<std::int64_t>(i + 1) * interval);
    }
    // count over the remaining simulated time, from the hand arithmetic
    const std::int64_t expected =
        (tr.sim_end_us - capture_at[att]) / interval;
    CHECK(static_cast<std::int64_t>(times.size()) == expected);
  }
}

TEST_CASE("replayed payload stays identical across a run") {
  ScenarioConfig cfg;
  cfg.seed = 12;
  cfg.attack_variant = AttackVariant::SPOOFED;
  cfg.replay_interval_s = 2.0;
  cfg.sim_seconds = 900;
  Trace tr = run(cfg);
  std::map<NodeId, std::set<std::pair<NodeId, std::int64_t>>> payloads;
  for (const auto& r : tr.records) {
    if (r.kind == Rec::ReplayTx) payloads[r.a].insert({r.b, r.x});
  }
  CHECK(!payloads.empty());
  for (const auto& [att, set] : payloads) {
    CHECK(set.size() == 1);  // same claimed source, same rank, every time
  }
}

TEST_CASE("attacker is isolated: no routing traffic, never a parent under MRHOF") {
  ScenarioConfig cfg;
  cfg.seed = 21;
  cfg.attack_variant = AttackVariant::NON_SPOOFED;
  cfg.replay_interval_s = 1.0;
  cfg.sim_seconds = 900;
  Trace tr = run(cfg);
  std::set<NodeId> attackers;
  for (const auto& ni : tr.nodes) {
    if (ni.role == Role::ATTACKER) attackers.insert(ni.id);
  }
  REQUIRE(!attackers.empty());
  long ignored = 0, probes_discarded_on_attacker = 0;
  for (const auto& r : tr.records) {
    switch (r.kind) {
      case Rec::AppGenerate:
      case Rec::DaoSent:
      case Rec::DisTx:
      case Rec::TrickleTx:
        CHECK(attackers.count(r.a) == 0);
        break;
      case Rec::ParentChange:
        CHECK(attackers.count(r.b) == 0);  // never adopted under MRHOF
        break;
      case Rec::AttackerIgnored:
        ++ignored;
        break;
      case Rec::ProbeDiscarded:
        if (attackers.count(r.b)) ++probes_discarded_on_attacker;
        break;
      default:
        break;
    }
  }
  CHECK(ignored > 0);  // silence still costs receptions
  CHECK(probes_discarded_on_attacker > 0);  // probing the replayer fails
  // attackers never appear in the root's downward routes
  for (const auto& [origin, route] : tr.root_routes) {
    CHECK(attackers.count(origin) == 0);
  }
  // consistent replays inflate redundancy counters until victims
  // suppress their own trickle transmissions
  long suppressed = 0;
  for (const auto& r : tr.records) {
    if (r.kind == Rec::TrickleSuppressed) ++suppressed;
  }
  CHECK(suppressed > 0);
}
