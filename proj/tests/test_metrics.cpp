#include <doctest.h>

#include <algorithm>

#include "rplsim/engine.hpp"
#include "rplsim/metrics.hpp"
#include "rplsim/rng.hpp"

using namespace rplsim;

namespace {

Trace trivial_trace(std::int64_t generated, std::int64_t attempts, std::int64_t delivered,
                    std::int64_t delay_sum_us) {
  Trace tr;
  tr.sim_end_us = 1800 * kUsPerSecond;
  tr.counters.generated = generated;
  tr.counters.origin_attempts = attempts;
  tr.counters.delivered = delivered;
  tr.counters.delay_sum_us = delay_sum_us;
  return tr;
}

}  // namespace

TEST_CASE("pdr arithmetic") {
  auto lossless = metrics_from_trace(trivial_trace(300, 300, 300, 300));
  REQUIRE(lossless.pdr.has_value());
  CHECK(*lossless.pdr == doctest::Approx(1.0));
  CHECK(*lossless.app_pdr == doctest::Approx(1.0));

  auto nothing = metrics_from_trace(trivial_trace(300, 400, 0, 0));
  CHECK(*nothing.pdr == doctest::Approx(0.0));
  CHECK_FALSE(nothing.ae2ed_s.has_value());

  auto empty = metrics_from_trace(trivial_trace(0, 0, 0, 0));
  CHECK_FALSE(empty.pdr.has_value());
  CHECK_FALSE(empty.app_pdr.has_value());
}

TEST_CASE("ae2ed is the arithmetic mean of delivered delays") {
  // delays of 1, 2 and 3 seconds
  auto m = metrics_from_trace(trivial_trace(3, 3, 3, 6 * kUsPerSecond));
  REQUIRE(m.ae2ed_s.has_value());
  CHECK(*m.ae2ed_s == doctest::Approx(2.0));
  auto single = metrics_from_trace(trivial_trace(1, 1, 1, 140000));
  CHECK(*single.ae2ed_s == doctest::Approx(0.14));
}

TEST_CASE("apc averages legitimate sensors only") {
  Trace tr;
  tr.sim_end_us = 1800 * kUsPerSecond;
  tr.nodes.resize(3);
  tr.nodes[0].id = 0;
  tr.nodes[0].role = Role::ROOT;
  tr.nodes[1].id = 1;
  tr.nodes[1].role = Role::SENSOR;
  tr.nodes[2].id = 2;
  tr.nodes[2].role = Role::ATTACKER;
  tr.ledgers.resize(3);
  tr.ledgers[0].record(PowerState::TX, 1800 * kUsPerSecond);   // root: excluded
  tr.ledgers[1].record(PowerState::LPM, 1800 * kUsPerSecond);  // the one sensor
  tr.ledgers[2].record(PowerState::RX, 1800 * kUsPerSecond);   // attacker: excluded
  auto m = metrics_from_trace(tr);
  CHECK(m.apc_mw == doctest::Approx(0.06));  // all-LPM node
}

TEST_CASE("app_pdr never falls below pdr") {
  for (unsigned seed : {31u, 32u}) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.sim_seconds = 600;
    cfg.attack_variant = seed % 2 ? AttackVariant::NON_SPOOFED : AttackVariant::NONE;
    Trace tr = run(cfg);
    auto m = metrics_from_trace(tr);
    REQUIRE(m.pdr.has_value());
    REQUIRE(m.app_pdr.has_value());
    CHECK(*m.app_pdr >= *m.pdr);
    CHECK(m.origin_attempts >= m.generated);
  }
}

TEST_CASE("oracle equals incremental metrics exactly") {
  for (int s = 1; s <= 12; ++s) {
    ScenarioConfig cfg;
    cfg.seed = 500u + static_cast<unsigned>(s);
    cfg.n_sensors = 5;
    cfg.n_attackers = s % 2;
    cfg.area_m = 80;
    cfg.sim_seconds = 120;
    cfg.attack_variant = s % 2 ? AttackVariant::SPOOFED : AttackVariant::NONE;
    cfg.attacker_activation_s = 30;
    Trace tr = run(cfg);
    auto m = metrics_from_trace(tr);
    auto o = oracle_scan(tr);
    CHECK(m.pdr.has_value() == o.pdr.has_value());
    if (m.pdr) CHECK(*m.pdr == *o.pdr);
    CHECK(m.app_pdr.has_value() == o.app_pdr.has_value());
    if (m.app_pdr) CHECK(*m.app_pdr == *o.app_pdr);
    CHECK(m.ae2ed_s.has_value() == o.ae2ed_s.has_value());
    if (m.ae2ed_s) CHECK(*m.ae2ed_s == *o.ae2ed_s);
    CHECK(m.apc_mw == o.apc_mw);
    for (std::size_t i = 0; i < tr.ledgers.size(); ++i) {
      CHECK(tr.ledgers[i].tx_us == o.ledgers[i].tx_us);
      CHECK(tr.ledgers[i].rx_us == o.ledgers[i].rx_us);
      CHECK(tr.ledgers[i].cpu_us == o.ledgers[i].cpu_us);
      CHECK(tr.ledgers[i].lpm_us == o.ledgers[i].lpm_us);
    }
  }
}

TEST_CASE("oracle on an empty trace") {
  Trace tr;
  tr.sim_end_us = 0;
  auto o = oracle_scan(tr);
  CHECK_FALSE(o.pdr.has_value());
  CHECK_FALSE(o.ae2ed_s.has_value());
  CHECK(o.apc_mw == 0.0);
}

TEST_CASE("ae2ed is invariant under record reordering") {
  ScenarioConfig cfg;
  cfg.seed = 600;
  cfg.n_sensors = 5;
  cfg.area_m = 80;
  cfg.n_attackers = 0;
  cfg.sim_seconds = 120;
  Trace tr = run(cfg);
  auto before = oracle_scan(tr);
  RngStream rng(1);
  // Fisher-Yates over the record log
  for (std::size_t i = tr.records.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.next_in(0, static_cast<std::int64_t>(i) - 1));
    std::swap(tr.records[i - 1], tr.records[j]);
  }
  auto after = oracle_scan(tr);
  REQUIRE(before.ae2ed_s.has_value() == after.ae2ed_s.has_value());
  if (before.ae2ed_s) CHECK(*before.ae2ed_s == *after.ae2ed_s);
  CHECK(before.apc_mw == after.apc_mw);
}
