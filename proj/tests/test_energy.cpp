#include <doctest.h>

#include "rplsim/energy.hpp"
#include "rplsim/rng.hpp"

using namespace rplsim;

TEST_CASE("ledger recording") {
  EnergyLedger l;
  l.record(PowerState::TX, 960);
  CHECK(l.tx_us == 960);
  l.record(PowerState::LPM, 0);
  CHECK(l.lpm_us == 0);
  l.record(PowerState::CPU, 1000000);
  l.record(PowerState::LPM, 2000000);
  CHECK(l.cpu_us == 1000000);
  CHECK(l.lpm_us == 2000000);
  CHECK(l.total_us() == 960 + 1000000 + 2000000);
  CHECK_THROWS_AS(l.record(PowerState::RX, -1), std::invalid_argument);
}

TEST_CASE("energy from Z1 profile") {
  ElectricalProfile p;
  // 1800 s entirely in LPM: 3 V * 20 uA * 1800 s = 108 mJ
  EnergyLedger lpm;
  lpm.record(PowerState::LPM, 1800 * kUsPerSecond);
  CHECK(energy_mj(lpm, p) == doctest::Approx(108.0));
  // one second of TX: 3 V * 17.4 mA * 1 s = 52.2 mJ
  EnergyLedger tx;
  tx.record(PowerState::TX, kUsPerSecond);
  CHECK(energy_mj(tx, p) == doctest::Approx(52.2));
  CHECK(energy_mj(EnergyLedger{}, p) == doctest::Approx(0.0));
}

TEST_CASE("power over the operating time") {
  ElectricalProfile p;
  EnergyLedger lpm;
  lpm.record(PowerState::LPM, 1800 * kUsPerSecond);
  CHECK(power_mw(lpm, p, SimTime::from_seconds(1800)) == doctest::Approx(0.06));
  EnergyLedger tx;
  tx.record(PowerState::TX, kUsPerSecond);
  CHECK(power_mw(tx, p, SimTime::from_seconds(1.0)) == doctest::Approx(52.2));
  CHECK_THROWS_AS(power_mw(tx, p, SimTime::zero()), std::invalid_argument);
}

TEST_CASE("energy is linear in each bucket") {
  ElectricalProfile p;
  RngStream rng(3);
  for (int i = 0; i < 50; ++i) {
    EnergyLedger a;
    a.record(PowerState::CPU, rng.next_in(0, 1000000));
    a.record(PowerState::RX, rng.next_in(0, 1000000));
    EnergyLedger b = a;
    b.record(PowerState::RX, 500000);
    EnergyLedger only_rx;
    only_rx.record(PowerState::RX, 500000);
    CHECK(energy_mj(b, p) ==
          doctest::Approx(energy_mj(a, p) + energy_mj(only_rx, p)));
  }
}

TEST_CASE("interval union and intersection") {
  std::vector<TimeSpan> v{{10, 20}, {15, 30}, {40, 50}};
  merge_union(v);
  REQUIRE(v.size() == 2);
  CHECK(total_length(v) == 30);
  std::vector<TimeSpan> w{{0, 12}, {45, 60}};
  merge_union(w);
  CHECK(intersect_length(v, w) == 2 + 5);
}

TEST_CASE("periodic check spans") {
  std::vector<TimeSpan> out;
  // phase 0, wake 125 ms, check 2 ms over one minute: 480 checks
  append_check_spans(0, 125000, 2000, 0, 60 * kUsPerSecond, out);
  CHECK(out.size() == 480);
  std::int64_t total = 0;
  for (auto& sp : out) total += sp.e - sp.s;
  CHECK(total == 480 * 2000);
  // clipping: a check straddling the window start is truncated
  out.clear();
  append_check_spans(0, 125000, 2000, 1000, 126000, out);
  REQUIRE(out.size() == 2);
  CHECK(out[0].s == 1000);
  CHECK(out[0].e == 2000);
  CHECK(out[1].s == 125000);
  CHECK(out[1].e == 126000);
}
