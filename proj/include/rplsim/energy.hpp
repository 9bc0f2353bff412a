// Per-node energy accounting. A node's uptime is partitioned into four
// buckets (CPU / LPM / TX / RX) held as integer microseconds; energy is
// V * sum(I_state * t_state) over the electrical profile of a Zolertia
// Z1-class mote. The duty-cycle model that fills the buckets lives in
// the engine; this header owns the arithmetic plus the interval-union
// helpers the accounting needs.

#ifndef RPLSIM_ENERGY_HPP
#define RPLSIM_ENERGY_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rplsim/core.hpp"

namespace rplsim {

// Defaults are the Z1 mote's current draws at 3 V.
struct ElectricalProfile {
  double volts = 3.0;
  double i_cpu_a = 426e-6;
  double i_lpm_a = 20e-6;
  double i_tx_a = 17.4e-3;
  double i_rx_a = 18.8e-3;
};

enum class PowerState : std::uint8_t { CPU, LPM, TX, RX };

struct EnergyLedger {
  std::int64_t cpu_us = 0;
  std::int64_t lpm_us = 0;
  std::int64_t tx_us = 0;
  std::int64_t rx_us = 0;

  void record(PowerState s, std::int64_t duration_us) {
    if (duration_us < 0) {
      throw std::invalid_argument("EnergyLedger::record: negative duration");
    }
    switch (s) {
      case PowerState::CPU: cpu_us += duration_us; break;
      case PowerState::LPM: lpm_us += duration_us; break;
      case PowerState::TX: tx_us += duration_us; break;
      case PowerState::RX: rx_us += duration_us; break;
    }
  }

  std::int64_t total_us() const { return cpu_us + lpm_us + tx_us + rx_us; }
};

inline double energy_mj(const EnergyLedger& l, const ElectricalProfile& p) {
  const double cpu_s = static_cast<double>(l.cpu_us) * 1e-6;
  const double lpm_s = static_cast<double>(l.lpm_us) * 1e-6;
  const double tx_s = static_cast<double>(l.tx_us) * 1e-6;
  const double rx_s = static_cast<double>(l.rx_us) * 1e-6;
  return 1000.0 * p.volts *
         (p.i_cpu_a * cpu_s + p.i_lpm_a * lpm_s + p.i_tx_a * tx_s + p.i_rx_a * rx_s);
}

inline double power_mw(const EnergyLedger& l, const ElectricalProfile& p, SimTime tos) {
  if (tos.us <= 0) {
    throw std::invalid_argument("power_mw: total operating time must be positive");
  }
  return energy_mj(l, p) / tos.seconds();
}

// ------------------------------------------------------- interval math

struct TimeSpan {
  std::int64_t s = 0;
  std::int64_t e = 0;
};

// Sorts the spans and collapses them into a disjoint, ordered union.
inline void merge_union(std::vector<TimeSpan>& spans) {
  if (spans.empty()) return;
  std::sort(spans.begin(), spans.end(),
            [](const TimeSpan& a, const TimeSpan& b) { return a.s < b.s; });
  std::size_t out = 0;
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].s <= spans[out].e) {
      spans[out].e = std::max(spans[out].e, spans[i].e);
    } else {
      spans[++out] = spans[i];
    }
  }
  spans.resize(out + 1);
}

inline std::int64_t total_length(const std::vector<TimeSpan>& disjoint) {
  std::int64_t len = 0;
  for (const auto& sp : disjoint) len += sp.e - sp.s;
  return len;
}

// Length of the intersection of two disjoint ordered span lists.
inline std::int64_t intersect_length(const std::vector<TimeSpan>& a,
                                     const std::vector<TimeSpan>& b) {
  std::int64_t len = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const std::int64_t lo = std::max(a[i].s, b[j].s);
    const std::int64_t hi = std::min(a[i].e, b[j].e);
    if (hi > lo) len += hi - lo;
    if (a[i].e < b[j].e) ++i; else ++j;
  }
  return len;
}

// Periodic receive checks: the radio listens for check_us once every
// wake_us, phase-shifted per node. Spans clipped to [lo, hi).
inline void append_check_spans(std::int64_t phase_us, std::int64_t wake_us,
                               std::int64_t check_us, std::int64_t lo, std::int64_t hi,
                               std::vector<TimeSpan>& out) {
  if (wake_us <= 0 || check_us <= 0 || hi <= lo) return;
  std::int64_t k = (lo - phase_us - check_us) / wake_us;
  if (k < 0) k = 0;
  for (std::int64_t t = phase_us + k * wake_us; t < hi; t += wake_us) {
    const std::int64_t s = std::max(t, lo);
    const std::int64_t e = std::min(t + check_us, hi);
    if (e > s) out.push_back({s, e});
  }
}

}  // namespace rplsim

#endif  // RPLSIM_ENERGY_HPP
