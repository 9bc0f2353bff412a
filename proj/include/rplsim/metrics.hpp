// Scenario metrics. PDR divides root deliveries by origin-side DATA
// transmission attempts (MAC retries included); app_pdr divides
// distinct delivered application packets by the number generated;
// AE2ED averages creation-to-root delay over delivered packets; APC
// averages electrical power over the legitimate sensor nodes.
//
// metrics_from_trace() reads the tallies the engine kept incrementally.
// oracle_scan() re-derives every number from the raw record log alone
// (different code path, different accounting algorithm) and must agree
// exactly; any divergence is a bug in one of the two.

#ifndef RPLSIM_METRICS_HPP
#define RPLSIM_METRICS_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "rplsim/energy.hpp"
#include "rplsim/trace.hpp"

namespace rplsim {

struct MetricsReport {
  std::optional<double> pdr;
  std::optional<double> app_pdr;
  std::optional<double> ae2ed_s;
  double apc_mw = 0.0;
  std::vector<NodeBinPower> per_node_series;
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t origin_attempts = 0;
};

inline double mean_sensor_power_mw(const Trace& tr, const std::vector<EnergyLedger>& ledgers,
                                   const ElectricalProfile& profile) {
  if (tr.sim_end_us <= 0) return 0.0;
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < tr.nodes.size(); ++i) {
    if (tr.nodes[i].role != Role::SENSOR) continue;
    sum += power_mw(ledgers[i], profile, SimTime::from_us(tr.sim_end_us));
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

inline MetricsReport metrics_from_trace(const Trace& tr) {
  MetricsReport r;
  r.generated = tr.counters.generated;
  r.delivered = tr.counters.delivered;
  r.origin_attempts = tr.counters.origin_attempts;
  if (tr.counters.origin_attempts > 0) {
    r.pdr = static_cast<double>(tr.counters.delivered) /
            static_cast<double>(tr.counters.origin_attempts);
  }
  if (tr.counters.generated > 0) {
    r.app_pdr = static_cast<double>(tr.counters.delivered) /
                static_cast<double>(tr.counters.generated);
  }
  if (tr.counters.delivered > 0) {
    r.ae2ed_s = static_cast<double>(tr.counters.delay_sum_us) /
                static_cast<double>(tr.counters.delivered) * 1e-6;
  }
  r.apc_mw = mean_sensor_power_mw(tr, tr.ledgers, tr.profile);
  r.per_node_series = tr.per_node_series;
  return r;
}

// ----------------------------------------------------------- the oracle

struct OracleResult {
  std::optional<double> pdr;
  std::optional<double> app_pdr;
  std::optional<double> ae2ed_s;
  double apc_mw = 0.0;
  std::vector<EnergyLedger> ledgers;
};

namespace oracle_detail {

// Coverage length of a set of (possibly overlapping) spans, minus the
// part covered by `subtract` (disjoint, sorted), via an edge sweep.
inline std::int64_t swept_length_minus(std::vector<std::pair<std::int64_t, int>>& edges,
                                       const std::vector<TimeSpan>& subtract) {
  std::sort(edges.begin(), edges.end());
  std::int64_t covered = 0;
  std::vector<TimeSpan> cover;
  int depth = 0;
  std::int64_t open_at = 0;
  for (const auto& [t, d] : edges) {
    if (depth == 0 && d > 0) open_at = t;
    depth += d;
    if (depth == 0 && d < 0) cover.push_back({open_at, t});
  }
  for (const auto& sp : cover) covered += sp.e - sp.s;
  // Remove the subtracted coverage.
  std::size_t i = 0, j = 0;
  std::int64_t shared = 0;
  while (i < cover.size() && j < subtract.size()) {
    const std::int64_t lo = std::max(cover[i].s, subtract[j].s);
    const std::int64_t hi = std::min(cover[i].e, subtract[j].e);
    if (hi > lo) shared += hi - lo;
    if (cover[i].e < subtract[j].e) ++i; else ++j;
  }
  return covered - shared;
}

}  // namespace oracle_detail

// Recomputes PDR, app_pdr, AE2ED and APC by a straight scan over the
// raw record log, ignoring every incremental counter the engine kept.
inline OracleResult oracle_scan(const Trace& tr) {
  OracleResult out;
  std::int64_t generated = 0, delivered = 0, attempts = 0, delay_sum = 0;
  const std::size_t n = tr.nodes.size();
  std::vector<std::vector<TimeSpan>> tx(n), audible(n);
  std::vector<std::int64_t> cpu_count(n, 0);
  for (const auto& r : tr.records) {
    switch (r.kind) {
      case Rec::AppGenerate: ++generated; break;
      case Rec::DataOriginAttempt: ++attempts; break;
      case Rec::DataDelivered:
        ++delivered;
        delay_sum += r.t_us - r.y;
        break;
      case Rec::RadioTx: tx[static_cast<std::size_t>(r.a)].push_back({r.x, r.y}); break;
      case Rec::RadioAudible:
        audible[static_cast<std::size_t>(r.a)].push_back({r.x, r.y});
        break;
      case Rec::CpuEvent: ++cpu_count[static_cast<std::size_t>(r.a)]; break;
      default: break;
    }
  }
  if (attempts > 0) {
    out.pdr = static_cast<double>(delivered) / static_cast<double>(attempts);
  }
  if (generated > 0) {
    out.app_pdr = static_cast<double>(delivered) / static_cast<double>(generated);
  }
  if (delivered > 0) {
    out.ae2ed_s =
        static_cast<double>(delay_sum) / static_cast<double>(delivered) * 1e-6;
  }
  out.ledgers.assign(n, EnergyLedger{});
  if (tr.sim_end_us > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<TimeSpan> own = tx[i];
      merge_union(own);
      std::vector<std::pair<std::int64_t, int>> edges;
      for (const auto& sp : audible[i]) {
        edges.emplace_back(sp.s, 1);
        edges.emplace_back(sp.e, -1);
      }
      std::vector<TimeSpan> checks;
      append_check_spans(tr.nodes[i].phase_us, tr.wake_us, tr.check_us, 0, tr.sim_end_us,
                         checks);
      for (const auto& sp : checks) {
        edges.emplace_back(sp.s, 1);
        edges.emplace_back(sp.e, -1);
      }
      EnergyLedger& led = out.ledgers[i];
      led.tx_us = total_length(own);
      led.rx_us = oracle_detail::swept_length_minus(edges, own);
      led.cpu_us = cpu_count[i] * kCpuEventUs;
      led.lpm_us = tr.sim_end_us - led.tx_us - led.rx_us - led.cpu_us;
      if (led.lpm_us < 0) led.lpm_us = 0;
    }
  }
  out.apc_mw = mean_sensor_power_mw(tr, out.ledgers, tr.profile);
  return out;
}

}  // namespace rplsim

#endif  // RPLSIM_METRICS_HPP
