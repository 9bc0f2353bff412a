// Run traces. A simulation produces one Trace: a chronological log of
// fixed-size records plus final per-node snapshots, energy ledgers and
// the incremental tallies the engine maintained while running. Metrics
// are derived from the tallies; the metrics oracle re-derives them from
// the raw records alone.

#ifndef RPLSIM_TRACE_HPP
#define RPLSIM_TRACE_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "rplsim/core.hpp"
#include "rplsim/energy.hpp"

namespace rplsim {

// MCU cost of processing one packet or timer evaluation (duty model).
constexpr std::int64_t kCpuEventUs = 1000;

enum class Rec : std::uint8_t {
  AppGenerate,      // a=origin, x=seq
  DataOriginAttempt,// a=origin, x=seq           (MAC attempt at the origin, retries included)
  DataDelivered,    // a=origin, x=seq, y=created_us (t = arrival at root)
  DataNoRoute,      // a=node, x=seq
  MacFail,          // a=node, b=link dst, x=packet kind
  ChannelDrop,      // a=node, x=packet kind     (CSMA backoff budget exhausted)
  DioRx,            // a=observer, b=claimed source (successful decode at a legitimate node)
  InvalidDio,       // a=observer, b=claimed source
  TrickleTx,        // a=node, x=trickle interval_us at transmission
  TrickleSuppressed,// a=node, x=counter value
  DisTx,            // a=node
  ReplayFire,       // a=attacker                (replay timer expiry, pre-CSMA)
  ReplayTx,         // a=attacker, b=claimed source, x=replayed rank (frame put on air)
  AttackerCapture,  // a=attacker, b=captured claimed source, x=captured rank
  AttackerIgnored,  // a=attacker, x=packet kind
  ParentChange,     // a=node, b=new parent, x=new rank, y=1 if parent beyond comm range
  Detach,           // a=node
  ParentDemoted,    // a=node, b=demoted parent
  ProbeVerified,    // a=node, b=candidate, x=etx*1000
  ProbeDiscarded,   // a=node, b=candidate
  DaoSent,          // a=node, x=dao epoch
  DaoConfirmed,     // a=node, x=dao epoch
  RadioTx,          // a=node, x=start_us, y=end_us (own strobe, ACKs included)
  RadioAudible,     // a=node, x=start_us, y=end_us (energy heard on the air)
  CpuEvent,         // a=node                    (one 1 ms processing slot)
  SampleEnergy,     // x=bin index               (bin boundary marker)
};

struct TraceRecord {
  std::int64_t t_us = 0;
  Rec kind = Rec::AppGenerate;
  NodeId a = -1;
  NodeId b = -1;
  std::int64_t x = 0;
  std::int64_t y = 0;
};

enum class Role : std::uint8_t { ROOT, SENSOR, ATTACKER };

struct NodeInfo {
  NodeId id = 0;
  Position pos{};
  Role role = Role::SENSOR;
  std::int64_t phase_us = 0;   // wake phase within the check period
  std::uint32_t final_rank = kInfiniteRank;
  NodeId final_parent = -1;
};

// Tallies the engine maintains incrementally during a run, plus
// protocol-invariant violation counters (all expected to stay zero).
struct RunCounters {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t delay_sum_us = 0;
  std::int64_t origin_attempts = 0;
  std::int64_t no_route_drops = 0;
  std::int64_t channel_drops = 0;
  std::int64_t invalid_dios = 0;

  std::int64_t rank_rule_violations = 0;
  std::int64_t chain_violations = 0;
  std::int64_t trickle_bound_violations = 0;
  std::int64_t trickle_double_tx_violations = 0;
  std::int64_t mrhof_range_violations = 0;
  std::int64_t of0_out_of_range_adoptions = 0;
  std::int64_t attacker_tx_before_activation = 0;
  std::int64_t energy_partition_violations = 0;
  std::int64_t worklist_overflows = 0;
};

struct NodeBinPower {
  NodeId node = 0;
  std::int64_t bin_start_us = 0;
  double cpu_mw = 0.0;
  double lpm_mw = 0.0;
  double tx_mw = 0.0;
  double rx_mw = 0.0;
};

struct Trace {
  std::int64_t sim_end_us = 0;
  std::int64_t energy_bin_us = 60 * kUsPerSecond;
  std::int64_t wake_us = 125000;
  std::int64_t check_us = 2000;
  ElectricalProfile profile;
  std::vector<NodeInfo> nodes;
  std::vector<TraceRecord> records;
  std::vector<EnergyLedger> ledgers;         // indexed by node id
  std::vector<NodeBinPower> per_node_series; // node-major, bin order
  std::map<NodeId, std::vector<NodeId>> root_routes;  // root's downward routes
  RunCounters counters;
};

}  // namespace rplsim

#endif  // RPLSIM_TRACE_HPP
